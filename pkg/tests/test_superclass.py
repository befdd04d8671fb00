from math import comb

import pytest
from hypothesis import given, strategies as st

from conftest import naive_contains
from permchain.antichain import AntichainSpec, elements_of_length
from permchain.closure import closure_counts
from permchain.errors import InvalidInputError, ResourceLimitError
from permchain.perm import le, permutations_of_length
from permchain.superclass import (
    ClassSpec,
    avoiders,
    build_rational_superclass,
    check_conditions,
    choose_threshold,
    class_counts,
    growth_upper_estimate,
)

K3 = AntichainSpec.from_tau(3, (2, 1), (1, 2, 3, 4))
AV12 = ClassSpec(((1, 2),))


@pytest.fixture(scope="module")
def closure12():
    return closure_counts(K3, 12, recheck=False)


def test_catalan_counts():
    assert class_counts(ClassSpec(((1, 2, 3),)), 7) == [comb(2 * n, n) // (n + 1) for n in range(1, 8)]


def test_trivial_classes():
    assert avoiders(AV12, 4) == [(4, 3, 2, 1)]
    assert avoiders(ClassSpec(((2, 1),)), 3) == [(1, 2, 3)]
    assert class_counts(ClassSpec(((1,),)), 4) == [0, 0, 0, 0]


@pytest.mark.parametrize("basis", [((1, 3, 2),), ((2, 3, 1), (1, 2, 3)), ((2, 1, 4, 3),)])
def test_avoiders_match_brute_force(basis):
    cls = ClassSpec(basis)
    for n in range(1, 7):
        expected = [p for p in permutations_of_length(n) if not any(naive_contains(p, b) for b in basis)]
        assert avoiders(cls, n) == sorted(expected)


def test_basis_validation_and_cap():
    with pytest.raises(InvalidInputError):
        ClassSpec(())
    with pytest.raises(InvalidInputError):
        ClassSpec(((1, 2), (1, 2, 3)))
    with pytest.raises(ResourceLimitError):
        avoiders(AV12, 13)


@given(st.lists(st.integers(1, 50), min_size=3, max_size=10))
def test_growth_estimate_bounds_ratios(counts):
    est = growth_upper_estimate(counts)
    assert est >= 0


def test_conditions_av12():
    rep = check_conditions(AV12, K3)
    assert rep.passed
    assert rep["A1"].exact and rep["A2"].exact and not rep["A3"].exact
    assert rep.antichain_growth == pytest.approx(1.3247179572, abs=1e-9)


def test_conditions_failures():
    bad_alpha = AntichainSpec.from_tau(3, (2, 1), (4, 3, 2, 1))
    assert not check_conditions(AV12, bad_alpha)["A1"].passed
    rep = check_conditions(ClassSpec(((1, 2, 3),)), K3)
    assert not rep["A3"].passed
    assert rep.class_growth_estimate > 3
    with pytest.raises(InvalidInputError):
        check_conditions(AV12, AntichainSpec.split_end_paths())


def test_choose_threshold():
    assert choose_threshold([0, 0, 1, 1], [1, 1, 1, 1], 1) == (3, [1, 2])
    assert choose_threshold([0, 0, 1, 0], [1, 1, 1, 1], 1) == (None, [1, 2, 4])
    assert choose_threshold([5, 5], [1, 1], 1) == (1, [])


def test_av12_superclass(closure12):
    rep = build_rational_superclass(AV12, K3, 12, closure=closure12)
    assert rep.N == 12 and rep.ok
    assert rep.downward_closed and rep.disjoint
    row = rep.rows[11]
    assert row.c == 1 and row.x == 1 and row.c_rat == row.u_closure
    # the decreasing permutation leaves the closure from length 5 on
    assert [r.overlap for r in rep.rows[:6]] == [1, 1, 1, 1, 0, 0]
    assert rep.polynomial_degree == 11
    removed = rep.removed[12]
    assert removed == elements_of_length(K3, 12)[:1]
    retained = [e for e in elements_of_length(K3, 12) if e not in removed]
    assert not any(le(r, e) for r in removed for e in retained)


def test_av12_literal_mode(closure12):
    rep = build_rational_superclass(AV12, K3, 12, paper_literal=True, closure=closure12)
    assert rep.N == 12 and rep.rows[11].x_literal == 1


def test_empty_class(closure12):
    rep = build_rational_superclass(ClassSpec(((1,),)), K3, 12, closure=closure12)
    assert rep.N == K3.min_element_length() == 12
    assert all(r.x == 0 for r in rep.rows)
    assert rep.c_rat_counts() == closure12.table.counts()


def test_threshold_shortfall(closure12):
    rep = build_rational_superclass(ClassSpec(((1, 2, 3),)), K3, 12, closure=closure12)
    assert rep.N is None and not rep.ok
    assert 12 in rep.shortfall
    assert "shortfall" in rep.summary()
