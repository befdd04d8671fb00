import itertools
from math import factorial

import pytest
import sympy
from hypothesis import given, strategies as st

from conftest import naive_contains
from permchain.antichain import (
    AntichainSpec,
    ElementId,
    a_tau_layer_size,
    build_element,
    element_ids_of_length,
    elements_of_length,
    elements_up_to,
    make_A_tau,
    validate_spec,
    verify_antichain,
    verify_pairwise,
)
from permchain.errors import InvalidInputError, ResourceLimitError
from permchain.perm import inversion_graph, is_sum_indecomposable, permutations_of_length

K3 = AntichainSpec.from_tau(3, (2, 1), (1, 2, 3, 4))


def test_split_end_paths_one_per_length():
    spec = AntichainSpec.split_end_paths()
    counts = [len(elements_of_length(spec, n)) for n in range(1, 25)]
    assert counts == [0] * 5 + [1] * 19


def test_split_end_paths_shape():
    # each element is a tree: a path whose two ends each fork into two leaves
    spec = AntichainSpec.split_end_paths()
    for p in elements_up_to(spec, 14):
        g = inversion_graph(p)
        degs = g.degrees()
        assert g.is_connected() and len(g.edges) == len(p) - 1
        assert sorted(degs)[-2:] == [3, 3] and degs.count(1) == 4


def test_k3_counts_against_sympy():
    # element lengths are 2|alpha| plus the fill lengths, with m - 2 >= 2 fills
    x = sympy.symbols("x")
    f = x**2 + x**3
    gf = x**8 * f**2 / (1 - f)
    coeffs = sympy.Poly(sympy.series(gf, x, 0, 17).removeO(), x).all_coeffs()[::-1]
    coeffs += [0] * (17 - len(coeffs))
    got = [len(elements_of_length(K3, n)) for n in range(17)]
    assert got == [int(c) for c in coeffs]
    assert got[12:17] == [1, 2, 2, 3, 4]


def test_elements_are_distinct_and_sized():
    for n in range(12, 17):
        ids = list(element_ids_of_length(K3, n))
        perms = [build_element(K3, e) for e in ids]
        assert len(set(perms)) == len(perms)
        assert all(len(p) == n for p in perms)
        assert all(is_sum_indecomposable(p) for p in perms)


def test_pairwise_oracle_small():
    elems = elements_up_to(K3, 14)
    for a, b in itertools.permutations(elems, 2):
        if len(a) <= len(b):
            assert not naive_contains(b, a)
    rep = verify_antichain(K3, 16)
    assert rep.passed and rep.elements == 12 and rep.offending is None


def test_pairwise_reports_offender():
    rep = verify_pairwise([(1, 2), (2, 3, 1), (1, 2, 3)])
    assert not rep.passed
    assert rep.offending == ((1, 2), (2, 3, 1))


@pytest.mark.parametrize("k", [3, 4, 5])
def test_a_tau_layer(k):
    for tau in permutations_of_length(k - 1):
        containing = sum(naive_contains(p, tau) for p in permutations_of_length(k))
        assert containing == k * k - 2 * k + 2
        A = make_A_tau(k, tau)
        assert len(A) == 1 + factorial(k) - containing == 1 + a_tau_layer_size(k)


def test_make_a_tau_errors():
    with pytest.raises(InvalidInputError):
        make_A_tau(2, (1,))
    with pytest.raises(InvalidInputError):
        make_A_tau(4, (2, 1))
    with pytest.raises(ResourceLimitError):
        make_A_tau(9, tuple(range(8, 0, -1)))


def test_validate_spec():
    assert validate_spec(K3).passed
    bad = AntichainSpec.from_tau(3, (2, 1), (4, 3, 2, 1))
    rep = validate_spec(bad)
    assert not rep.passed and not rep["tau-not-in-alpha"].passed
    with pytest.raises(InvalidInputError):
        AntichainSpec(3, (1, 2, 3), ((2, 1),))


def test_spec_fingerprint_and_json():
    assert K3.fingerprint() == AntichainSpec.from_tau(3, (2, 1), (1, 2, 3, 4)).fingerprint()
    assert K3.fingerprint() != AntichainSpec.from_tau(3, (1, 2), (4, 3, 2, 1)).fingerprint()
    d = K3.to_json()
    assert d["k"] == 3 and d["tau"] == [2, 1] and d["alpha"] == [1, 2, 3, 4]


@given(st.integers(4, 9), st.data())
def test_build_element_length(m, data):
    fills = tuple(data.draw(st.sampled_from(K3.A)) for _ in range(m - 2))
    p = build_element(K3, ElementId(m, fills))
    assert len(p) == 8 + sum(map(len, fills))
    assert sorted(p) == list(range(1, len(p) + 1))


def test_build_element_rejects():
    with pytest.raises(InvalidInputError):
        build_element(K3, ElementId(4, ((2, 1),)))
