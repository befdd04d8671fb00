import random

import pytest

from conftest import naive_patterns
from permchain.antichain import AntichainSpec, elements_of_length, elements_up_to
from permchain.closure import (
    BRUTE,
    ClosureTable,
    Grammar,
    admissible_ends,
    cache_key,
    closure_counts,
    default_cutoff,
    downset,
    grammar_generate,
    grammar_soundness,
    in_closure,
    path_order,
    reconcile_report,
)
from permchain.errors import InvalidInputError
from permchain.genfun import gf_closure_paper, series_expand
from permchain.oscillation import endpoints, sigma
from permchain.perm import flatten, inversion_graph, le

K3 = AntichainSpec.from_tau(3, (2, 1), (1, 2, 3, 4))
U = AntichainSpec.split_end_paths()


@pytest.fixture(scope="module")
def k3_small():
    return closure_counts(K3, 9)


def test_downset_matches_naive():
    seeds = [(2, 4, 1, 3), (3, 1, 5, 2, 4), (1, 2)]
    table = downset(seeds, 5)
    for n in range(1, 6):
        expected = set()
        for s in seeds:
            if len(s) >= n:
                expected |= naive_patterns(s, n)
        assert set(table.members(n)) == expected


def test_split_end_paths_closure_matches_patterns():
    # U has one element per length, so its patterns can be listed directly
    # the default cutoff is needlessly long for single-entry fills; the
    # recheck at cutoff + 4 still guards the answer
    n_max, cutoff = 5, 16
    brute = closure_counts(U, n_max, cutoff)
    assert brute.stable
    elems = elements_up_to(U, cutoff)
    for n in range(1, n_max + 1):
        direct = set().union(*(naive_patterns(e, n) for e in elems))
        assert set(brute.table.members(n)) == direct


def test_k3_small_counts(k3_small):
    assert k3_small.stable
    assert list(k3_small.series.coeffs) == [1, 2, 6, 23, 85, 293, 956, 3049, 9730]
    assert k3_small.table.first_unclosed() is None
    assert k3_small.table.provenance_of((1, 2)) == BRUTE
    assert k3_small.table.provenance_of((1,) * 0 + (9, 8, 7, 6, 5, 4, 3, 2, 1)) is None


def test_k3_members_lie_below_elements(k3_small):
    elems = elements_up_to(K3, default_cutoff(6))
    rng = random.Random(7)
    for n in (4, 5, 6):
        for p in rng.sample(k3_small.table.members(n), 15):
            assert any(le(p, e) for e in elems if len(e) >= n)


def test_k3_element_patterns_present(k3_small):
    for e in elements_up_to(K3, 14):
        for n in (3, 4, 5):
            assert naive_patterns(e, n) <= set(k3_small.table.members(n))


def test_in_closure():
    assert in_closure((1, 2, 3, 4), K3)
    assert in_closure((2, 1), K3)
    # inversion-graph cliques in elements have at most 4 vertices
    assert not in_closure((5, 4, 3, 2, 1), K3)
    with pytest.raises(InvalidInputError):
        in_closure((1, 2, 3), K3, cutoff=2)


def test_cache_round_trip(tmp_path):
    first = closure_counts(K3, 6, cache_dir=tmp_path)
    key = cache_key(K3, 6, default_cutoff(6))
    assert (tmp_path / key / "meta.json").exists()
    again = closure_counts(K3, 6, cache_dir=tmp_path)
    assert again.series == first.series and again.stable
    table = ClosureTable.load(tmp_path / key)
    assert table.fingerprint() == first.table.fingerprint()


@pytest.mark.parametrize("m", range(4, 13))
def test_path_order(m):
    order = path_order(m)
    s = sigma(m)
    edges = inversion_graph(s).edges
    assert sorted(order) == list(range(1, m + 1))
    assert {order[0], order[-1]} == set(endpoints(m))
    for a, b in zip(order, order[1:]):
        assert (min(a, b), max(a, b)) in edges


def test_admissible_ends_nonempty():
    begins, ends = admissible_ends(4)
    assert begins and ends
    for pat, d in begins | ends:
        assert len(pat) >= 1 and d >= 0


K4 = AntichainSpec.from_tau(4, (1, 3, 2), (1, 2, 3, 4, 5))
REV = AntichainSpec.from_tau(3, (1, 2), (4, 3, 2, 1))


@pytest.mark.parametrize("spec,cutoff", [(K3, None), (REV, None), (K4, 44)], ids=["k3", "rev", "k4"])
def test_grammar_equals_brute(spec, cutoff):
    n_max = 8
    brute = closure_counts(spec, n_max, cutoff)
    gram = grammar_generate(spec, n_max)
    assert brute.stable
    for n in range(1, n_max + 1):
        assert gram.table.layers[n] == brute.table.layers[n]


def test_short_cutoff_is_flagged():
    # longer fills need longer elements; 3n + 12 misses members at n = 8
    brute = closure_counts(K4, 8)
    assert brute.stable is False
    assert brute.series.coeffs[-1] < brute.recheck.coeffs[-1] == 9901


def test_grammar_raw_counts_match_closed_form():
    raw = Grammar(K3, 10).raw_counts()
    paper = series_expand(gf_closure_paper(K3).total, 10)
    assert raw == paper


def test_multiplicity_sums_to_raw():
    g = Grammar(K3, 6)
    res = g.generate()
    for n in range(1, 7):
        assert sum(g.multiplicity(p) for p in res.table.members(n)) == res.raw.coeffs[n - 1]


def test_soundness_small():
    g = Grammar(K3, 8)
    res = g.generate()
    rep = grammar_soundness(K3, res.table, g)
    assert rep.passed and rep.checked == sum(res.table.counts())
    for pi in res.table.members(8)[::400]:
        host, positions = g.certificate(pi)
        assert host in elements_of_length(K3, len(host))
        assert flatten([host[i - 1] for i in positions]) == pi


def test_reconcile_small():
    rep = reconcile_report(K3, 6)
    rows = rep.rows()
    assert [r["brute"] for r in rows] == [1, 2, 6, 23, 85, 293]
    assert rep.tables_equal
    assert [r["grammar_raw"] for r in rows] == [r["paper_gf"] for r in rows]
    assert all(r["delta_paper_brute"] == r["paper_gf"] - r["brute"] for r in rows)


def test_cutoff_too_small():
    with pytest.raises(InvalidInputError):
        closure_counts(K3, 8, cutoff=5)
