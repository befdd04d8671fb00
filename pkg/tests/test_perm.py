import itertools

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from conftest import naive_contains, naive_patterns, perms
from permchain.errors import InvalidInputError, ResourceLimitError
from permchain.perm import (
    contains,
    direct_sum,
    flatten,
    format_perm,
    inversion_graph,
    is_induced_subgraph,
    is_sum_indecomposable,
    le,
    parse_perm,
    patterns,
    read_perm_file,
    skew_components,
    skew_sum,
    sum_components,
    write_perm_file,
)


def test_parse_and_format():
    assert parse_perm("3 1 4 2") == (3, 1, 4, 2)
    assert parse_perm("10 1 2 3 4 5 6 7 8 9")[0] == 10
    assert format_perm((3, 1, 4, 2)) == "3 1 4 2"
    for bad in ("1 1", "2 3", "0 1", "a b"):
        with pytest.raises(InvalidInputError):
            parse_perm(bad)


def test_perm_file_round_trip(tmp_path):
    path = tmp_path / "basis.txt"
    data = [(1, 2), (3, 1, 2), (1,)]
    write_perm_file(path, data)
    assert read_perm_file(path) == sorted(data, key=lambda p: (len(p), p))


def test_flatten():
    assert flatten([30, 10, 20]) == (3, 1, 2)
    assert flatten([]) == ()


def test_contains_known():
    occ = contains((3, 9, 1, 8, 6, 7, 4, 5, 2), (5, 1, 3, 4, 2))
    assert occ is not None
    assert flatten([(3, 9, 1, 8, 6, 7, 4, 5, 2)[i - 1] for i in occ]) == (5, 1, 3, 4, 2)
    assert contains((1, 2, 3), (2, 1)) is None
    assert le((), (1,))


@given(perms(1, 9), perms(1, 5))
def test_contains_matches_naive(host, pattern):
    assert (contains(host, pattern) is not None) == naive_contains(host, pattern)


@given(perms(1, 8), perms(1, 4))
def test_occurrence_is_least(host, pattern):
    occ = contains(host, pattern)
    if occ is None:
        return
    cands = [
        tuple(i + 1 for i in c)
        for c in itertools.combinations(range(len(host)), len(pattern))
        if flatten([host[i] for i in c]) == pattern
    ]
    assert occ == min(cands)


@given(perms(1, 7))
def test_patterns_match_naive(p):
    for k in range(1, len(p) + 1):
        assert patterns(p, k) == naive_patterns(p, k)
    assert patterns(p) == set().union(*(naive_patterns(p, k) for k in range(1, len(p) + 1)))


def test_patterns_limit():
    with pytest.raises(ResourceLimitError):
        patterns(tuple(range(1, 40)))


@given(perms(1, 5), perms(1, 5))
def test_sums_and_components(a, b):
    s = direct_sum(a, b)
    assert sum_components(s) == sum_components(a) + sum_components(b)
    assert skew_components(skew_sum(a, b)) == skew_components(a) + skew_components(b)
    assert not is_sum_indecomposable(s)


@given(perms(1, 8))
def test_components_reassemble(p):
    comps = sum_components(p)
    out = ()
    for c in comps:
        out = direct_sum(out, c)
        assert is_sum_indecomposable(c)
    assert out == p


@given(perms(1, 8))
def test_inversion_graph_connected_iff_indecomposable(p):
    g = inversion_graph(p)
    ref = nx.Graph()
    ref.add_nodes_from(range(1, len(p) + 1))
    ref.add_edges_from(g.edges)
    assert g.is_connected() == nx.is_connected(ref) == is_sum_indecomposable(p)


def _nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(1, g.n + 1))
    h.add_edges_from(g.edges)
    return h


@given(perms(1, 7), perms(1, 5))
def test_induced_subgraph_matches_networkx(big, small):
    gb, gs = inversion_graph(big), inversion_graph(small)
    expected = nx.algorithms.isomorphism.GraphMatcher(_nx(gb), _nx(gs)).subgraph_is_isomorphic()
    assert is_induced_subgraph(gs, gb) == expected


@given(perms(1, 8), st.data())
def test_containment_implies_induced_subgraph(big, data):
    keep = data.draw(st.lists(st.sampled_from(range(len(big))), min_size=1, unique=True))
    small = flatten([big[i] for i in sorted(keep)])
    assert is_induced_subgraph(inversion_graph(small), inversion_graph(big))


def test_graph_dot():
    dot = inversion_graph((3, 1, 4, 2)).to_dot()
    assert dot.startswith("graph G {")
    assert "1 -- 2;" in dot and "3 -- 4;" in dot
