import networkx as nx
import pytest

from permchain.errors import InvalidInputError
from permchain.oscillation import (
    DECOMPOSES,
    OTHER,
    SHRINKS,
    deletion_classify,
    endpoints,
    increasing_oscillations,
    is_increasing_oscillation,
    oscillating_prefix,
    sigma,
)
from permchain.perm import inversion_graph, is_sum_indecomposable, permutations_of_length


def test_prefix():
    assert oscillating_prefix(8) == (4, 1, 6, 3, 8, 5, 10, 7)


def test_sigma_small():
    assert sigma(4) == (3, 1, 4, 2)
    assert sigma(5) == (3, 1, 5, 2, 4)
    assert sigma(6) == (3, 1, 5, 2, 6, 4)
    with pytest.raises(InvalidInputError):
        sigma(3)


@pytest.mark.parametrize("m", range(4, 15))
def test_sigma_is_a_path(m):
    g = inversion_graph(sigma(m))
    ref = nx.Graph(list(g.edges))
    ref.add_nodes_from(range(1, m + 1))
    assert g.is_path()
    assert nx.is_connected(ref) and ref.number_of_edges() == m - 1
    degs = dict(ref.degree())
    leaves = sorted(v for v, d in degs.items() if d == 1)
    assert leaves == sorted(endpoints(m))


def test_family_sizes():
    # coefficients of (x + x^3)/(1 - x): 1, 1, 2, 2, 2, ...
    sizes = [len(increasing_oscillations(m)) for m in range(1, 13)]
    assert sizes == [1, 1, 2] + [2] * 9


@pytest.mark.parametrize("m", range(1, 8))
def test_family_against_graph_oracle(m):
    # increasing oscillations are exactly the permutations whose inversion graph is a path
    expected = {p for p in permutations_of_length(m) if inversion_graph(p).is_path()}
    assert set(increasing_oscillations(m).variants) == expected


@pytest.mark.parametrize("m", range(2, 13))
def test_deletion_classification_total(m):
    for osc in increasing_oscillations(m).variants:
        tags = deletion_classify(osc)
        assert len(tags) == m
        assert OTHER not in tags
        assert set(tags) <= {SHRINKS, DECOMPOSES}


def test_classify_rejects():
    with pytest.raises(InvalidInputError):
        deletion_classify((1,))
    with pytest.raises(InvalidInputError):
        deletion_classify((1, 2, 3))
    assert is_increasing_oscillation((2, 1))
    assert is_sum_indecomposable(sigma(9))


@pytest.mark.parametrize("m", range(1, 13))
def test_prefix_bound_is_stable(m):
    assert increasing_oscillations(m).variants == increasing_oscillations(m, 2 * m + 8).variants
