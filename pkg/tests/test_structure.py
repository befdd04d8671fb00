import itertools

import pytest
from hypothesis import given

from conftest import perms
from permchain.errors import InvalidInputError
from permchain.perm import permutations_of_length
from permchain.structure import Decomposition, inflate, is_simple, proper_intervals, simple_quotient


def naive_intervals(p):
    n = len(p)
    out = []
    for a in range(n):
        for b in range(a + 1, n):
            if b - a + 1 < n:
                vals = p[a:b + 1]
                if max(vals) - min(vals) == b - a:
                    out.append((a + 1, b + 1))
    return out


@given(perms(1, 9))
def test_intervals_match_naive(p):
    assert sorted((iv.start, iv.end) for iv in proper_intervals(p)) == naive_intervals(p)


def test_simple_counts():
    # 1, 2, 0, 2, 6, 46, 338 simple permutations of lengths 1..7
    counts = [sum(is_simple(p) for p in permutations_of_length(n)) for n in range(1, 8)]
    assert counts == [1, 2, 0, 2, 6, 46, 338]


def test_inflate_example():
    assert inflate((2, 4, 1, 3), [(1,), (2, 1), (1, 2), (1,)]) == (3, 6, 5, 1, 2, 4)
    with pytest.raises(InvalidInputError):
        inflate((1, 2), [(1,)])


@pytest.mark.parametrize("n", range(1, 8))
def test_round_trip_exhaustive(n):
    for p in permutations_of_length(n):
        d = simple_quotient(p)
        assert d.inflate() == p
        assert is_simple(d.quotient) or d.quotient in ((1,), (1, 2), (2, 1))


@given(perms(1, 9))
def test_decomposition_serialisation(p):
    d = simple_quotient(p)
    assert Decomposition.from_json(d.to_json()) == d
    assert Decomposition.from_text(d.to_text()) == d


def test_simple_quotient_blocks_are_maximal():
    d = simple_quotient((2, 4, 1, 3))
    assert d.quotient == (2, 4, 1, 3) and all(b == (1,) for b in d.blocks)
    d = simple_quotient((3, 6, 5, 1, 2, 4))
    assert d.quotient == (2, 4, 1, 3)
    assert d.blocks == ((1,), (2, 1), (1, 2), (1,))
