"""The increasing oscillating sequence 4,1,6,3,8,5,... and its patterns."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import kernels
from .errors import InvalidInputError
from .perm import Perm, flatten, is_sum_indecomposable

SHRINKS = "shrinks-to-oscillation"
DECOMPOSES = "decomposes"
OTHER = "other"


def oscillating_prefix(length: int) -> tuple[int, ...]:
    """First ``length`` terms: odd positions hold 2k+2, even positions 2k-1."""
    if length < 1:
        raise InvalidInputError("prefix length must be at least 1")
    out = []
    k = 1
    while len(out) < length:
        out += [2 * k + 2, 2 * k - 1]
        k += 1
    return tuple(out[:length])


@lru_cache(maxsize=None)
def sigma(m: int) -> Perm:
    """The oscillation sigma_m (m >= 4).

    Even m: the first m terms of the sequence; odd m: its m least values, in
    sequence order.  Both flattened.
    """
    if m < 4:
        raise InvalidInputError(f"sigma_m is defined for m >= 4, got {m}")
    if m % 2 == 0:
        return flatten(oscillating_prefix(m))
    # the m least values all occur among the first m + 3 terms
    seq = oscillating_prefix(m + 3)
    keep = set(sorted(seq)[:m])
    return flatten([v for v in seq if v in keep])


def endpoints(m: int) -> tuple[int, int]:
    """1-based positions of the two entries of sigma_m inflated by the long pattern.

    The first is the least entry; the second is the greatest entry for even
    ``m`` and the rightmost entry for odd ``m``.
    """
    s = sigma(m)
    least = s.index(1) + 1
    other = s.index(m) + 1 if m % 2 == 0 else m
    return least, other


@dataclass(frozen=True)
class OscillationFamily:
    m: int
    variants: tuple[Perm, ...]

    def __contains__(self, p) -> bool:
        return tuple(p) in self.variants

    def __len__(self) -> int:
        return len(self.variants)


def _indecomposable_patterns(word: tuple[int, ...], m: int) -> set[Perm]:
    # every connected induced subgraph of a connected graph extends by one
    # vertex, so the sum-indecomposable patterns of each length all arise by
    # deleting single entries from sum-indecomposable patterns one longer
    top = flatten(word)
    if m > len(top):
        return set()
    layer = {bytes(top)} if is_sum_indecomposable(top) else set()
    for _ in range(len(top) - m):
        nxt = set()
        for q in layer:
            nxt |= {c for c in kernels.deletions(q) if is_sum_indecomposable(c)}
        layer = nxt
    return {tuple(q) for q in layer}


@lru_cache(maxsize=None)
def increasing_oscillations(m: int, prefix_length: int | None = None) -> OscillationFamily:
    """Sum-indecomposable length-``m`` patterns of the oscillating sequence.

    The sequence is truncated to ``prefix_length`` terms (default ``2m + 4``).
    """
    if m < 1:
        raise InvalidInputError("oscillation length must be at least 1")
    if prefix_length is None:
        prefix_length = 2 * m + 4
    found = _indecomposable_patterns(oscillating_prefix(prefix_length), m)
    return OscillationFamily(m, tuple(sorted(found)))


def is_increasing_oscillation(p) -> bool:
    p = tuple(p)
    return len(p) >= 1 and p in increasing_oscillations(len(p))


def deletion_classify(osc) -> list[str]:
    """Tag each entry by what deleting it leaves behind.

    ``SHRINKS`` when the remainder is a shorter increasing oscillation and
    ``DECOMPOSES`` when it is sum decomposable; ``OTHER`` would flag an entry
    fitting neither description.
    """
    osc = tuple(osc)
    if len(osc) < 2:
        raise InvalidInputError("need an oscillation of length at least 2")
    if not is_increasing_oscillation(osc):
        raise InvalidInputError(f"{osc} is not an increasing oscillation")
    tags = []
    for i in range(len(osc)):
        rest = flatten(osc[:i] + osc[i + 1:])
        if is_increasing_oscillation(rest):
            tags.append(SHRINKS)
        elif not is_sum_indecomposable(rest):
            tags.append(DECOMPOSES)
        else:
            tags.append(OTHER)
    return tags
