"""Intervals, simple permutations, inflation and the simple quotient."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from . import kernels
from .errors import InvalidInputError
from .perm import Perm, flatten, format_perm, parse_perm, perm, skew_components, sum_components


class Interval(NamedTuple):
    """1-based inclusive position bounds of an interval."""

    start: int
    end: int

    def __len__(self) -> int:  # type: ignore[override]
        return self.end - self.start + 1


def proper_intervals(p: Sequence[int]) -> list[Interval]:
    """All intervals of length 2..n-1, sorted by (start, end)."""
    n = len(p)
    out = []
    for a in range(n):
        lo = hi = p[a]
        for b in range(a + 1, n):
            lo = min(lo, p[b])
            hi = max(hi, p[b])
            if hi - lo == b - a and b - a + 1 < n:
                out.append(Interval(a + 1, b + 1))
    return out


def is_simple(p: Sequence[int]) -> bool:
    return not proper_intervals(p)


def inflate(quotient: Sequence[int], blocks: Sequence[Sequence[int]]) -> Perm:
    """The inflation ``quotient[blocks[0], ..., blocks[m-1]]``."""
    if len(blocks) != len(quotient):
        raise InvalidInputError(
            f"{len(blocks)} blocks given for a quotient of length {len(quotient)}"
        )
    if any(len(b) == 0 for b in blocks):
        raise InvalidInputError("inflation blocks must be nonempty")
    return kernels.inflate(tuple(quotient), [tuple(b) for b in blocks])


@dataclass(frozen=True)
class Decomposition:
    quotient: Perm
    blocks: tuple[Perm, ...]

    def inflate(self) -> Perm:
        return inflate(self.quotient, self.blocks)

    def to_json(self) -> dict:
        return {"quotient": list(self.quotient), "blocks": [list(b) for b in self.blocks]}

    @classmethod
    def from_json(cls, data) -> "Decomposition":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(perm(data["quotient"]), tuple(perm(b) for b in data["blocks"]))

    def to_text(self) -> str:
        lines = [format_perm(self.quotient)]
        lines += ["  " + format_perm(b) for b in self.blocks]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Decomposition":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        return cls(parse_perm(lines[0]), tuple(parse_perm(ln) for ln in lines[1:]))


def simple_quotient(p: Sequence[int]) -> Decomposition:
    """Decompose ``p`` as an inflation of its simple quotient.

    Quotients of length at least 4 come with their unique maximal proper
    intervals as blocks.  For sum (skew) decomposable input the quotient is
    ``12`` (``21``) with the first sum (skew) component as the first block and
    the remainder as the second.
    """
    p = tuple(p)
    n = len(p)
    if n == 0:
        raise InvalidInputError("the empty permutation has no simple quotient")
    if n == 1:
        return Decomposition((1,), (p,))
    comps = sum_components(p)
    if len(comps) > 1:
        first = comps[0]
        return Decomposition((1, 2), (first, flatten(p[len(first):])))
    comps = skew_components(p)
    if len(comps) > 1:
        first = comps[0]
        return Decomposition((2, 1), (first, flatten(p[len(first):])))

    # neither sum nor skew decomposable: maximal proper intervals partition p
    best = list(range(n))  # best[i] = right end (0-based) of the largest interval starting at i
    for a, b in ((iv.start - 1, iv.end - 1) for iv in proper_intervals(p)):
        best[a] = max(best[a], b)
    starts = []
    i = 0
    while i < n:
        starts.append((i, best[i]))
        i = best[i] + 1
    blocks = tuple(flatten(p[a:b + 1]) for a, b in starts)
    quotient = flatten([p[a] for a, _ in starts])
    return Decomposition(quotient, blocks)
