"""Permutations in one-line notation and the containment order.

A permutation is a plain ``tuple`` of the integers ``1..n``; positions in
occurrences are 1-based, matching the usual one-line notation.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import kernels
from .errors import InvalidInputError, ResourceLimitError

Perm = tuple[int, ...]

MAX_HOST_LENGTH = 64
MAX_PATTERNS_LENGTH = 20
MAX_GRAPH_VERTICES = 16


def perm(values: Iterable[int]) -> Perm:
    """Validate ``values`` as a permutation of ``1..n`` and return it as a tuple."""
    p = tuple(int(v) for v in values)
    if sorted(p) != list(range(1, len(p) + 1)):
        raise InvalidInputError(f"{p} is not a permutation of 1..{len(p)}")
    return p


def parse_perm(text: str) -> Perm:
    """Parse ``"3 1 4 2"`` (commas also accepted); an empty string is the empty permutation."""
    tokens = [t for t in re.split(r"[\s,]+", text.strip()) if t]
    try:
        return perm(int(t) for t in tokens)
    except ValueError as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(f"cannot parse permutation {text!r}") from exc


def format_perm(p: Sequence[int]) -> str:
    return " ".join(str(v) for v in p)


def sort_key(p: Sequence[int]):
    """Order by length, then lexicographically."""
    return (len(p), tuple(p))


def read_perm_file(path) -> list[Perm]:
    """Read one permutation per line; blank lines and ``#`` comments are skipped."""
    out = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse_perm(line))
    return out


def write_perm_file(path, perms: Iterable[Sequence[int]]) -> None:
    lines = [format_perm(p) for p in sorted({tuple(p) for p in perms}, key=sort_key)]
    Path(path).write_text("".join(line + "\n" for line in lines))


def flatten(word: Sequence[int]) -> Perm:
    """Return the permutation order-isomorphic to a word of distinct integers.

    >>> flatten((9, 1, 6, 7, 2))
    (5, 1, 3, 4, 2)
    """
    if len(set(word)) != len(word):
        raise InvalidInputError(f"word {tuple(word)} has repeated entries")
    return kernels.flatten(word)


def contains(host: Sequence[int], pattern: Sequence[int]) -> tuple[int, ...] | None:
    """Lexicographically least occurrence of ``pattern`` in ``host``, or ``None``.

    The occurrence is returned as 1-based positions into ``host``.
    """
    if len(host) > MAX_HOST_LENGTH:
        raise ResourceLimitError(
            f"host length {len(host)} exceeds the cap of {MAX_HOST_LENGTH}"
        )
    occ = kernels.find_occurrence(host, pattern)
    if occ is None:
        return None
    return tuple(i + 1 for i in occ)


def le(small: Sequence[int], big: Sequence[int]) -> bool:
    """``small <= big`` in the containment order."""
    if len(small) > len(big):
        return False
    return kernels.find_occurrence(big, small) is not None


def direct_sum(left: Sequence[int], right: Sequence[int]) -> Perm:
    s = len(left)
    return tuple(left) + tuple(v + s for v in right)


def skew_sum(left: Sequence[int], right: Sequence[int]) -> Perm:
    s = len(right)
    return tuple(v + s for v in left) + tuple(right)


def _split_points(p: Sequence[int], skew: bool = False) -> list[int]:
    cuts = []
    n = len(p)
    running = 0
    for j, v in enumerate(p, 1):
        running = max(running, n + 1 - v if skew else v)
        if running == j and j < n:
            cuts.append(j)
    return cuts


def sum_components(p: Sequence[int]) -> list[Perm]:
    """Split ``p`` into its sum-indecomposable components, left to right."""
    out = []
    prev = 0
    running = 0
    for j, v in enumerate(p, 1):
        if v > running:
            running = v
        if running == j:
            out.append(tuple([x - prev for x in p[prev:j]]))
            prev = j
    return out


def skew_components(p: Sequence[int]) -> list[Perm]:
    p = tuple(p)
    if not p:
        return []
    out = []
    prev = 0
    for cut in _split_points(p, skew=True) + [len(p)]:
        out.append(flatten(p[prev:cut]))
        prev = cut
    return out


def is_sum_indecomposable(p: Sequence[int]) -> bool:
    return len(p) > 0 and not _split_points(p)


def permutations_of_length(n: int):
    """All permutations of length ``n`` in lexicographic order."""
    return itertools.permutations(range(1, n + 1))


@dataclass(frozen=True)
class InversionGraph:
    n: int
    edges: frozenset[tuple[int, int]]

    def neighbours(self) -> dict[int, set[int]]:
        adj = {v: set() for v in range(1, self.n + 1)}
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def degrees(self) -> list[int]:
        adj = self.neighbours()
        return [len(adj[v]) for v in range(1, self.n + 1)]

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        adj = self.neighbours()
        seen = {1}
        stack = [1]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    def is_path(self) -> bool:
        if self.n == 1:
            return not self.edges
        degs = self.degrees()
        return (
            self.is_connected()
            and len(self.edges) == self.n - 1
            and max(degs) <= 2
        )

    def to_dot(self, name: str = "G") -> str:
        lines = [f"graph {name} {{"]
        lines += [f"  {v};" for v in range(1, self.n + 1)]
        lines += [f"  {i} -- {j};" for i, j in sorted(self.edges)]
        lines.append("}")
        return "\n".join(lines) + "\n"


def inversion_graph(p: Sequence[int]) -> InversionGraph:
    n = len(p)
    edges = frozenset(
        (i + 1, j + 1) for i in range(n) for j in range(i + 1, n) if p[i] > p[j]
    )
    return InversionGraph(n, edges)


def is_induced_subgraph(
    small: InversionGraph, big: InversionGraph, limit: int = MAX_GRAPH_VERTICES
) -> bool:
    """Is ``small`` isomorphic to an induced subgraph of ``big``?

    Exhaustive backtracking over injective vertex maps, pruned by degree and by
    checking edges and non-edges against every vertex mapped so far.
    """
    if big.n > limit or small.n > limit:
        raise ResourceLimitError(
            f"induced subgraph search is capped at {limit} vertices"
        )
    if small.n > big.n:
        return False
    sa = small.neighbours()
    ba = big.neighbours()
    # map high-degree vertices first: they constrain the search most
    order = sorted(range(1, small.n + 1), key=lambda v: -len(sa[v]))
    image: dict[int, int] = {}
    used: set[int] = set()

    def extend(t: int) -> bool:
        if t == len(order):
            return True
        v = order[t]
        for w in range(1, big.n + 1):
            if w in used or len(ba[w]) < len(sa[v]):
                continue
            if all((u in sa[v]) == (image[u] in ba[w]) for u in order[:t]):
                image[v] = w
                used.add(w)
                if extend(t + 1):
                    return True
                used.discard(w)
        return False

    return extend(0)


def patterns(
    p: Sequence[int], length: int | None = None, limit: int = MAX_PATTERNS_LENGTH
) -> set[Perm]:
    """All nonempty patterns of ``p`` (or only those of a given ``length``).

    Computed by repeated one-point deletion with each flattened result visited
    once.
    """
    p = tuple(p)
    if len(p) > limit:
        raise ResourceLimitError(f"pattern enumeration is capped at length {limit}")
    if not p:
        return set()
    stop = 1 if length is None else max(length, 1)
    layer = {bytes(p)}
    found = set(layer) if length is None or length == len(p) else set()
    for n in range(len(p), stop, -1):
        nxt = set()
        for q in layer:
            nxt |= kernels.deletions(q)
        layer = nxt
        if length is None or n - 1 == length:
            found |= layer
    if length is not None and length > len(p):
        return set()
    return {tuple(q) for q in found}


def all_le_pairs(perms: Sequence[Sequence[int]]):
    """Yield every ordered pair ``(a, b)`` of distinct list entries with ``a <= b``."""
    for i, a in enumerate(perms):
        for j, b in enumerate(perms):
            if i != j and le(a, b):
                yield a, b
