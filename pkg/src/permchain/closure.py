"""Downward closures: brute force, the sum-decomposition grammar, reconciliation.

Closure tables hold permutations packed as ``bytes`` (one byte per entry) in
per-length sets; that keeps the millions of members at length 14 in memory.
"""
from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from . import kernels
from .antichain import AntichainSpec
from .errors import InvalidInputError, ResourceLimitError
from .genfun import RationalGF, Series, fit_rational, gf_closure_paper, series_expand
from .oscillation import endpoints, increasing_oscillations, sigma
from .perm import Perm, flatten, format_perm, parse_perm, sum_components
from .structure import inflate, simple_quotient

log = logging.getLogger(__name__)

MAX_TABLE_ENTRIES = 60_000_000

BRUTE = "pattern-of-element"
SEED = "pattern-of-seed"
C1 = "C1"
C2 = "C2"


def default_cutoff(n_max: int) -> int:
    return 3 * n_max + 12


class ClosureTable:
    """Per-length sets of packed permutations plus where they came from."""

    def __init__(self, layers: dict[int, set], n_max: int, provenance: str,
                 cutoff: int | None = None, tagged: dict[int, set] | None = None,
                 tag: str | None = None):
        self.layers = {n: layers.get(n, set()) for n in range(1, n_max + 1)}
        self.n_max = n_max
        self.provenance = provenance
        self.cutoff = cutoff
        # members of ``tagged`` carry ``tag`` instead of the table provenance
        self._tagged = tagged or {}
        self._tag = tag

    def counts(self) -> list[int]:
        return [len(self.layers[n]) for n in range(1, self.n_max + 1)]

    def series(self) -> Series:
        return Series(tuple(self.counts()))

    def __len__(self):
        return sum(self.counts())

    def __contains__(self, p) -> bool:
        p = tuple(p)
        return 1 <= len(p) <= self.n_max and bytes(p) in self.layers[len(p)]

    def members(self, n: int) -> list[Perm]:
        return sorted(tuple(b) for b in self.layers.get(n, ()))

    def provenance_of(self, p) -> str | None:
        p = tuple(p)
        if p not in self:
            return None
        if bytes(p) in self._tagged.get(len(p), ()):
            return self._tag
        return self.provenance

    def first_unclosed(self, lengths: Iterable[int] | None = None):
        """A member with a one-point deletion missing from the table, or None."""
        for n in lengths if lengths is not None else range(2, self.n_max + 1):
            hit = kernels.first_unclosed(self.layers[n], (self.layers[n - 1],), set())
            if hit is not None:
                return tuple(hit[0]), tuple(hit[1])
        return None

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for n in range(1, self.n_max + 1):
            for b in sorted(self.layers[n]):
                h.update(bytes([len(b)]) + b)
        return h.hexdigest()[:16]

    def save(self, directory) -> Path:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        for n in range(1, self.n_max + 1):
            lines = [format_perm(p) + "\n" for p in self.members(n)]
            (d / f"len_{n:02d}.txt").write_text("".join(lines))
        meta = {
            "n_max": self.n_max,
            "cutoff": self.cutoff,
            "provenance": self.provenance,
            "counts": self.counts(),
        }
        (d / "meta.json").write_text(json.dumps(meta, indent=1) + "\n")
        return d

    @classmethod
    def load(cls, directory) -> "ClosureTable":
        d = Path(directory)
        meta = json.loads((d / "meta.json").read_text())
        layers = {}
        for n in range(1, meta["n_max"] + 1):
            text = (d / f"len_{n:02d}.txt").read_text()
            layers[n] = {bytes(parse_perm(ln)) for ln in text.splitlines() if ln.strip()}
        table = cls(layers, meta["n_max"], meta["provenance"], meta["cutoff"])
        if table.counts() != meta["counts"]:
            raise InvalidInputError(f"cached table in {d} is inconsistent with its metadata")
        return table


def cache_key(spec: AntichainSpec, n_max: int, cutoff: int, kind: str = "brute") -> str:
    blob = f"{spec.fingerprint()}:{n_max}:{cutoff}:{kind}"
    return hashlib.sha256(blob.encode()).hexdigest()[:20]


def _check_budget(total: int, n: int):
    if total > MAX_TABLE_ENTRIES:
        raise ResourceLimitError(
            f"closure table exceeds {MAX_TABLE_ENTRIES} entries while filling length {n}"
        )


def _downset_layers(seed: Iterable[Sequence[int]], n_max: int) -> dict[int, set]:
    by_len: dict[int, set] = {}
    for p in seed:
        if len(p):
            by_len.setdefault(len(p), set()).add(bytes(tuple(p)))
    if not by_len:
        return {}
    top = max(by_len)
    layers: dict[int, set] = {}
    cur: set = set()
    total = 0
    for L in range(top, 0, -1):
        cur |= by_len.get(L, set())
        if L <= n_max:
            layers[L] = cur
            total += len(cur)
            _check_budget(total, L)
        if L > 1:
            nxt = set()
            for q in cur:
                nxt |= kernels.deletions(q)
            cur = nxt
    return layers


def downset(seed: Iterable[Sequence[int]], n_max: int) -> ClosureTable:
    """All patterns of the seed permutations with length 1..n_max."""
    return ClosureTable(_downset_layers(seed, n_max), n_max, SEED)


# --- brute force -----------------------------------------------------------

def marked_sigma(m: int) -> bytes:
    """sigma_m packed, with the two inflated endpoints flagged by the mark bit."""
    ends = set(endpoints(m))
    return bytes(v | (kernels.MARK if i in ends else 0) for i, v in enumerate(sigma(m), 1))


@lru_cache(maxsize=3)
def marked_layers(m_max: int, n_max: int) -> dict[int, dict[bytes, int]]:
    """Marked patterns of sigma_4..sigma_{m_max}, by length up to n_max.

    Each pattern maps to the least m whose sigma_m contains it.
    """
    out: dict[int, dict[bytes, int]] = {}
    layer: dict[bytes, int] = {}
    for j in range(m_max, 0, -1):
        if j >= 4:
            s = marked_sigma(j)
            if j < layer.get(s, j + 1):
                layer[s] = j
        if j <= n_max:
            out[j] = layer
        if j > 1:
            nxt: dict[bytes, int] = {}
            kernels.marked_children(layer, nxt)
            layer = nxt
    return out


def _fill_costs(spec: AntichainSpec) -> list[tuple[bytes, int]]:
    """Nonempty patterns of A with their extra cost over the shortest fill."""
    base = spec.min_fill
    cost: dict[bytes, int] = {}
    for a in spec.A:
        for layer in _downset_layers([a], len(a)).values():
            for g in layer:
                c = len(a) - base
                if c < cost.get(g, c + 1):
                    cost[g] = c
    return sorted(cost.items(), key=lambda t: (len(t[0]), t[0]))


def _end_blocks(spec: AntichainSpec) -> list[bytes]:
    layers = _downset_layers([spec.alpha], len(spec.alpha))
    return sorted((g for L in layers.values() for g in L), key=lambda b: (len(b), b))


def max_sigma_length(spec: AntichainSpec, cutoff: int) -> int:
    """Largest m whose shortest element still has length <= cutoff."""
    la = len(spec.alpha)
    if cutoff < 2 * la + 2 * spec.min_fill:
        return 3
    return (cutoff - 2 * la) // spec.min_fill + 2


def brute_closure_layers(spec: AntichainSpec, n_max: int, cutoff: int) -> tuple[dict[int, set], int]:
    """Patterns of every element of length <= cutoff, by length up to n_max.

    A pattern of sigma_m[alpha, f_1, ..., f_{m-2}, alpha] is a marked pattern
    rho of sigma_m inflated by patterns of the corresponding blocks.  Giving
    each fill pattern the extra length its cheapest host in A needs turns the
    cutoff into a budget per rho, so no element is ever built.
    """
    m_max = max_sigma_length(spec, cutoff)
    outs = [set() for _ in range(n_max + 1)]
    if m_max < 4:
        return {n: outs[n] for n in range(1, n_max + 1)}, 0
    layers = marked_layers(m_max, n_max)
    fills = _fill_costs(spec)
    ends = _end_blocks(spec)
    la = len(spec.alpha)
    emitted = 0
    for j in range(1, n_max + 1):
        for count, (rho, m) in enumerate(layers.get(j, {}).items()):
            budget = cutoff - 2 * la - (m - 2) * spec.min_fill
            emitted += kernels.inflate_marked(rho, fills, ends, budget, n_max, outs)
            if count % 4096 == 0:
                _check_budget(sum(len(s) for s in outs), j)
    return {n: outs[n] for n in range(1, n_max + 1)}, emitted


@dataclass
class ClosureCounts:
    series: Series
    table: ClosureTable
    cutoff: int
    stable: bool | None
    recheck: Series | None = None
    emitted: int = 0

    def to_json(self) -> dict:
        return {
            "cutoff": self.cutoff,
            "counts": list(self.series.coeffs),
            "stable": self.stable,
            "recheck_cutoff": self.cutoff + 4 if self.recheck is not None else None,
            "recheck_counts": list(self.recheck.coeffs) if self.recheck is not None else None,
        }


def closure_counts(spec: AntichainSpec, n_max: int, cutoff: int | None = None,
                   recheck: bool = True, cache_dir=None) -> ClosureCounts:
    """Brute-force sizes of the closure of U_{A,alpha} up to n_max.

    ``stable`` records whether a recomputation at cutoff + 4 gives the same
    counts (None when the recheck is skipped).
    """
    if cutoff is None:
        cutoff = default_cutoff(n_max)
    if cutoff < n_max:
        raise InvalidInputError("cutoff must be at least n_max")
    table = None
    stable = None
    recheck_series = None
    cached = Path(cache_dir) / cache_key(spec, n_max, cutoff) if cache_dir else None
    if cached is not None and (cached / "meta.json").exists():
        table = ClosureTable.load(cached)
        meta = json.loads((cached / "meta.json").read_text())
        stable = meta.get("stable")
        if meta.get("recheck_counts"):
            recheck_series = Series(tuple(meta["recheck_counts"]))
    emitted = 0
    if table is None:
        layers, emitted = brute_closure_layers(spec, n_max, cutoff)
        table = ClosureTable(layers, n_max, BRUTE, cutoff)
    if recheck and stable is None:
        again, _ = brute_closure_layers(spec, n_max, cutoff + 4)
        recheck_series = Series(tuple(len(again[n]) for n in range(1, n_max + 1)))
        del again
        stable = recheck_series == table.series()
    if cached is not None and not (cached / "meta.json").exists():
        table.save(cached)
        meta = json.loads((cached / "meta.json").read_text())
        meta["stable"] = stable
        meta["recheck_counts"] = list(recheck_series.coeffs) if recheck_series else None
        meta["spec"] = spec.to_json()
        (cached / "meta.json").write_text(json.dumps(meta, indent=1) + "\n")
    return ClosureCounts(table.series(), table, cutoff, stable, recheck_series, emitted)


@lru_cache(maxsize=4)
def _layer_at(spec: AntichainSpec, n: int, cutoff: int) -> frozenset:
    layers, _ = brute_closure_layers(spec, n, cutoff)
    return frozenset(layers[n])


def in_closure(pi: Sequence[int], spec: AntichainSpec, cutoff: int | None = None) -> bool:
    """Is ``pi`` contained in some element of length <= cutoff?

    The answer is relative to the cutoff (default 3|pi| + 12).
    """
    pi = tuple(pi)
    if not pi:
        return True
    if cutoff is None:
        cutoff = default_cutoff(len(pi))
    if len(pi) > cutoff:
        raise InvalidInputError("pi is longer than the cutoff")
    return bytes(pi) in _layer_at(spec, len(pi), cutoff)


# --- grammar ---------------------------------------------------------------

@lru_cache(maxsize=None)
def path_order(m: int) -> tuple[int, ...]:
    """1-based positions of sigma_m along its inversion-graph path, least endpoint first."""
    s = sigma(m)
    adj = {i: [] for i in range(1, m + 1)}
    for i in range(m):
        for j in range(i + 1, m):
            if s[i] > s[j]:
                adj[i + 1].append(j + 1)
                adj[j + 1].append(i + 1)
    start, other = endpoints(m)
    order = [start]
    prev = None
    while len(order) < m:
        nxt = [w for w in adj[order[-1]] if w != prev]
        if len(nxt) != 1:
            raise AssertionError(f"inversion graph of sigma_{m} is not a path")
        prev = order[-1]
        order.append(nxt[0])
    if order[-1] != other:
        raise AssertionError(f"sigma_{m} path does not end at the second endpoint")
    return tuple(order)


@lru_cache(maxsize=None)
def run_pattern(m: int, start: int, length: int) -> tuple[Perm, tuple[int, ...]]:
    """Pattern of the path run [start, start+length) of sigma_m and its positions."""
    s = sigma(m)
    pos = tuple(sorted(path_order(m)[start:start + length]))
    return flatten([s[p - 1] for p in pos]), pos


@lru_cache(maxsize=None)
def admissible_ends(max_len: int) -> tuple[frozenset, frozenset]:
    """Oscillation shapes that may carry alpha on one entry at an end of the path.

    Returns ``(beginnings, endings)`` as sets of ``(P, d)``: ``P[d]`` (0-based)
    is the entry sitting on the least endpoint (beginnings) or on the
    greatest/rightmost endpoint (endings) of some sigma_M, with the run not
    reaching the opposite endpoint.
    """
    begins, ends = set(), set()
    for L in range(1, max_len + 1):
        for M in range(max(4, L + 1), L + 7):
            order = path_order(M)
            P, pos = run_pattern(M, 0, L)
            begins.add((P, pos.index(order[0])))
            P, pos = run_pattern(M, M - L, L)
            ends.add((P, pos.index(order[-1])))
    return frozenset(begins), frozenset(ends)


def _conv(a: list[int], b: list[int], n_max: int) -> list[int]:
    out = [0] * (n_max + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(0, n_max + 1 - i):
                if j < len(b) and b[j]:
                    out[i + j] += x * b[j]
    return out


def _sum_layers(left: dict[int, set], right: dict[int, set], n_max: int) -> dict[int, set]:
    out = {n: set() for n in range(0, n_max + 1)}
    for i, L in left.items():
        for j, R in right.items():
            if i + j <= n_max and L and R:
                kernels.sum_into(L, R, out[i + j])
    return out


@dataclass
class GrammarResult:
    table: ClosureTable
    raw: Series
    parts: dict = field(default_factory=dict)

    @property
    def distinct(self) -> Series:
        return self.table.series()


class Grammar:
    """The C1 / beginning-middle-ending grammar for one A_tau spec.

    ``acl`` is the closure of A_tau, the only blocks allowed besides alpha.
    """

    def __init__(self, spec: AntichainSpec, n_max: int):
        if spec.tau is None:
            raise InvalidInputError("the grammar needs a spec built from A_tau")
        self.spec = spec
        self.n_max = n_max
        self.alpha = spec.alpha
        self.acl_layers = _downset_layers(spec.A, max(len(a) for a in spec.A))
        self.acl = {tuple(b) for L in self.acl_layers.values() for b in L}
        self.begins, self.ends = admissible_ends(max(n_max, 2))
        self._ways: dict = {}
        self._alpha_span = len(sum_components(self.alpha))
        # cheapest host in A for every closure member, used for certificates
        self.host = {}
        for a in sorted(spec.A, key=len):
            for L in _downset_layers([a], len(a)).values():
                for g in L:
                    self.host.setdefault(tuple(g), a)

    # generation -----------------------------------------------------------

    def _inflations(self, P: Perm, special: int | None, n_max: int) -> dict[int, set]:
        """P with alpha at index ``special`` (if any) and closure members elsewhere."""
        rho = bytes(v | (kernels.MARK if i == special else 0) for i, v in enumerate(P))
        fills = [(b, 0) for L in sorted(self.acl_layers) for b in sorted(self.acl_layers[L])]
        outs = [set() for _ in range(n_max + 1)]
        kernels.inflate_marked(rho, fills, [bytes(self.alpha)], 0, n_max, outs)
        return {n: outs[n] for n in range(n_max + 1) if outs[n]}

    def generate(self) -> GrammarResult:
        n_max = self.n_max
        la = len(self.alpha)

        c1: dict[int, set] = {n: set() for n in range(n_max + 1)}
        M = 4
        while 2 * la + (M - 2) <= n_max:
            s = sigma(M)
            e1, e2 = endpoints(M)
            rho = bytes(v | (kernels.MARK if i in (e1, e2) else 0) for i, v in enumerate(s, 1))
            fills = [(b, 0) for L in sorted(self.acl_layers) for b in sorted(self.acl_layers[L])]
            outs = [set() for _ in range(n_max + 1)]
            kernels.inflate_marked(rho, fills, [bytes(self.alpha)], 0, n_max, outs)
            for n in range(n_max + 1):
                c1[n] |= outs[n]
            M += 1

        # middles: sums of sum-indecomposable oscillation inflations
        pieces: dict[int, set] = {n: set() for n in range(n_max + 1)}
        for L in range(1, n_max + 1):
            for P in increasing_oscillations(L).variants:
                for n, got in self._inflations(P, None, n_max).items():
                    if L == 1:
                        got = {g for g in got if len(sum_components(g)) == 1}
                    pieces[n] |= got
        sums: dict[int, set] = {0: {b""}}
        for n in range(1, n_max + 1):
            acc = set()
            for j in range(1, n + 1):
                if pieces[j] and sums.get(n - j):
                    kernels.sum_into(pieces[j], sums[n - j], acc)
            sums[n] = acc

        begin: dict[int, set] = {0: {b""}}
        end: dict[int, set] = {0: {b""}}
        for (P, d) in self.begins:
            if len(P) + la - 1 <= n_max:
                for n, got in self._inflations(P, d, n_max).items():
                    begin.setdefault(n, set()).update(got)
        for (P, d) in self.ends:
            if len(P) + la - 1 <= n_max:
                for n, got in self._inflations(P, d, n_max).items():
                    end.setdefault(n, set()).update(got)

        head = _sum_layers(begin, sums, n_max)
        del sums
        c2 = _sum_layers(head, end, n_max)
        del head

        layers = {n: c1[n] | c2[n] for n in range(1, n_max + 1)}
        c1_tagged = {n: c1[n] for n in range(1, n_max + 1) if c1[n]}
        table = ClosureTable(layers, n_max, C2, tagged=c1_tagged, tag=C1)
        parts = {
            "c1": [len(c1[n]) for n in range(1, n_max + 1)],
            "beginnings": [len(begin.get(n, ())) for n in range(1, n_max + 1)],
            "endings": [len(end.get(n, ())) for n in range(1, n_max + 1)],
            "middle_pieces": [len(pieces[n]) for n in range(1, n_max + 1)],
        }
        return GrammarResult(table, self.raw_counts(), parts)

    def raw_counts(self) -> Series:
        """Number of derivations per length, duplicates included."""
        n_max = self.n_max
        k = self.spec.k
        a = [0] * (n_max + 1)
        for L, layer in self.acl_layers.items():
            if L <= n_max:
                a[L] = len(layer)
        apow = [[1] + [0] * n_max]
        for _ in range(n_max):
            apow.append(_conv(apow[-1], a, n_max))

        def xshift(poly, s):
            return ([0] * s + poly)[: n_max + 1]

        c1 = [0] * (n_max + 1)
        for M in range(4, n_max + 1):
            t = xshift(apow[M - 2], 2 * k + 2)
            c1 = [x + y for x, y in zip(c1, t)]
        osc = [0] * (n_max + 1)
        for L in range(1, n_max + 1):
            cnt = len(increasing_oscillations(L).variants)
            osc = [x + cnt * y for x, y in zip(osc, apow[L])]
        # 1 / (1 - osc)
        star = [1] + [0] * n_max
        for n in range(1, n_max + 1):
            star[n] = sum(osc[j] * star[n - j] for j in range(1, n + 1))
        beg = [1] + [0] * n_max
        for (P, _) in self.begins:
            t = xshift(apow[len(P) - 1], k + 1)
            beg = [x + y for x, y in zip(beg, t)]
        end = [1] + [0] * n_max
        for (P, _) in self.ends:
            t = xshift(apow[len(P) - 1], k + 1)
            end = [x + y for x, y in zip(end, t)]
        c2 = _conv(_conv(beg, star, n_max), end, n_max)
        c2[0] -= 1
        return Series(tuple(c1[n] + c2[n] for n in range(1, n_max + 1)))

    # derivations ----------------------------------------------------------

    @lru_cache(maxsize=200_000)
    def oscillation_inflations(self, c: Perm) -> tuple:
        """Every way to write ``c`` as P[blocks] with P an increasing oscillation."""
        out = [((1,), (c,))]
        n = len(c)
        if n < 2 or len(sum_components(c)) > 1:
            return tuple(out)
        dec = simple_quotient(c)
        q = dec.quotient
        if len(q) >= 4:
            if q in increasing_oscillations(len(q)):
                out.append((q, dec.blocks))
            return tuple(out)
        if q != (2, 1):
            return tuple(out)
        for L in (2, 3):
            for P in increasing_oscillations(L).variants:
                for cuts in _compositions(n, L):
                    blocks = tuple(flatten(c[a:b]) for a, b in cuts)
                    if inflate(P, blocks) == c:
                        out.append((P, blocks))
        return tuple(out)

    def piece_ways(self, c: Perm, kind: str) -> list:
        """Derivations of ``c`` as a beginning, middle piece or ending."""
        key = (c, kind)
        hit = self._ways.get(key)
        if hit is not None:
            return hit
        alpha = self.alpha
        out = []
        for P, blocks in self.oscillation_inflations(c):
            if kind == "mid":
                if all(b in self.acl for b in blocks):
                    out.append((kind, P, None, blocks))
                continue
            shapes = self.begins if kind == "beg" else self.ends
            for d, b in enumerate(blocks):
                if b == alpha and (P, d) in shapes and all(
                    x in self.acl for i, x in enumerate(blocks) if i != d
                ):
                    out.append((kind, P, d, blocks))
        if len(self._ways) < 500_000:
            self._ways[key] = out
        return out

    def c1_derivation(self, pi: Perm):
        if len(pi) < 2 * len(self.alpha) + 2:
            return None
        dec = simple_quotient(pi)
        M = len(dec.quotient)
        if M < 4 or dec.quotient != sigma(M):
            return None
        e = endpoints(M)
        for i, b in enumerate(dec.blocks, 1):
            if i in e:
                if b != self.alpha:
                    return None
            elif b not in self.acl:
                return None
        return ("c1", dec.quotient, None, dec.blocks)

    def _split(self, pi: Perm):
        comps = sum_components(pi)
        offs = [0]
        for c in comps:
            offs.append(offs[-1] + len(c))
        return comps, offs

    def derivation(self, pi: Sequence[int]):
        """One derivation of ``pi`` as a list of pieces, or None.

        A middle made of several components can always be split into one
        piece per component (the closure of A_tau is downward closed), and a
        beginning or ending spans one component unless it is alpha itself, so
        only a few splits need trying.
        """
        pi = tuple(pi)
        comps, offs = self._split(pi)
        r = len(comps)
        span = self._alpha_span
        heads = sorted({i for i in (0, 1, span) if i <= r})
        for i in heads:
            beg = [] if i == 0 else self.piece_ways(pi[:offs[i]], "beg")
            if i and not beg:
                continue
            for j in sorted({j for j in (r, r - 1, r - span) if i <= j <= r}, reverse=True):
                o = offs[j]
                end = [] if j == r else self.piece_ways(tuple(v - o for v in pi[o:]), "end")
                if j < r and not end:
                    continue
                mids = []
                for c in comps[i:j]:
                    w = self.piece_ways(c, "mid")
                    if not w:
                        break
                    mids.append(w[0])
                else:
                    return beg[:1] + mids + end[:1]
        d = self.c1_derivation(pi)
        return [d] if d is not None else None

    def multiplicity(self, pi: Sequence[int]) -> int:
        """How many times the grammar derives ``pi``."""
        pi = tuple(pi)
        comps, offs = self._split(pi)
        r = len(comps)

        def group(i, j):
            return flatten(pi[offs[i]:offs[j]])

        def mid_ways(i, j):
            ways = {i: 1}
            for t in range(i + 1, j + 1):
                ways[t] = sum(
                    ways[s] * len(self.piece_ways(group(s, t), "mid"))
                    for s in range(i, t) if ways[s]
                )
            return ways[j]

        total = int(self.c1_derivation(pi) is not None)
        for i in range(0, r + 1):
            nb = 1 if i == 0 else len(self.piece_ways(group(0, i), "beg"))
            if not nb:
                continue
            for j in range(i, r + 1):
                ne = 1 if j == r else len(self.piece_ways(group(j, r), "end"))
                if ne:
                    total += nb * mid_ways(i, j) * ne
        return total

    # certificates ---------------------------------------------------------

    @lru_cache(maxsize=100_000)
    def _placement(self, shape: tuple):
        """Choose sigma_M and a path run for each piece of ``shape``."""
        if shape[0][0] == "c1":
            M = len(shape[0][1])
            return M, (0,)
        need = sum(len(P) for _, P, _ in shape) + len(shape) + 1
        for M in range(max(4, need), need + 12):
            starts = self._place(shape, M, 0, 0, ())
            if starts is not None:
                return M, starts
        return None

    def _place(self, shape, M, t, lo, acc):
        if t == len(shape):
            return acc
        kind, P, d = shape[t]
        L = len(P)
        if kind == "beg":
            options = [0] if t == 0 else []
        elif kind == "end":
            options = [M - L] if t == len(shape) - 1 and M - L >= max(lo, 1) else []
        else:
            options = range(max(lo, 1), min(lo + 3, M - 1 - L) + 1)
        for s in options:
            if s < lo or s + L > M or (kind != "end" and s + L > M - 1):
                continue
            got, pos = run_pattern(M, s, L)
            if got != P:
                continue
            if d is not None:
                order = path_order(M)
                ep = order[0] if kind == "beg" else order[-1]
                if pos.index(ep) != d:
                    continue
            res = self._place(shape, M, t + 1, s + L + 1, acc + (s,))
            if res is not None:
                return res
        return None

    @lru_cache(maxsize=100_000)
    def _layout(self, shape: tuple):
        """Placement of ``shape`` unpacked into sigma positions per piece entry."""
        placed = self._placement(shape)
        if placed is None:
            return None
        M, starts = placed
        e1, e2 = endpoints(M)
        base = [self.spec.A[0]] * (M + 1)
        base[e1] = base[e2] = self.alpha
        slots = []
        for (kind, P, d), st in zip(shape, starts):
            if kind == "c1":
                slots.append(tuple(range(1, M + 1)))
            else:
                slots.append(run_pattern(M, st, len(P))[1])
        return M, tuple(base), tuple(slots), (e1, e2)

    def certificate(self, pi: Sequence[int]):
        """A concrete element E and positions of E reading off ``pi``.

        Returns ``(E, positions)`` with 1-based positions, or None when no
        derivation or placement exists.
        """
        pi = tuple(pi)
        pieces = self.derivation(pi)
        if not pieces:
            return None
        layout = self._layout(tuple((kind, P, d) for kind, P, d, _ in pieces))
        if layout is None:
            return None
        M, base, slots, ends = layout
        blocks = list(base)
        wanted = {}  # sigma position -> pattern read from its block
        for (kind, P, d, pblocks), pos in zip(pieces, slots):
            for q, b in zip(pos, pblocks):
                wanted[q] = b
                if q in ends:
                    if b != self.alpha and not _le_cached(b, self.alpha):
                        return None
                else:
                    blocks[q] = self.host[b]
        E = kernels.inflate(sigma(M), blocks[1:])
        positions = []
        off = 0
        for q in range(1, M + 1):
            b = wanted.get(q)
            if b is not None:
                positions += [off + i for i in _occurrence(blocks[q], b)]
            off += len(blocks[q])
        return E, tuple(positions)


@lru_cache(maxsize=None)
def _occurrence(host: Perm, pattern: Perm):
    occ = kernels.find_occurrence(host, pattern)
    if occ is None:
        raise AssertionError(f"{pattern} is not a pattern of {host}")
    return tuple(i + 1 for i in occ)


@lru_cache(maxsize=None)
def _le_cached(small: Perm, big: Perm) -> bool:
    return kernels.find_occurrence(big, small) is not None


def _compositions(n: int, parts: int):
    """Cut points splitting range(n) into ``parts`` nonempty consecutive segments."""
    import itertools

    for cuts in itertools.combinations(range(1, n), parts - 1):
        bounds = (0,) + cuts + (n,)
        yield [(bounds[i], bounds[i + 1]) for i in range(parts)]


def grammar_generate(spec: AntichainSpec, n_max: int) -> GrammarResult:
    """Distinct members and raw derivation counts of the grammar up to n_max."""
    return Grammar(spec, n_max).generate()


@dataclass
class SoundnessReport:
    checked: int
    failures: list = field(default_factory=list)
    longest_host: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures


def grammar_soundness(spec: AntichainSpec, table: ClosureTable,
                      grammar: Grammar | None = None, max_failures: int = 5) -> SoundnessReport:
    """Certify each table member as a pattern of an explicitly built element."""
    g = grammar or Grammar(spec, table.n_max)
    report = SoundnessReport(0)
    for n in range(1, table.n_max + 1):
        for b in table.layers[n]:
            pi = tuple(b)
            report.checked += 1
            cert = g.certificate(pi)
            ok = False
            if cert is not None:
                E, pos = cert
                ok = len(pos) == len(pi) and kernels.flatten([E[p - 1] for p in pos]) == pi
                report.longest_host = max(report.longest_host, len(E))
            if not ok:
                report.failures.append(pi)
                if len(report.failures) >= max_failures:
                    return report
    return report


# --- reconciliation --------------------------------------------------------

@dataclass
class ReconcileReport:
    spec: AntichainSpec
    n_max: int
    cutoff: int
    brute: Series
    grammar_distinct: Series
    grammar_raw: Series
    paper_gf: Series
    stable: bool | None
    fit: RationalGF | None
    fit_degree: int
    tables_equal: bool

    def rows(self) -> list[dict]:
        out = []
        for n in range(1, self.n_max + 1):
            out.append({
                "n": n,
                "brute": self.brute[n],
                "grammar_distinct": self.grammar_distinct[n],
                "grammar_raw": self.grammar_raw[n],
                "paper_gf": self.paper_gf[n],
                "delta_paper_brute": self.paper_gf[n] - self.brute[n],
            })
        return out

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "n_max": self.n_max,
            "cutoff": self.cutoff,
            "stable": self.stable,
            "tables_equal": self.tables_equal,
            "rows": self.rows(),
            "fit": self.fit.to_json() if self.fit is not None else None,
            "fit_max_den_degree": self.fit_degree,
            "fit_terms": self.n_max,
        }


def reconcile_report(spec: AntichainSpec, n_max: int, cutoff: int | None = None,
                     cache_dir=None, brute: ClosureCounts | None = None,
                     grammar: GrammarResult | None = None) -> ReconcileReport:
    if cutoff is None:
        cutoff = default_cutoff(n_max)
    if brute is None:
        brute = closure_counts(spec, n_max, cutoff, cache_dir=cache_dir)
    if grammar is None:
        grammar = grammar_generate(spec, n_max)
    paper = series_expand(gf_closure_paper(spec).total, n_max)
    equal = all(
        brute.table.layers[n] == grammar.table.layers[n] for n in range(1, n_max + 1)
    )
    deg = max((n_max - 4) // 2, 0)
    fit = fit_rational(brute.series, deg)
    return ReconcileReport(spec, n_max, cutoff, brute.series, grammar.distinct,
                           grammar.raw, paper, brute.stable, fit, deg, equal)
