"""The antichains U_{A,alpha}: oscillations sigma_m with both ends blown up by alpha."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from math import factorial
from typing import Iterable, Sequence

from .errors import InvalidInputError, ResourceLimitError
from .oscillation import endpoints, sigma
from .perm import Perm, format_perm, le, perm, permutations_of_length, sort_key
from .structure import inflate

MAX_TAU_K = 8


@dataclass(frozen=True)
class AntichainSpec:
    """Parameters of one antichain family.

    ``A`` is stored sorted by (length, values).  ``tau`` is set when ``A`` was
    built as ``A_tau``.
    """

    k: int
    alpha: Perm
    A: tuple[Perm, ...]
    tau: Perm | None = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", perm(self.alpha))
        members = sorted({perm(a) for a in self.A}, key=sort_key)
        if not members:
            raise InvalidInputError("A must be nonempty")
        object.__setattr__(self, "A", tuple(members))
        if self.tau is not None:
            object.__setattr__(self, "tau", perm(self.tau))
        if self.k < 1:
            raise InvalidInputError("k must be at least 1")
        if len(self.alpha) != self.k + 1:
            raise InvalidInputError(
                f"alpha must have length k+1 = {self.k + 1}, got {len(self.alpha)}"
            )

    @classmethod
    def from_tau(cls, k: int, tau: Sequence[int], alpha: Sequence[int]) -> "AntichainSpec":
        tau = perm(tau)
        return cls(k, perm(alpha), tuple(make_A_tau(k, tau)), tau)

    @classmethod
    def split_end_paths(cls) -> "AntichainSpec":
        """The antichain U = U_{{1},12}."""
        return cls(1, (1, 2), ((1,),))

    @classmethod
    def symmetric(cls, k: int, alpha: Sequence[int]) -> "AntichainSpec":
        """A = S_k, all permutations of length k."""
        if k > MAX_TAU_K:
            raise ResourceLimitError(f"S_k is only materialised for k <= {MAX_TAU_K}")
        return cls(k, perm(alpha), tuple(permutations_of_length(k)))

    @property
    def min_fill(self) -> int:
        return len(self.A[0])

    def min_element_length(self, m: int = 4) -> int:
        return 2 * (self.k + 1) + (m - 2) * self.min_fill

    def to_json(self) -> dict:
        d = {"k": self.k, "alpha": list(self.alpha), "A": [list(a) for a in self.A]}
        if self.tau is not None:
            d["tau"] = list(self.tau)
        return d

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def describe(self) -> str:
        parts = [f"k={self.k}", f"alpha={format_perm(self.alpha)}"]
        if self.tau is not None:
            parts.append(f"tau={format_perm(self.tau)}")
        parts.append(f"|A|={len(self.A)}")
        return ", ".join(parts)


def make_A_tau(k: int, tau: Sequence[int]) -> list[Perm]:
    """``{tau}`` together with every length-k permutation avoiding ``tau``."""
    tau = perm(tau)
    if k < 3:
        raise InvalidInputError("A_tau needs k >= 3")
    if len(tau) != k - 1:
        raise InvalidInputError(f"tau must have length k-1 = {k - 1}")
    if k > MAX_TAU_K:
        raise ResourceLimitError(f"exhaustive scan of S_k is capped at k = {MAX_TAU_K}")
    return [tau] + [p for p in permutations_of_length(k) if not le(tau, p)]


def a_tau_layer_size(k: int) -> int:
    """k! - k^2 + 2k - 2 = number of length-k permutations avoiding a fixed tau."""
    return factorial(k) - k * k + 2 * k - 2


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate_spec(spec: AntichainSpec) -> ValidationReport:
    report = ValidationReport()
    bad = next(
        ((a, b) for a in spec.A for b in spec.A if a != b and le(a, b)), None
    )
    report.checks.append(
        CheckResult(
            "A-antichain",
            bad is None,
            "" if bad is None else f"{format_perm(bad[0])} <= {format_perm(bad[1])}",
        )
    )
    host = next((a for a in spec.A if le(spec.alpha, a)), None)
    report.checks.append(
        CheckResult(
            "alpha-not-in-closure",
            host is None,
            "" if host is None else f"alpha <= {format_perm(host)}",
        )
    )
    if spec.tau is not None:
        ok = not le(spec.tau, spec.alpha)
        report.checks.append(
            CheckResult("tau-not-in-alpha", ok, "" if ok else "tau <= alpha")
        )
    return report


@dataclass(frozen=True)
class ElementId:
    """Name of one element: the oscillation length and the fills in position order."""

    m: int
    fills: tuple[Perm, ...]

    def to_json(self) -> dict:
        return {"m": self.m, "fills": [list(f) for f in self.fills]}


def build_element(spec: AntichainSpec, eid: ElementId) -> Perm:
    m = eid.m
    if m < 4:
        raise InvalidInputError("element oscillation length must be >= 4")
    if len(eid.fills) != m - 2:
        raise InvalidInputError(f"sigma_{m} needs {m - 2} fills, got {len(eid.fills)}")
    ends = set(endpoints(m))
    fills = iter(eid.fills)
    blocks = [spec.alpha if i in ends else next(fills) for i in range(1, m + 1)]
    return inflate(sigma(m), blocks)


def element_ids_of_length(spec: AntichainSpec, n: int) -> Iterable[ElementId]:
    by_len: dict[int, list[Perm]] = {}
    for a in spec.A:
        by_len.setdefault(len(a), []).append(a)
    lo = min(by_len)
    hi = max(by_len)
    m = 4
    while spec.min_element_length(m) <= n:
        slots = m - 2
        rest = n - 2 * (spec.k + 1)
        if slots * lo <= rest <= slots * hi:
            for fills in _sorted_fills(by_len, slots, rest):
                yield ElementId(m, fills)
        m += 1


def _sorted_fills(by_len, slots, total):
    # DP over slots keeps this linear in the number of results
    def rec(i, remaining):
        if i == slots:
            if remaining == 0:
                yield ()
            return
        left = slots - i - 1
        for L in sorted(by_len):
            if remaining - L < left * min(by_len) or remaining - L > left * max(by_len):
                continue
            for a in by_len[L]:
                for rest in rec(i + 1, remaining - L):
                    yield (a,) + rest

    yield from rec(0, total)


def elements_of_length(spec: AntichainSpec, n: int) -> list[Perm]:
    return sorted({build_element(spec, eid) for eid in element_ids_of_length(spec, n)})


def elements_up_to(spec: AntichainSpec, n_max: int) -> list[Perm]:
    out = []
    for n in range(1, n_max + 1):
        out += elements_of_length(spec, n)
    return out


@dataclass
class AntichainReport:
    passed: bool
    n_max: int
    elements: int
    pairs_checked: int
    offending: tuple[Perm, Perm] | None = None

    def summary(self) -> str:
        if self.passed:
            return (
                f"antichain verified: {self.elements} elements of length <= {self.n_max}, "
                f"{self.pairs_checked} containment tests, none positive"
            )
        a, b = self.offending
        return f"comparable pair: {format_perm(a)} <= {format_perm(b)}"


def verify_pairwise(elements: Sequence[Sequence[int]], n_max: int = 0) -> AntichainReport:
    """Check that no element of the list is contained in another list entry."""
    elements = [tuple(e) for e in elements]
    pairs = 0
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            if i == j or len(a) > len(b):
                continue
            pairs += 1
            if le(a, b):
                return AntichainReport(False, n_max, len(elements), pairs, (a, b))
    return AntichainReport(True, n_max, len(elements), pairs)


def verify_antichain(spec: AntichainSpec, n_max: int) -> AntichainReport:
    return verify_pairwise(elements_up_to(spec, n_max), n_max)
