"""Finitely based classes Av(B) and the rational superclass built from an antichain."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from . import kernels
from .antichain import AntichainSpec, elements_of_length
from .closure import ClosureCounts, closure_counts
from .errors import InvalidInputError, ResourceLimitError
from .genfun import RationalGF, fit_rational, gf_antichain, growth_rate
from .perm import Perm, format_perm, le, perm, sort_key

DEFAULT_CAP = 12


@dataclass(frozen=True)
class ClassSpec:
    """The class Av(basis)."""

    basis: tuple[Perm, ...]

    def __post_init__(self):
        b = tuple(sorted({perm(p) for p in self.basis}, key=sort_key))
        if not b:
            raise InvalidInputError("a proper class needs a nonempty basis")
        for x in b:
            for y in b:
                if x != y and le(x, y):
                    raise InvalidInputError(
                        f"basis is not an antichain: {format_perm(x)} <= {format_perm(y)}"
                    )
        object.__setattr__(self, "basis", b)

    def __contains__(self, p) -> bool:
        p = tuple(p)
        return not any(le(b, p) for b in self.basis)

    def describe(self) -> str:
        return "Av(" + ", ".join(format_perm(b) or "()" for b in self.basis) + ")"


@lru_cache(maxsize=16)
def _avoider_layers(cls: ClassSpec, n: int) -> tuple[frozenset, ...]:
    layers = [frozenset({()})]
    for L in range(1, n + 1):
        nxt = set()
        for p in layers[-1]:
            for i in range(L):
                q = p[:i] + (L,) + p[i:]
                if q not in nxt and q in cls:
                    nxt.add(q)
        layers.append(frozenset(nxt))
    return tuple(layers)


def avoiders(cls: ClassSpec, n: int, cap: int = DEFAULT_CAP) -> list[Perm]:
    """All length-n members of the class, sorted.

    Members of length n are grown from those of length n-1 by inserting the
    new maximum in every slot; classes are closed downward, so nothing is
    missed.
    """
    if n < 0:
        raise InvalidInputError("n must be nonnegative")
    if n > cap:
        raise ResourceLimitError(f"class enumeration is capped at length {cap}")
    return sorted(_avoider_layers(cls, n)[n])


def class_counts(cls: ClassSpec, n_max: int, cap: int = DEFAULT_CAP) -> list[int]:
    if n_max > cap:
        raise ResourceLimitError(f"class enumeration is capped at length {cap}")
    layers = _avoider_layers(cls, n_max)
    return [len(layers[n]) for n in range(1, n_max + 1)]


def growth_upper_estimate(counts: Sequence[int]) -> float:
    """Rough upper estimate of the upper growth rate from the ratios c_n / c_(n-1).

    Takes the larger of the last ratio and a straight-line extrapolation of
    the last three ratios against 1/n to 1/n = 0.
    """
    ratios = [
        (n, counts[n - 1] / counts[n - 2])
        for n in range(2, len(counts) + 1)
        if counts[n - 2] > 0
    ]
    if not ratios or counts[-1] == 0:
        return 0.0
    est = ratios[-1][1]
    if len(ratios) >= 3:
        pts = [(1.0 / n, r) for n, r in ratios[-3:]]
        mx = sum(p[0] for p in pts) / 3
        my = sum(p[1] for p in pts) / 3
        sxx = sum((p[0] - mx) ** 2 for p in pts)
        if sxx > 0:
            slope = sum((p[0] - mx) * (p[1] - my) for p in pts) / sxx
            est = max(est, my - slope * mx)
    return est


@dataclass
class Condition:
    name: str
    passed: bool
    exact: bool
    detail: str

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "exact": self.exact, "detail": self.detail}


@dataclass
class ConditionReport:
    conditions: list[Condition]
    antichain_growth: float | None
    class_growth_estimate: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def __getitem__(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "conditions": [c.to_json() for c in self.conditions],
            "antichain_growth": self.antichain_growth,
            "class_growth_estimate": self.class_growth_estimate,
        }


def check_conditions(cls: ClassSpec, spec: AntichainSpec, n_probe: int = 10) -> ConditionReport:
    """(A1) alpha outside the class, (A2) tau not below alpha, (A3) growth comparison.

    A3 compares the antichain's growth rate against an empirical upper
    estimate for the class and is labelled as such.
    """
    if spec.tau is None:
        raise InvalidInputError("conditions need a spec built from A_tau")
    out = []
    a1 = spec.alpha not in cls
    out.append(Condition("A1", a1, True,
                         f"alpha={format_perm(spec.alpha)} " + ("lies outside" if a1 else "lies in") + f" {cls.describe()}"))
    a2 = not le(spec.tau, spec.alpha)
    out.append(Condition("A2", a2, True,
                         f"tau={format_perm(spec.tau)} " + ("is not" if a2 else "is") + " contained in alpha"))
    g = growth_rate(gf_antichain(spec)).rate
    est = growth_upper_estimate(class_counts(cls, n_probe, cap=max(n_probe, DEFAULT_CAP)))
    a3 = g is not None and g > est
    out.append(Condition("A3", a3, False,
                         f"empirical: antichain growth {g:.6f} vs class estimate {est:.6f} from lengths <= {n_probe}"))
    return ConditionReport(out, g, est)


@dataclass
class SuperclassRow:
    n: int
    c: int
    u_closure: int
    overlap: int
    c_outside: int
    antichain: int
    x: int
    c_rat: int
    x_literal: int
    c_rat_literal: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SuperclassReport:
    cls: ClassSpec
    spec: AntichainSpec
    n_max: int
    paper_literal: bool
    conditions: ConditionReport
    N: int | None
    shortfall: list[int]
    rows: list[SuperclassRow]
    removed: dict[int, list[Perm]] = field(default_factory=dict)
    downward_closed: bool | None = None
    closure_witness: tuple | None = None
    disjoint: bool | None = None
    fit: RationalGF | None = None
    closure_fit: RationalGF | None = None

    @property
    def ok(self) -> bool:
        return self.N is not None

    @property
    def polynomial_degree(self) -> int | None:
        return None if self.N is None else self.N - 1

    def c_rat_counts(self) -> list[int]:
        return [r.c_rat_literal if self.paper_literal else r.c_rat for r in self.rows]

    def to_json(self) -> dict:
        return {
            "basis": [list(b) for b in self.cls.basis],
            "spec": self.spec.to_json(),
            "n_max": self.n_max,
            "mode": "literal" if self.paper_literal else "corrected",
            "conditions": self.conditions.to_json(),
            "N": self.N,
            "shortfall": self.shortfall,
            "polynomial_degree": self.polynomial_degree,
            "rows": [r.to_json() for r in self.rows],
            "removed": {str(n): [list(p) for p in ps] for n, ps in self.removed.items()},
            "downward_closed": self.downward_closed,
            "closure_witness": [list(x) for x in self.closure_witness] if self.closure_witness else None,
            "disjoint": self.disjoint,
            "fit": self.fit.to_json() if self.fit is not None else None,
            "closure_fit": self.closure_fit.to_json() if self.closure_fit is not None else None,
        }

    def summary(self) -> str:
        lines = [
            f"class {self.cls.describe()}, antichain {self.spec.describe()}, lengths <= {self.n_max}",
        ]
        for c in self.conditions.conditions:
            tag = "exact" if c.exact else "empirical"
            lines.append(f"  {c.name} ({tag}): {'pass' if c.passed else 'FAIL'}  {c.detail}")
        if self.N is None:
            lines.append(f"  no valid N: shortfall at lengths {self.shortfall}")
        else:
            lines.append(f"  N = {self.N} (correction polynomial degree <= {self.N - 1})")
        mode = "literal" if self.paper_literal else "corrected"
        lines.append(f"  X_n sizing: {mode}")
        lines.append("   n      |C_n|   |U<=_n|  overlap  |U_n|  |X_n|   |C_rat,n|  literal")
        for r in self.rows:
            lines.append(
                f"  {r.n:2d} {r.c:10d} {r.u_closure:9d} {r.overlap:8d} {r.antichain:6d} "
                f"{(r.x_literal if self.paper_literal else r.x):6d} "
                f"{(r.c_rat_literal if self.paper_literal else r.c_rat):11d} {r.c_rat_literal:8d}"
            )
        lines.append(f"  downward closed: {self.downward_closed}; disjoint from antichain: {self.disjoint}")
        lines.append(f"  rational fit of C_rat series: {self.fit.pretty() if self.fit else 'none found'}")
        return "\n".join(lines) + "\n"


def choose_threshold(antichain: Sequence[int], need: Sequence[int], start: int) -> tuple[int | None, list[int]]:
    """Least N >= start with antichain[n] >= need[n] for every computed n >= N.

    Both sequences are indexed by n - 1.  Returns ``(None, shortfall)`` when
    even the last computed length falls short.
    """
    n_max = len(need)
    short = [n for n in range(start, n_max + 1) if antichain[n - 1] < need[n - 1]]
    if start > n_max:
        return None, []
    if short and short[-1] == n_max:
        return None, short
    return (short[-1] + 1 if short else start), short


def build_rational_superclass(cls: ClassSpec, spec: AntichainSpec, n_max: int,
                              paper_literal: bool = False,
                              closure: ClosureCounts | None = None,
                              n_probe: int = 10) -> SuperclassReport:
    """Materialise C_rat = (C u U<=) minus X_N, X_(N+1), ... up to n_max."""
    conditions = check_conditions(cls, spec, n_probe)
    if closure is None:
        closure = closure_counts(spec, n_max, recheck=False)
    if closure.table.n_max < n_max:
        raise InvalidInputError("closure table is shorter than n_max")
    U = closure.table.layers
    C = {n: {bytes(p) for p in avoiders(cls, n, cap=n_max)} for n in range(1, n_max + 1)}
    elements = {n: elements_of_length(spec, n) for n in range(1, n_max + 1)}

    overlap = [sum(1 for p in C[n] if p in U[n]) for n in range(1, n_max + 1)]
    outside = [len(C[n]) - overlap[n - 1] for n in range(1, n_max + 1)]
    ucount = [len(elements[n]) for n in range(1, n_max + 1)]
    need = [len(C[n]) for n in range(1, n_max + 1)] if paper_literal else outside
    N, short = choose_threshold(ucount, need, spec.min_element_length())

    rows = []
    removed: dict[int, list[Perm]] = {}
    for n in range(1, n_max + 1):
        active = N is not None and n >= N
        x = outside[n - 1] if active else 0
        xl = len(C[n]) if active else 0
        union = len(U[n]) + outside[n - 1]
        if active:
            removed[n] = elements[n][: (xl if paper_literal else x)]
        rows.append(SuperclassRow(n, len(C[n]), len(U[n]), overlap[n - 1], outside[n - 1],
                                  ucount[n - 1], x, union - x, xl, union - min(xl, ucount[n - 1])))

    report = SuperclassReport(cls, spec, n_max, paper_literal, conditions, N, short, rows, removed)
    report.disjoint = all(bytes(e) not in C[n] for n in elements for e in elements[n])
    if N is None:
        return report

    # C_rat is downward closed iff every retained member of length n has all
    # one-point deletions in C or U<= and none of them removed
    witness = None
    for n in range(2, n_max + 1):
        gone = {bytes(p) for p in removed.get(n, ())}
        gone_below = {bytes(p) for p in removed.get(n - 1, ())}
        lower = (C[n - 1], U[n - 1])
        members = [p for p in C[n] if p not in U[n]]
        hit = kernels.first_unclosed(members, lower, gone_below)
        if hit is None:
            hit = kernels.first_unclosed((p for p in U[n] if p not in gone), lower, gone_below)
        if hit is not None:
            witness = (tuple(hit[0]), tuple(hit[1]))
            break
    report.downward_closed = witness is None
    report.closure_witness = witness

    deg = max((n_max - 4) // 2, 0)
    report.fit = fit_rational(report.c_rat_counts(), deg)
    report.closure_fit = fit_rational(list(closure.series.coeffs), deg)
    return report
