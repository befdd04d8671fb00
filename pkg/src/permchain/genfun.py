"""Exact polynomials, rational generating functions, series and growth rates."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError


class Poly:
    """Integer polynomial; ``coeffs[i]`` is the coefficient of x^i."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        c = [int(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def x(cls, power: int = 1, coeff: int = 1) -> "Poly":
        return cls([0] * power + [coeff])

    @classmethod
    def const(cls, v: int) -> "Poly":
        return cls([v])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Poly([other])
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)})"

    def __str__(self):
        return self.pretty()

    @staticmethod
    def _lift(v) -> "Poly":
        return v if isinstance(v, Poly) else Poly([v])

    def __add__(self, other):
        other = self._lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-v for v in self.coeffs)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = Poly([1])
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def content(self) -> int:
        return math.gcd(*self.coeffs) if self.coeffs else 0

    def primitive(self) -> "Poly":
        c = self.content()
        if c == 0:
            return self
        if self.coeffs[-1] < 0:
            c = -c
        return Poly(v // c for v in self.coeffs)

    def compose(self, inner: "Poly") -> "Poly":
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def support_gcd(self) -> int:
        """gcd of the exponents carrying nonzero coefficients, constant term excluded."""
        return math.gcd(*(i for i, c in enumerate(self.coeffs) if c and i > 0))

    def pretty(self, var: str = "x") -> str:
        """Terms in increasing degree, e.g. ``1 - x^2 - x^3``."""
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                mono = var if i == 1 else f"{var}^{i}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            sign = "-" if c < 0 else "+"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def to_json(self) -> list[str]:
        return [str(v) for v in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "Poly":
        return cls(int(v) for v in data)


def _pseudo_rem(a: Poly, b: Poly) -> Poly:
    r = list(a.coeffs)
    db = b.degree
    lb = b.coeffs[-1]
    while len(r) - 1 >= db and any(r):
        shift = len(r) - 1 - db
        lead = r[-1]
        r = [v * lb for v in r]
        for i, bc in enumerate(b.coeffs):
            r[i + shift] -= lead * bc
        while r and r[-1] == 0:
            r.pop()
    return Poly(r)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Primitive gcd with positive leading coefficient (primitive PRS)."""
    a, b = a.primitive(), b.primitive()
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if a.degree < b.degree:
        a, b = b, a
    while not b.is_zero():
        r = _pseudo_rem(a, b)
        a, b = b, r.primitive()
    return a.primitive()


def poly_divexact(a: Poly, b: Poly) -> Poly:
    """``a / b`` when b divides a over the integers."""
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    r = [Fraction(v) for v in a.coeffs]
    q = [Fraction(0)] * max(len(r) - b.degree, 0)
    lb = b.coeffs[-1]
    for shift in range(len(q) - 1, -1, -1):
        t = r[shift + b.degree] / lb
        q[shift] = t
        for i, bc in enumerate(b.coeffs):
            r[i + shift] -= t * bc
    if any(r) or any(v.denominator != 1 for v in q):
        raise ValueError("inexact polynomial division")
    return Poly(int(v) for v in q)


class RationalGF:
    """``num/den`` in lowest terms with ``den(0) > 0``."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num = Poly._lift(num)
        den = Poly._lift(den)
        if den.is_zero():
            raise InvalidInputError("zero denominator")
        if num.is_zero():
            self.num, self.den = Poly(), Poly([1])
            return
        g = poly_gcd(num, den)
        if g.degree > 0:
            num, den = poly_divexact(num, g), poly_divexact(den, g)
        c = math.gcd(num.content(), den.content())
        num = Poly(v // c for v in num.coeffs)
        den = Poly(v // c for v in den.coeffs)
        if den[0] == 0:
            raise InvalidInputError(
                f"denominator {den.pretty()} vanishes at 0; no power series expansion"
            )
        if den[0] < 0:
            num, den = -num, -den
        self.num, self.den = num, den

    @staticmethod
    def _lift(v) -> "RationalGF":
        return v if isinstance(v, RationalGF) else RationalGF(v)

    def __eq__(self, other):
        if isinstance(other, (int, Poly)):
            other = RationalGF(other)
        return isinstance(other, RationalGF) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalGF({list(self.num.coeffs)}, {list(self.den.coeffs)})"

    def __str__(self):
        return self.pretty()

    def __add__(self, other):
        o = self._lift(other)
        return RationalGF(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalGF(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return RationalGF(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def reciprocal(self) -> "RationalGF":
        if self.num[0] == 0:
            raise InvalidInputError("reciprocal of a series with zero constant term")
        return RationalGF(self.den, self.num)

    def __truediv__(self, other):
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def __pow__(self, e: int):
        if e < 0:
            return self.reciprocal() ** (-e)
        return RationalGF(self.num ** e, self.den ** e)

    def substitute(self, inner) -> "RationalGF":
        """Compose with ``inner`` (Poly or RationalGF with zero constant term)."""
        inner = self._lift(inner)
        if inner.num[0] != 0:
            raise InvalidInputError("substituted series must have zero constant term")
        # homogenise: p(u/v) = sum p_i u^i v^(d-i) / v^d
        d = max(self.num.degree, self.den.degree, 0)
        u, v = inner.num, inner.den

        def hom(p: Poly) -> Poly:
            acc = Poly()
            for i, c in enumerate(p.coeffs):
                if c:
                    acc = acc + c * (u ** i) * (v ** (d - i))
            return acc

        return RationalGF(hom(self.num), hom(self.den))

    def pretty(self, var: str = "x") -> str:
        if self.den == Poly([1]):
            return self.num.pretty(var)

        def wrap(p):
            text = p.pretty(var)
            return f"({text})" if sum(1 for c in p.coeffs if c) > 1 or text.startswith("-") else text

        return f"{wrap(self.num)}/{wrap(self.den)}"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data) -> "RationalGF":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(Poly.from_json(data["num"]), Poly.from_json(data["den"]))


X = RationalGF(Poly.x())


def rational_arith(expr: str, **names) -> RationalGF:
    """Evaluate an arithmetic expression over RationalGF values.

    ``x`` is always bound; further names (e.g. ``a=Poly(...)``) are lifted to
    RationalGF.  Only ``+ - * / **``, parentheses and integer literals occur.
    """
    import ast

    env = {"x": X}
    env.update({k: RationalGF._lift(v) for k, v in names.items()})
    tree = ast.parse(expr, mode="eval")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return RationalGF(node.value)
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise InvalidInputError(f"unknown name {node.id!r}")
            return env[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if isinstance(node, ast.BinOp):
            a = ev(node.left)
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                    raise InvalidInputError("exponents must be integer literals")
                return a ** node.right.value
            b = ev(node.right)
            ops = {ast.Add: lambda: a + b, ast.Sub: lambda: a - b,
                   ast.Mult: lambda: a * b, ast.Div: lambda: a / b}
            for t, f in ops.items():
                if isinstance(node.op, t):
                    return f()
        raise InvalidInputError(f"unsupported expression: {ast.dump(node)}")

    return ev(tree)


@dataclass(frozen=True)
class Series:
    """Coefficients of x^1..x^N."""

    coeffs: tuple[int, ...]

    @property
    def N(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n: int) -> int:
        """Coefficient of x^n (1-based)."""
        if n < 1 or n > len(self.coeffs):
            raise IndexError(n)
        return self.coeffs[n - 1]

    def to_json(self) -> dict:
        return {"n_min": 1, "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, data) -> "Series":
        if isinstance(data, str):
            data = json.loads(data)
        if data.get("n_min", 1) != 1:
            raise InvalidInputError("series must start at n = 1")
        return cls(tuple(int(v) for v in data["coeffs"]))


def series_expand(gf: RationalGF, N: int) -> Series:
    """x^1..x^N coefficients via the recurrence den * f = num."""
    if N < 1:
        raise InvalidInputError("N must be at least 1")
    gf = RationalGF._lift(gf)
    num, den = gf.num, gf.den
    d0 = den[0]
    c: list[int] = []
    for n in range(N + 1):
        acc = num[n] - sum(den[i] * c[n - i] for i in range(1, min(n, den.degree) + 1))
        q, r = divmod(acc, d0)
        if r:
            raise InvalidInputError("series has non-integer coefficients")
        c.append(q)
    return Series(tuple(c[1:]))


def gf_finite_set(perms: Iterable[Sequence[int]]) -> Poly:
    counts: dict[int, int] = {}
    for p in {tuple(p) for p in perms}:
        counts[len(p)] = counts.get(len(p), 0) + 1
    if not counts:
        return Poly()
    return Poly(counts.get(i, 0) for i in range(max(counts) + 1))


def gf_antichain(spec) -> RationalGF:
    """x^(2k+2) a^2 / (1 - a) with a the length polynomial of A."""
    a = RationalGF(gf_finite_set(spec.A))
    return X ** (2 * spec.k + 2) * a * a / (1 - a)


def closure_poly_formula(k: int) -> Poly:
    """x + 2x^2 + 6x^3 + ... + (k-1)! x^(k-1) + (k! - k^2 + 2k - 2) x^k."""
    coeffs = [0] + [math.factorial(i) for i in range(1, k)]
    coeffs.append(math.factorial(k) - k * k + 2 * k - 2)
    return Poly(coeffs)


@dataclass(frozen=True)
class ClosureGF:
    total: RationalGF
    c1: RationalGF
    beginnings: RationalGF
    middles: RationalGF
    endings: RationalGF
    a: Poly

    def to_json(self) -> dict:
        return {
            "total": self.total.to_json(),
            "c1": self.c1.to_json(),
            "beginnings": self.beginnings.to_json(),
            "middles": self.middles.to_json(),
            "endings": self.endings.to_json(),
            "a": self.a.to_json(),
        }


def gf_closure_paper(spec) -> ClosureGF:
    """The closed form claimed for the closure of U_{A_tau, alpha}, taken literally."""
    if spec.tau is None:
        raise InvalidInputError("the closure formula needs a spec built from A_tau")
    k = spec.k
    a_poly = closure_poly_formula(k)
    a = RationalGF(a_poly)
    xk1 = X ** (k + 1)
    c1 = X ** (2 * k + 2) * a * a / (1 - a)
    beginnings = 1 + xk1 / (1 - a)
    middles = (1 - a) / (1 - 2 * a - a ** 3)
    endings = 1 + xk1 + 2 * xk1 * a / (1 - a)
    total = c1 + beginnings * middles * endings - 1
    return ClosureGF(total, c1, beginnings, middles, endings, a_poly)


@dataclass
class GrowthResult:
    rate: float | None
    root: float | None
    unique_dominant: bool
    note: str = ""
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "rate": self.rate,
            "root": self.root,
            "unique_dominant": self.unique_dominant,
            "note": self.note,
            "diagnostics": self.diagnostics,
        }


def _sign(p: Poly, x: float) -> int:
    v = p(Fraction(x))
    return (v > 0) - (v < 0)


def least_positive_root(den: Poly, tol: float = 1e-12, max_doublings: int = 16) -> float | None:
    """Least positive root of ``den`` by grid scan then bisection, or None."""
    if den.degree < 1:
        return None
    s0 = _sign(den, 0.0) or 1
    lo_edge, hi = 1e-9, 1.0
    for _ in range(max_doublings + 1):
        grid = np.linspace(lo_edge, hi, 4001)
        prev = float(grid[0])
        if _sign(den, prev) != s0:
            return prev
        for x in grid[1:]:
            x = float(x)
            s = _sign(den, x)
            if s == 0:
                return x
            if s != s0:
                a, b = prev, x
                while b - a > tol:
                    mid = (a + b) / 2
                    sm = _sign(den, mid)
                    if sm == 0:
                        return mid
                    if sm == s0:
                        a = mid
                    else:
                        b = mid
                return (a + b) / 2
            prev = x
        lo_edge, hi = hi, hi * 2
    return None


@dataclass
class DominantRootCheck:
    unique: bool
    r: float | None
    min_off_arc: float | None
    support_gcd: int
    root_moduli: list[float]
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "unique": self.unique,
            "r": self.r,
            "min_off_arc": self.min_off_arc,
            "omega_period": self.support_gcd,
            "root_moduli": self.root_moduli,
            "reason": self.reason,
        }


def check_dominant_root(den: Poly, r: float | None = None, samples: int = 20000) -> DominantRootCheck:
    """Is the least positive root ``r`` the only root of modulus ``r``?

    Samples |den| on the circle |z| = r away from the positive real axis.  The
    diagnostics carry the gcd of the support exponents: when it exceeds 1 every
    rotation of r by a root of unity of that order is also a root.
    """
    den = Poly._lift(den)
    g = den.support_gcd() if den.degree >= 1 else 0
    moduli = sorted(float(abs(z)) for z in np.roots(list(reversed(den.coeffs)))) if den.degree >= 1 else []
    if r is None:
        r = least_positive_root(den)
    if r is None:
        return DominantRootCheck(False, None, None, g, moduli, "no positive root")
    theta = np.linspace(-np.pi, np.pi, max(samples, 10_000), endpoint=False)
    if g > 1:
        theta = np.concatenate([theta, 2 * np.pi * np.arange(1, g) / g])
    theta = np.angle(np.exp(1j * theta))
    off = np.abs(theta) >= 0.1
    z = r * np.exp(1j * theta[off])
    coeffs = [complex(float(c)) for c in den.coeffs]
    vals = np.abs(np.polyval(list(reversed(coeffs)), z))
    min_off = float(vals.min())
    at_neg = abs(float(den(-r)))
    unique = min_off > 1e-6 and at_neg > 1e-6
    reason = ""
    if not unique:
        reason = (
            f"another root of modulus {r:.12g}"
            + (f"; support exponents share the factor {g}" if g > 1 else "")
        )
    return DominantRootCheck(unique, r, min_off, g, moduli, reason)


def growth_rate(gf) -> GrowthResult:
    gf = RationalGF._lift(gf)
    den = gf.den
    r = least_positive_root(den)
    if r is None:
        return GrowthResult(
            None, None, False,
            "denominator has no positive real root; growth rate is at most 1",
            {"den": den.to_json()},
        )
    chk = check_dominant_root(den, r)
    return GrowthResult(1.0 / r, r, chk.unique, chk.reason, chk.to_json())


def _solve(rows: list[list[Fraction]], rhs: list[Fraction], nvars: int) -> list[Fraction] | None:
    """One exact solution of rows * v = rhs (free variables set to 0), or None."""
    m = [row[:] + [b] for row, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for col in range(nvars):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][col]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    if any(all(v == 0 for v in row[:-1]) and row[-1] != 0 for row in m[r:]):
        return None
    sol = [Fraction(0)] * nvars
    for i, col in enumerate(pivots):
        sol[col] = m[i][-1]
    return sol


HELD_OUT = 4


def fit_rational(series: Series | Sequence[int], max_den_degree: int) -> RationalGF | None:
    """Least-degree rational function through all terms, checked on 4 held-out terms.

    Denominator degrees are tried in increasing order, then numerator degrees.
    The last four coefficients are never used to solve, only to confirm.
    """
    coeffs = list(series.coeffs if isinstance(series, Series) else series)
    L = len(coeffs)
    if L < 2 * max_den_degree + HELD_OUT:
        raise InvalidInputError(
            f"need at least {2 * max_den_degree + HELD_OUT} terms for denominator degree {max_den_degree}"
        )
    c = [Fraction(0)] + [Fraction(v) for v in coeffs]  # c[n] = coefficient of x^n
    T = L - HELD_OUT

    def cc(n):
        return c[n] if n >= 0 else Fraction(0)

    for D in range(max_den_degree + 1):
        for e in range(0, T - D + 1):
            # den = 1 + q_1 x + ... + q_D x^D ; sum_i q_i c_{n-i} = -c_n for e < n <= T
            rows = [[cc(n - i) for i in range(1, D + 1)] for n in range(e + 1, T + 1)]
            rhs = [-cc(n) for n in range(e + 1, T + 1)]
            if len(rows) < D:
                continue
            q = _solve(rows, rhs, D) if D else ([] if all(v == 0 for v in rhs) else None)
            if q is None:
                continue
            qd = [Fraction(1)] + q
            num = [sum(qd[i] * cc(n - i) for i in range(0, min(n, D) + 1)) for n in range(e + 1)]
            scale = math.lcm(*(v.denominator for v in qd + num))
            cand = RationalGF(Poly(int(v * scale) for v in num), Poly(int(v * scale) for v in qd))
            try:
                pred = series_expand(cand, L).coeffs
            except InvalidInputError:
                continue
            if list(pred) == coeffs:
                return cand
    return None
