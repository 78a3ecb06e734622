"""Linear ODEs with coefficients in Q(t): the named hypergeometric equations,
local exponents, pullback and projective transforms, symmetric squares,
application to series, and canonical equality."""

from __future__ import annotations

import json
from fractions import Fraction

from .exactnum import INF, GenSeries, Q, RatFunc, TruncSeries, UniPoly, fmt_q, poly_gcd

T = RatFunc.t()
ONE = RatFunc(1)
INFINITY = "inf"


def _lin(c0, c1):
    """c0 + c1*t as a RatFunc."""
    return RatFunc(UniPoly((Q(c0), Q(c1))))


class Lode:
    """sum_k coeffs[k] * d^k y/dt^k = 0, coeffs[-1] nonzero."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [c if isinstance(c, RatFunc) else RatFunc(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        if len(cs) < 2:
            raise ValueError("a linear ODE needs order at least 1 and a nonzero leading coefficient")
        self.coeffs = tuple(cs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def monic(self) -> "Lode":
        lead = self.coeffs[-1]
        if lead == ONE:
            return self
        inv = lead.inv()
        return Lode([c * inv for c in self.coeffs])

    def scale(self, f: RatFunc) -> "Lode":
        return Lode([c * f for c in self.coeffs])

    def __eq__(self, other):
        if not isinstance(other, Lode):
            return NotImplemented
        return lode_equal(self, other)

    def __hash__(self):
        return hash(self.monic().coeffs)

    def __repr__(self):
        return f"Lode(order={self.order})"

    def __str__(self):
        m = self.monic()
        parts = []
        for k in range(m.order, -1, -1):
            c = m.coeffs[k]
            if c.is_zero():
                continue
            d = "y" if k == 0 else ("y'" if k == 1 else ("y''" if k == 2 else f"y^({k})"))
            parts.append(d if c == ONE else f"[{c}]*{d}")
        return " + ".join(parts) + " = 0"

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "coeffs": [{"num": [fmt_q(x) for x in c.num.c], "den": [fmt_q(x) for x in c.den.c]}
                       for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, obj) -> "Lode":
        if isinstance(obj, str):
            obj = json.loads(obj)
        cs = [RatFunc(UniPoly([Q(x) for x in c["num"]]), UniPoly([Q(x) for x in c["den"]]))
              for c in obj["coeffs"]]
        L = cls(cs)
        if "order" in obj and obj["order"] != L.order:
            raise ValueError(f"declared order {obj['order']} does not match {L.order} coefficients")
        return L


# ---------------------------------------------------------------------------
# Named equations
# ---------------------------------------------------------------------------

def euler(A, B, C) -> Lode:
    """z(1-z) y'' + (C - (A+B+1) z) y' - A B y."""
    A, B, C = Q(A), Q(B), Q(C)
    return Lode([RatFunc(-A * B), _lin(C, -(A + B + 1)), T * (1 - T)])


def hpg32(A, B, C, D, E) -> Lode:
    """The third order equation of 3F2(A,B,C; D,E; x)."""
    A, B, C, D, E = (Q(v) for v in (A, B, C, D, E))
    return Lode([
        RatFunc(-A * B * C),
        _lin(D * E, -(A * B + A * C + B * C + A + B + C + 1)),
        T * _lin(D + E + 1, -(A + B + C + 3)),
        T * T * (1 - T),
    ])


def kato(a, b, c1, c2) -> Lode:
    """Kato's equation for F4(a; b; c1, c2; t^2, (t-1)^2)."""
    a, b, c1, c2 = (Q(v) for v in (a, b, c1, c2))
    tm1 = T - 1
    p2 = (a + b + 2 * c1 - c2 + 1) / T + (a + b - c1 + 2 * c2 + 1) / tm1
    p1 = ((2 * c1 - 1) * (a + b - c2 + 1) / (T * T)
          + 2 * (a + b - c1 - c2 + 1 + 2 * a * b + 2 * c1 * c2) / (T * tm1)
          + (2 * c2 - 1) * (a + b - c1 + 1) / (tm1 * tm1))
    p0 = 2 * a * b * _lin(-2 * c1 + 1, 2 * (c1 + c2 - 1)) / (T * T * tm1 * tm1)
    return Lode([p0, p1, p2, ONE])


def xy2(a, b1, b2) -> Lode:
    """Second order equation of F2(a; b1, b2; 2b1, 2b2; x, 2-x)."""
    a, b1, b2 = Q(a), Q(b1), Q(b2)
    xm2 = T - 2
    return Lode([
        -a * (b1 / T + b2 / xm2),
        2 * b1 / T - 2 * b2 / xm2 - (a + b1 + b2 + 1),
        1 - T,
    ])


def f2sep(b1, b2, s) -> Lode:
    """Second order equation of the separated F2 family along
    (1 - t^2, 1 - (t+s)^2/(s^2-1))."""
    b1, b2, s = Q(b1), Q(b2), Q(s)
    q1 = T * T - 1
    q2 = T * T + 2 * s * T + 1
    return Lode([
        (b1 + b2 - Fraction(1, 2)) * (4 * b1 / q1 + 4 * b2 / q2),
        4 * b1 * T / q1 + 4 * b2 * (T + s) / q2,
        ONE,
    ])


BUILTINS = {
    "euler": (euler, ("A", "B", "C")),
    "hpg32": (hpg32, ("A", "B", "C", "D", "E")),
    "kato": (kato, ("a", "b", "c1", "c2")),
    "xy2": (xy2, ("a", "b1", "b2")),
    "f2sep": (f2sep, ("b1", "b2", "s")),
}


def builtin_ode(name: str, params) -> Lode:
    if name not in BUILTINS:
        raise ValueError(f"unknown builtin equation {name!r}; known: {', '.join(BUILTINS)}")
    fn, names = BUILTINS[name]
    if isinstance(params, dict):
        missing = [n for n in names if n not in params]
        if missing:
            raise ValueError(f"{name} needs parameters {', '.join(names)}; missing {', '.join(missing)}")
        vals = [params[n] for n in names]
    else:
        vals = list(params)
        if len(vals) != len(names):
            raise ValueError(f"{name} takes {len(names)} parameters ({', '.join(names)})")
    return fn(*vals)


# ---------------------------------------------------------------------------
# Local exponents
# ---------------------------------------------------------------------------

class IrregularSingularity(ValueError):
    pass


class ExponentReport:
    def __init__(self, point, indicial: UniPoly, rational_roots):
        self.point = point
        self.indicial = indicial
        self.rational_roots = sorted(rational_roots)

    def is_complete(self) -> bool:
        return len(self.rational_roots) == self.indicial.degree

    def to_json(self):
        return {
            "point": self.point if self.point == INFINITY else fmt_q(self.point),
            "indicial": [fmt_q(c) for c in self.indicial.c],
            "rational_roots": [fmt_q(r) for r in self.rational_roots],
        }

    def __repr__(self):
        pt = self.point if self.point == INFINITY else fmt_q(self.point)
        return f"ExponentReport(at {pt}: {[fmt_q(r) for r in self.rational_roots]})"


def _leading_at(f: RatFunc, p):
    """(valuation v, value of f/(t-p)^v at p)."""
    v = f.valuation_at(p)
    num, den = f.num, f.den
    lin = UniPoly.linear_root(p)
    for _ in range(max(v, 0)):
        num = num.exact_div(lin)
    for _ in range(max(-v, 0)):
        den = den.exact_div(lin)
    return v, num(p) / den(p)


def rational_roots(poly: UniPoly):
    """All rational roots with multiplicity."""
    if poly.is_zero():
        raise ValueError("rational roots of the zero polynomial")
    import mpmath

    roots = []
    p = poly
    # zero roots first
    while p.degree > 0 and p(0) == 0:
        roots.append(Fraction(0))
        p = p.exact_div(UniPoly.t())
    if p.degree <= 0:
        return roots
    sq = p.exact_div(poly_gcd(p, p.deriv()))
    _, prim = sq.content_primitive()
    lc = abs(int(prim.lc()))
    if sq.degree == 1:
        cands = [-sq.c[0] / sq.c[1]]
    else:
        dps = 30 + 4 * max(len(str(abs(int(c)))) for c in prim.c)
        with mpmath.workdps(dps):
            approx = mpmath.polyroots([mpmath.mpf(int(c)) for c in reversed(prim.c)],
                                      maxsteps=200, extraprec=4 * dps)
        cands = []
        for z in approx:
            if abs(mpmath.im(z)) > mpmath.mpf(10) ** (-dps // 3):
                continue
            x = Fraction(str(mpmath.nstr(mpmath.re(z), dps))).limit_denominator(lc)
            if sq(x) == 0 and x not in cands:
                cands.append(x)
    for r in cands:
        if sq(r) == 0:
            roots.extend([r] * p.valuation_at(r))
    return roots


def local_exponents(L: Lode, point) -> ExponentReport:
    if point == INFINITY or point == "infinity" or point == INF:
        Linf = pullback_transform(L, ONE / T, [])
        rep = local_exponents(Linf, Fraction(0))
        return ExponentReport(INFINITY, rep.indicial, rep.rational_roots)
    p = Q(point)
    m = L.monic()
    r = m.order
    rho = UniPoly.t()
    indicial = UniPoly()
    for k in range(r + 1):
        c = m.coeffs[k]
        falling = UniPoly.const(1)
        for i in range(k):
            falling = falling * (rho - i)
        if c.is_zero():
            continue
        v, val = _leading_at(c, p)
        if v < -(r - k):
            raise IrregularSingularity(
                f"irregular singular point at t = {fmt_q(p)}: coefficient of d^{k}y has a pole of "
                f"order {-v} > {r - k} in the monic form")
        if v == -(r - k):
            indicial = indicial + falling * val
    return ExponentReport(p, indicial, rational_roots(indicial))


def singular_points(L: Lode):
    """Finite rational singular points (poles of the monic coefficients), plus
    a flag telling whether the denominators have non-rational roots."""
    m = L.monic()
    den = UniPoly.const(1)
    for c in m.coeffs[:-1]:
        den = den * c.den.exact_div(poly_gcd(den, c.den))
    roots = sorted(set(rational_roots(den))) if den.degree > 0 else []
    full = UniPoly.const(1)
    for r in roots:
        full = full * UniPoly.linear_root(r) ** den.valuation_at(r)
    return roots, full.degree < den.degree


# ---------------------------------------------------------------------------
# Linear algebra over Q(t)
# ---------------------------------------------------------------------------

def solve_ratfunc(rows, rhs):
    """Solve the square system rows * x = rhs over Q(t)."""
    n = len(rows)
    A = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = None
        best = None
        for i in range(col, n):
            if not A[i][col].is_zero():
                d = A[i][col].num.degree + A[i][col].den.degree
                if best is None or d < best:
                    piv, best = i, d
        if piv is None:
            raise ZeroDivisionError("singular system over Q(t)")
        A[col], A[piv] = A[piv], A[col]
        inv = A[col][col].inv()
        A[col] = [x * inv for x in A[col]]
        for i in range(n):
            if i != col and not A[i][col].is_zero():
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[col])]
    return [A[i][n] for i in range(n)]


def _relation(vectors):
    """Given r+1 vectors of length r, find lambda with lambda_r = 1 and
    sum lambda_k v_k = 0."""
    r = len(vectors) - 1
    rows = [[vectors[k][j] for k in range(r)] for j in range(r)]
    rhs = [-vectors[r][j] for j in range(r)]
    lam = solve_ratfunc(rows, rhs)
    return lam + [ONE]


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------

def _theta_logderiv(theta) -> RatFunc:
    out = RatFunc(0)
    for root, e in theta:
        if root == INFINITY or root == "infinity":
            continue  # a factor at infinity is a constant in t
        out = out + Q(e) / (T - Q(root))
    return out


def pullback_transform(L: Lode, phi: RatFunc, theta=()) -> Lode:
    """Equation for theta(t) * y(phi(t)) where L y = 0.

    theta is a list of (root, exponent) pairs meaning prod (t - root)^exponent."""
    if not isinstance(phi, RatFunc):
        phi = RatFunc(phi)
    if phi.num.degree <= 0 and phi.den.degree <= 0:
        raise ValueError("degenerate pullback: phi is constant")
    m = L.monic()
    r = m.order
    p = [c.compose(phi) for c in m.coeffs[:-1]]
    dphi = phi.deriv()
    ld = _theta_logderiv(theta)
    vec = [ONE] + [RatFunc(0)] * (r - 1)
    vectors = [vec]
    for _ in range(r):
        new = [ld * x + x.deriv() for x in vec]
        # x_j * phi' * b_{j+1}
        for j in range(r):
            x = vec[j]
            if x.is_zero():
                continue
            f = x * dphi
            if j + 1 < r:
                new[j + 1] = new[j + 1] + f
            else:
                for i in range(r):
                    if not p[i].is_zero():
                        new[i] = new[i] - f * p[i]
        vec = new
        vectors.append(vec)
    return Lode(_relation(vectors))


def projective_transform(L: Lode, theta) -> Lode:
    return pullback_transform(L, T, theta)


def symmetric_square(L: Lode) -> Lode:
    if L.order != 2:
        raise ValueError("symmetric square needs an order 2 equation")
    m = L.monic()
    q, p = m.coeffs[0], m.coeffs[1]
    vec = [ONE, RatFunc(0), RatFunc(0)]
    vectors = [vec]
    for _ in range(3):
        u0, u1, u2 = vec
        new = [u0.deriv(), u1.deriv(), u2.deriv()]
        # d(y^2) = 2 y y'
        new[1] = new[1] + 2 * u0
        # d(y y') = y'^2 - p y y' - q y^2
        new[2] = new[2] + u1
        new[1] = new[1] - p * u1
        new[0] = new[0] - q * u1
        # d(y'^2) = -2 p y'^2 - 2 q y y'
        new[2] = new[2] - 2 * p * u2
        new[1] = new[1] - 2 * q * u2
        vec = new
        vectors.append(vec)
    return Lode(_relation(vectors))


def lode_equal(L1: Lode, L2: Lode) -> bool:
    if L1.order != L2.order:
        return False
    return L1.monic().coeffs == L2.monic().coeffs


def lode_difference(L1: Lode, L2: Lode):
    """None when equal, else a short description of the first difference."""
    if L1.order != L2.order:
        return f"orders differ: {L1.order} vs {L2.order}"
    a, b = L1.monic(), L2.monic()
    for k in range(a.order, -1, -1):
        if a.coeffs[k] != b.coeffs[k]:
            return f"coefficient of d^{k}: {a.coeffs[k]} vs {b.coeffs[k]}"
    return None


# ---------------------------------------------------------------------------
# Application to series
# ---------------------------------------------------------------------------

def lode_apply(L: Lode, S):
    """L applied to a univariate series around t = 0, denominators cleared.

    S is a TruncSeries in one variable or a GenSeries; the result is a GenSeries
    whose body order tells how far the residual is known."""
    if isinstance(S, TruncSeries):
        S = GenSeries.of(S)
    if S.nvars != 1:
        raise ValueError("lode_apply needs a univariate series")
    den = UniPoly.const(1)
    for c in L.coeffs:
        den = den * c.den.exact_div(poly_gcd(den, c.den))
    out = None
    deriv = S
    for k, c in enumerate(L.coeffs):
        if k:
            deriv = deriv.partial(0)
        poly = (c * RatFunc(den)).num
        if poly.is_zero():
            continue
        term = deriv * TruncSeries.from_poly(poly.c)
        out = term if out is None else out + term
    return out


def lode_annihilates(L: Lode, S, N: int):
    """(ok, detail): L[S] vanishes through relative degree N of the residual body."""
    res = lode_apply(L, S)
    body = res.body
    if body.order < N:
        return False, f"series known only to order {body.order}, need {N}"
    bad = [k[0] for k in body.coeffs if k[0] <= N]
    if bad:
        return False, f"residual coefficient {min(bad)} is nonzero"
    return True, None


__all__ = [
    "Lode", "euler", "hpg32", "kato", "xy2", "f2sep", "builtin_ode", "BUILTINS",
    "local_exponents", "ExponentReport", "IrregularSingularity", "rational_roots",
    "singular_points", "pullback_transform", "projective_transform", "symmetric_square",
    "lode_equal", "lode_difference", "lode_apply", "lode_annihilates", "INFINITY", "T",
]
