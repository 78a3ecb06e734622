"""Exact arithmetic: rationals, polynomials over Q, rational functions in t,
truncated power series in one or two variables, and series carrying a
monomial prefactor with rational exponents.

Rationals are :class:`fractions.Fraction`.  Everything here is immutable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product as _iproduct

Rational = Fraction
INF = math.inf


def Q(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot make an exact rational from {value!r}")


def fmt_q(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def is_integer(q: Fraction) -> bool:
    return q.denominator == 1


def integer_root(n: int, k: int):
    """Exact k-th root of a non-negative integer, or None."""
    if n < 0:
        return None
    if n < 2:
        return n
    r = int(round(n ** (1.0 / k))) if n.bit_length() < 1000 else 1 << (n.bit_length() // k)
    # Newton refinement on integers
    while True:
        nr = ((k - 1) * r + n // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** k == n:
            return cand
    return None


def rational_power(c: Fraction, e: Fraction) -> Fraction:
    """c**e when the result is rational; ValueError otherwise."""
    c, e = Q(c), Q(e)
    if e.denominator == 1:
        if c == 0 and e < 0:
            raise ZeroDivisionError("zero to a negative power")
        return c ** int(e)
    if c == 0:
        if e > 0:
            return Fraction(0)
        raise ZeroDivisionError("zero to a non-positive power")
    q = e.denominator
    sign = 1
    if c < 0:
        if q % 2 == 0:
            raise ValueError(f"even root of negative constant {c}")
        sign = -1
    num = integer_root(abs(c.numerator), q)
    den = integer_root(c.denominator, q)
    if num is None or den is None:
        raise ValueError(f"({c})^({e}) is not rational")
    return Fraction(sign * num, den) ** e.numerator


# ---------------------------------------------------------------------------
# Univariate polynomials
# ---------------------------------------------------------------------------

class UniPoly:
    """Dense polynomial over Q, coefficients lowest degree first."""

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        c = [Q(x) for x in coeffs]
        while c and not c[-1]:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def _raw(cls, c):
        # trusted constructor: c is a list of Fractions
        while c and not c[-1]:
            c.pop()
        p = object.__new__(cls)
        p.c = tuple(c)
        return p

    @classmethod
    def const(cls, a):
        return cls((a,))

    @classmethod
    def t(cls):
        return cls((0, 1))

    @classmethod
    def linear_root(cls, r):
        """The monic polynomial t - r."""
        return cls((-Q(r), 1))

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def lc(self) -> Fraction:
        return self.c[-1] if self.c else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self.c == other.c
        if isinstance(other, (int, Fraction)):
            return self.c == UniPoly.const(other).c
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"UniPoly({self})"

    def __str__(self):
        return poly_str(self.c, "t")

    def __neg__(self):
        return UniPoly._raw([-x for x in self.c])

    def __add__(self, other):
        if not isinstance(other, UniPoly):
            other = UniPoly.const(other)
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, x in enumerate(b):
            out[i] += x
        return UniPoly._raw(out)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, UniPoly):
            other = UniPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return UniPoly.const(other) - self

    def __mul__(self, other):
        if not isinstance(other, UniPoly):
            k = Q(other)
            if not k:
                return UniPoly()
            return UniPoly._raw([x * k for x in self.c])
        a, b = self.c, other.c
        if not a or not b:
            return UniPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return UniPoly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative polynomial power")
        result, base = UniPoly.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "UniPoly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        db = other.degree
        inv = 1 / other.c[-1]
        if len(r) - 1 < db:
            return UniPoly(), self
        q = [Fraction(0)] * (len(r) - db)
        bc = other.c
        for k in range(len(r) - 1 - db, -1, -1):
            coef = r[k + db] * inv
            q[k] = coef
            if coef:
                for j in range(db + 1):
                    r[k + j] -= coef * bc[j]
        return UniPoly._raw(q), UniPoly._raw(r[:db])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other: "UniPoly") -> "UniPoly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def monic(self) -> "UniPoly":
        if not self.c or self.c[-1] == 1:
            return self
        inv = 1 / self.c[-1]
        return UniPoly._raw([x * inv for x in self.c])

    def deriv(self) -> "UniPoly":
        return UniPoly._raw([i * x for i, x in enumerate(self.c)][1:])

    def __call__(self, x):
        acc = Fraction(0)
        for coef in reversed(self.c):
            acc = acc * x + coef
        return acc

    def compose(self, inner: "UniPoly") -> "UniPoly":
        acc = UniPoly()
        for coef in reversed(self.c):
            acc = acc * inner + coef
        return acc

    def shift(self, a) -> "UniPoly":
        """p(t + a)."""
        return self.compose(UniPoly((Q(a), 1)))

    def valuation_at(self, r) -> int:
        """Multiplicity of r as a root."""
        if self.is_zero():
            raise ValueError("valuation of the zero polynomial")
        p, k, lin = self, 0, UniPoly.linear_root(r)
        while p(r) == 0:
            p = p.exact_div(lin)
            k += 1
        return k

    def content_primitive(self):
        """Split into (rational content, integer primitive polynomial)."""
        if not self.c:
            return Fraction(0), self
        den = 1
        for x in self.c:
            den = den * x.denominator // math.gcd(den, x.denominator)
        ints = [int(x * den) for x in self.c]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        if ints[-1] < 0:
            g = -g
        return Fraction(g, den), UniPoly._raw([Fraction(v // g) for v in ints])


def poly_str(coeffs, var="t") -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and c == 1:
            s = mono
        elif mono and c == -1:
            s = "-" + mono
        else:
            s = fmt_q(c) if not mono else f"{_paren(c)}*{mono}"
        terms.append(s)
    if not terms:
        return "0"
    out = terms[0]
    for s in terms[1:]:
        out += " - " + s[1:] if s.startswith("-") else " + " + s
    return out


def _paren(c: Fraction) -> str:
    s = fmt_q(c)
    return f"({s})" if c.denominator != 1 else s


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd (zero if both are zero)."""
    if a.degree < b.degree:
        a, b = b, a
    if b.is_zero():
        return a.monic()
    if b.degree == 0:
        return UniPoly.const(1)
    # work with integer primitive parts to keep the rationals small
    a = a.content_primitive()[1]
    b = b.content_primitive()[1]
    while not b.is_zero():
        r = a % b
        if not r.is_zero():
            r = r.content_primitive()[1]
        a, b = b, r
        if b.degree == 0:
            return UniPoly.const(1)
    return a.monic()


# ---------------------------------------------------------------------------
# Rational functions in t
# ---------------------------------------------------------------------------

class RatFunc:
    """Reduced fraction of polynomials in t with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, _reduced=False):
        if not isinstance(num, UniPoly):
            num = UniPoly.const(num)
        if den is None:
            den = UniPoly.const(1)
        elif not isinstance(den, UniPoly):
            den = UniPoly.const(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced:
            if num.is_zero():
                den = UniPoly.const(1)
            else:
                g = poly_gcd(num, den)
                if g.degree > 0:
                    num = num.exact_div(g)
                    den = den.exact_div(g)
                lc = den.c[-1]
                if lc != 1:
                    inv = 1 / lc
                    num = num * inv
                    den = den * inv
        self.num = num
        self.den = den

    @classmethod
    def t(cls):
        return cls(UniPoly.t())

    @classmethod
    def const(cls, a):
        return cls(UniPoly.const(a), _reduced=True) if True else None

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_const(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise ValueError("not a constant rational function")
        return self.num.c[0] if self.num.c else Fraction(0)

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            if isinstance(other, (int, Fraction, UniPoly)):
                other = RatFunc(other)
            else:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        if self.den.degree == 0:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        return RatFunc(other)

    def __neg__(self):
        return RatFunc(-self.num, self.den, _reduced=True)

    def __add__(self, other):
        other = self._coerce(other)
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        g = poly_gcd(self.den, other.den)
        if g.degree == 0:
            return RatFunc(self.num * other.den + other.num * self.den,
                           self.den * other.den)
        bd = other.den.exact_div(g)
        ad = self.den.exact_div(g)
        return RatFunc(self.num * bd + other.num * ad, self.den * bd)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return RatFunc(0)
            return RatFunc(self.num * other, self.den, _reduced=True)
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return RatFunc(0)
        # cross-cancel before multiplying
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        n1, d2 = self.num, other.den
        if g1.degree > 0:
            n1, d2 = n1.exact_div(g1), d2.exact_div(g1)
        n2, d1 = other.num, self.den
        if g2.degree > 0:
            n2, d1 = n2.exact_div(g2), d1.exact_div(g2)
        den = d1 * d2
        num = n1 * n2
        lc = den.c[-1]
        if lc != 1:
            num, den = num * (1 / lc), den * (1 / lc)
        return RatFunc(num, den, _reduced=True)

    __rmul__ = __mul__

    def inv(self) -> "RatFunc":
        if self.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        lc = self.num.c[-1]
        return RatFunc(self.den * (1 / lc), self.num * (1 / lc), _reduced=True)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by the zero rational function")
            return RatFunc(self.num * (1 / Fraction(other)), self.den, _reduced=True)
        return self * self._coerce(other).inv()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        return RatFunc(self.num ** n, self.den ** n, _reduced=True)

    def deriv(self) -> "RatFunc":
        n, d = self.num, self.den
        return RatFunc(n.deriv() * d - n * d.deriv(), d * d)

    def __call__(self, x):
        x = Q(x)
        dv = self.den(x)
        if dv == 0:
            raise ZeroDivisionError(f"pole at t = {x}")
        return self.num(x) / dv

    def compose(self, phi: "RatFunc") -> "RatFunc":
        """self(phi(t))."""
        pn, pd = phi.num, phi.den
        deg = max(self.num.degree, self.den.degree, 0)
        powers_n = [UniPoly.const(1)]
        powers_d = [UniPoly.const(1)]
        for _ in range(deg):
            powers_n.append(powers_n[-1] * pn)
            powers_d.append(powers_d[-1] * pd)

        def hom(p):
            acc = UniPoly()
            for i, coef in enumerate(p.c):
                if coef:
                    acc = acc + powers_n[i] * powers_d[deg - i] * coef
            return acc

        return RatFunc(hom(self.num), hom(self.den))

    def valuation_at(self, r) -> int:
        """Order of vanishing at t = r (negative for a pole)."""
        if self.is_zero():
            raise ValueError("valuation of zero")
        return self.num.valuation_at(r) - self.den.valuation_at(r)

    def valuation_at_infinity(self) -> int:
        """Order of vanishing in u = 1/t at u = 0."""
        if self.is_zero():
            raise ValueError("valuation of zero")
        return self.den.degree - self.num.degree

    def taylor(self, N: int) -> "TruncSeries":
        """Taylor expansion at t = 0 to degree N."""
        if self.den(0) == 0:
            raise ValueError("rational function has a pole at t = 0")
        num = TruncSeries.from_poly(self.num.c, N)
        den = TruncSeries.from_poly(self.den.c, N)
        return num * den.inverse(N)


# ---------------------------------------------------------------------------
# Bivariate polynomials
# ---------------------------------------------------------------------------

class BiPoly:
    """Sparse polynomial in x, y over Q."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: Q(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def const(cls, a):
        return cls({(0, 0): a})

    @classmethod
    def x(cls):
        return cls({(1, 0): 1})

    @classmethod
    def y(cls):
        return cls({(0, 1): 1})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            other = BiPoly.const(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"BiPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, j), c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(s for s in (
                "" if i == 0 else ("x" if i == 1 else f"x^{i}"),
                "" if j == 0 else ("y" if j == 1 else f"y^{j}")) if s)
            parts.append(f"{_paren(c)}*{mono}" if mono else fmt_q(c))
        return " + ".join(parts)

    def __add__(self, other):
        if not isinstance(other, BiPoly):
            other = BiPoly.const(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return BiPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, BiPoly):
            other = BiPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return BiPoly.const(other) - self

    def __mul__(self, other):
        if not isinstance(other, BiPoly):
            k = Q(other)
            return BiPoly({m: v * k for m, v in self.terms.items()})
        out = {}
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, 0) + a * b
        return BiPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = BiPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def deriv(self, axis: str) -> "BiPoly":
        out = {}
        for (i, j), c in self.terms.items():
            if axis == "x" and i:
                out[(i - 1, j)] = c * i
            elif axis == "y" and j:
                out[(i, j - 1)] = c * j
        return BiPoly(out)

    def degrees(self):
        if not self.terms:
            return 0, 0
        return max(i for i, _ in self.terms), max(j for _, j in self.terms)

    def __call__(self, x, y):
        return sum((c * x ** i * y ** j for (i, j), c in self.terms.items()), Fraction(0))

    def at_curve(self, x: RatFunc, y: RatFunc) -> RatFunc:
        """p(x(t), y(t)) via a common denominator, normalized once."""
        if not self.terms:
            return RatFunc(0)
        dx, dy = self.degrees()
        xn = [UniPoly.const(1)]
        xd = [UniPoly.const(1)]
        for _ in range(dx):
            xn.append(xn[-1] * x.num)
            xd.append(xd[-1] * x.den)
        yn = [UniPoly.const(1)]
        yd = [UniPoly.const(1)]
        for _ in range(dy):
            yn.append(yn[-1] * y.num)
            yd.append(yd[-1] * y.den)
        acc = UniPoly()
        for (i, j), c in self.terms.items():
            acc = acc + xn[i] * xd[dx - i] * yn[j] * yd[dy - j] * c
        return RatFunc(acc, xd[dx] * yd[dy])


# ---------------------------------------------------------------------------
# Truncated power series
# ---------------------------------------------------------------------------

def _monomials(nvars: int, deg: int):
    if nvars == 1:
        yield (deg,)
    else:
        for i in range(deg, -1, -1):
            yield (i, deg - i)


def _graded(nvars: int, N: int):
    for d in range(N + 1):
        yield from _monomials(nvars, d)


class TruncSeries:
    """Power series in one or two variables known up to total degree ``order``.

    ``order`` may be ``INF`` for an exact polynomial.  Coefficients above the
    order are unknown and asking for them raises.
    """

    __slots__ = ("nvars", "order", "coeffs")

    def __init__(self, nvars: int, order, coeffs=None):
        if nvars not in (1, 2):
            raise ValueError("series in one or two variables only")
        self.nvars = nvars
        self.order = order
        cs = {}
        for k, v in (coeffs or {}).items():
            if isinstance(k, int):
                k = (k,)
            if sum(k) <= order and v:
                cs[k] = Q(v)
        self.coeffs = cs

    @classmethod
    def _raw(cls, nvars, order, coeffs):
        s = object.__new__(cls)
        s.nvars, s.order, s.coeffs = nvars, order, coeffs
        return s

    @classmethod
    def const(cls, nvars, c, order=INF):
        return cls(nvars, order, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars, index, order=INF):
        key = [0] * nvars
        key[index] = 1
        return cls(nvars, order, {tuple(key): 1})

    @classmethod
    def from_poly(cls, coeffs, N=INF):
        return cls(1, N, {(i,): c for i, c in enumerate(coeffs)})

    @classmethod
    def from_list(cls, coeffs, N=None):
        N = len(coeffs) - 1 if N is None else N
        return cls(1, N, {(i,): c for i, c in enumerate(coeffs)})

    def __getitem__(self, key):
        if isinstance(key, int):
            key = (key,)
        if sum(key) > self.order:
            raise IndexError(f"coefficient {key} is beyond the truncation order {self.order}")
        return self.coeffs.get(key, Fraction(0))

    def coefficient_list(self):
        if self.nvars != 1 or self.order == INF and not self.coeffs:
            pass
        top = self.order if self.order != INF else max((k[0] for k in self.coeffs), default=0)
        return [self[i] for i in range(int(top) + 1)]

    def constant_term(self) -> Fraction:
        return self.coeffs.get((0,) * self.nvars, Fraction(0))

    def is_exact(self) -> bool:
        return self.order == INF

    def degree(self) -> int:
        return max((sum(k) for k in self.coeffs), default=-1)

    def truncate(self, N) -> "TruncSeries":
        N = min(N, self.order)
        return TruncSeries._raw(self.nvars, N, {k: v for k, v in self.coeffs.items() if sum(k) <= N})

    def is_zero(self, upto=None) -> bool:
        upto = self.order if upto is None else upto
        if upto > self.order:
            raise ValueError(f"cannot certify zero to degree {upto}; known only to {self.order}")
        return all(sum(k) > upto for k in self.coeffs)

    def first_nonzero(self):
        if not self.coeffs:
            return None
        return min(self.coeffs, key=lambda k: (sum(k), tuple(-x for x in k)))

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self.nvars, self.order, self.coeffs) == (other.nvars, other.order, other.coeffs)

    def __repr__(self):
        return f"TruncSeries({self})"

    def __str__(self):
        names = ("t",) if self.nvars == 1 else ("x", "y")
        parts = []
        for k in sorted(self.coeffs, key=lambda k: (sum(k), tuple(-x for x in k))):
            c = self.coeffs[k]
            mono = "*".join(
                (n if e == 1 else f"{n}^{e}") for n, e in zip(names, k) if e)
            if mono and c in (1, -1):
                parts.append(mono if c == 1 else "-" + mono)
            else:
                parts.append(f"{_paren(c)}*{mono}" if mono else fmt_q(c))
        body = " + ".join(parts) if parts else "0"
        return body if self.order == INF else f"{body} + O({self.order + 1})"

    def _check(self, other):
        if not isinstance(other, TruncSeries):
            return TruncSeries.const(self.nvars, Q(other))
        if other.nvars != self.nvars:
            raise ValueError("mixing series in different numbers of variables")
        return other

    def __add__(self, other):
        other = self._check(other)
        N = min(self.order, other.order)
        out = {k: v for k, v in self.coeffs.items() if sum(k) <= N}
        for k, v in other.coeffs.items():
            if sum(k) <= N:
                s = out.get(k, 0) + v
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return TruncSeries._raw(self.nvars, N, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries._raw(self.nvars, self.order, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def scale(self, c) -> "TruncSeries":
        c = Q(c)
        if not c:
            return TruncSeries._raw(self.nvars, self.order, {})
        return TruncSeries._raw(self.nvars, self.order, {k: v * c for k, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._check(other)
        # a series of valuation v known to order N determines the product to N + v'
        va = min((sum(k) for k in self.coeffs), default=INF)
        vb = min((sum(k) for k in other.coeffs), default=INF)
        N = min(self.order + vb, other.order + va)
        if N == INF and (self.order != INF or other.order != INF):
            N = min(self.order, other.order)  # zero factor with finite order
        out = {}
        if self.nvars == 1:
            for (i,), a in self.coeffs.items():
                for (j,), b in other.coeffs.items():
                    if i + j <= N:
                        k = (i + j,)
                        out[k] = out.get(k, 0) + a * b
        else:
            for (i1, j1), a in self.coeffs.items():
                for (i2, j2), b in other.coeffs.items():
                    if i1 + i2 + j1 + j2 <= N:
                        k = (i1 + i2, j1 + j2)
                        out[k] = out.get(k, 0) + a * b
        return TruncSeries._raw(self.nvars, N, {k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("use inverse() or pow_rational for negative powers")
        out = TruncSeries.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, mono) -> "TruncSeries":
        """Multiply by the monomial with exponent tuple ``mono`` (non-negative)."""
        d = sum(mono)
        out = {tuple(a + b for a, b in zip(k, mono)): v for k, v in self.coeffs.items()}
        return TruncSeries._raw(self.nvars, self.order + d, out)

    def unshift(self, mono) -> "TruncSeries":
        """Divide by a monomial that divides every known coefficient."""
        d = sum(mono)
        out = {}
        for k, v in self.coeffs.items():
            nk = tuple(a - b for a, b in zip(k, mono))
            if min(nk) < 0:
                raise ArithmeticError("monomial does not divide the series")
            out[nk] = v
        return TruncSeries._raw(self.nvars, self.order - d, out)

    def _target(self, N):
        N = self.order if N is None else min(N, self.order)
        if N == INF:
            raise ValueError("an explicit truncation order is required")
        return N

    def inverse(self, N=None) -> "TruncSeries":
        c0 = self.constant_term()
        if not c0:
            raise ZeroDivisionError("non-unit base: zero constant term")
        N = self._target(N)
        inv0 = 1 / c0
        items = [(k, v) for k, v in self.coeffs.items() if any(k) and sum(k) <= N]
        out = {(0,) * self.nvars: inv0}
        for m in _graded(self.nvars, N):
            if not any(m):
                continue
            acc = Fraction(0)
            for e, a in items:
                r = tuple(x - y for x, y in zip(m, e))
                if min(r) >= 0:
                    b = out.get(r)
                    if b:
                        acc += a * b
            if acc:
                out[m] = -acc * inv0
        return TruncSeries._raw(self.nvars, N, out)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / Fraction(other))
        other = self._check(other)
        N = min(self.order, other.order)
        return self * other.inverse(N)

    def pow_rational(self, e, N=None) -> "TruncSeries":
        """S**e for S with a nonzero constant term (principal branch)."""
        e = Q(e)
        if e.denominator == 1 and e >= 0 and self.order == INF and N is None:
            return self ** int(e)
        c0 = self.constant_term()
        if not c0:
            raise ValueError("non-unit base: zero constant term")
        N = self._target(N)
        items = [(k, v) for k, v in self.coeffs.items() if any(k) and sum(k) <= N]
        out = {(0,) * self.nvars: rational_power(c0, e)}
        inv0 = 1 / c0
        for m in _graded(self.nvars, N):
            d = sum(m)
            if d == 0:
                continue
            acc = Fraction(0)
            for k, a in items:
                r = tuple(x - y for x, y in zip(m, k))
                if min(r) >= 0:
                    b = out.get(r)
                    if b:
                        acc += a * b * (e * sum(k) - sum(r))
            if acc:
                out[m] = acc * inv0 / d
        return TruncSeries._raw(self.nvars, N, out)

    def log(self, N=None) -> "TruncSeries":
        """log S for S with constant term 1."""
        if self.constant_term() != 1:
            raise ValueError("log needs constant term 1")
        N = self._target(N)
        items = [(k, v) for k, v in self.coeffs.items() if any(k) and sum(k) <= N]
        out = {}
        for m in _graded(self.nvars, N):
            d = sum(m)
            if d == 0:
                continue
            acc = d * self.coeffs.get(m, 0)
            for k, a in items:
                r = tuple(x - y for x, y in zip(m, k))
                if min(r) >= 0 and any(r):
                    b = out.get(r)
                    if b:
                        acc -= a * b * sum(r)
            if acc:
                out[m] = Fraction(acc) / d
        return TruncSeries._raw(self.nvars, N, out)

    def partial(self, index: int = 0) -> "TruncSeries":
        out = {}
        for k, v in self.coeffs.items():
            if k[index]:
                nk = list(k)
                nk[index] -= 1
                out[tuple(nk)] = v * k[index]
        return TruncSeries._raw(self.nvars, self.order - 1, out)

    def evaluate(self, point):
        """Exact value of a polynomial (exact series) at a rational point."""
        if self.order != INF:
            raise ValueError("only exact polynomials can be evaluated at a point")
        point = [Q(p) for p in point]
        return sum((v * math_prod(p ** e for p, e in zip(point, k))
                    for k, v in self.coeffs.items()), Fraction(0))


def math_prod(it):
    out = Fraction(1)
    for x in it:
        out *= x
    return out


def series_pow_rational(S: TruncSeries, e, N=None) -> TruncSeries:
    return S.pow_rational(e, N)


def series_compose(outer: TruncSeries, inner, N=None) -> TruncSeries:
    """outer(inner) for univariate outer, or outer(inner[0], inner[1]) for bivariate outer.

    A non-polynomial outer needs inner series vanishing at the origin.
    """
    if isinstance(inner, TruncSeries):
        inner = (inner,)
    inner = tuple(inner)
    if len(inner) != outer.nvars:
        raise ValueError("number of inner series does not match the outer series")
    nv = inner[0].nvars
    if outer.order != INF:
        for s in inner:
            if s.constant_term():
                raise ValueError("composition point mismatch: inner series has a nonzero constant term")
    target = min(s.order for s in inner)
    if outer.order != INF:
        target = min(target, outer.order)
    if N is not None:
        target = min(target, N)
    if target == INF:
        target_cut = None
    else:
        target_cut = target

    def cut(s):
        return s if target_cut is None else s.truncate(target_cut)

    if outer.nvars == 1:
        top = outer.degree()
        acc = TruncSeries.const(nv, 0)
        X = cut(inner[0])
        for n in range(top, -1, -1):
            acc = cut(acc * X + outer.coeffs.get((n,), 0))
        res = acc
    else:
        X, Y = cut(inner[0]), cut(inner[1])
        rows = {}
        for (n, m), c in outer.coeffs.items():
            rows.setdefault(n, {})[m] = c
        topn = max(rows, default=0)
        acc = TruncSeries.const(nv, 0)
        for n in range(topn, -1, -1):
            row = rows.get(n, {})
            p = TruncSeries.const(nv, 0)
            for m in range(max(row, default=0), -1, -1):
                p = cut(p * Y + row.get(m, 0))
            acc = cut(acc * X + p)
        res = acc
    if target_cut is not None:
        res = res.truncate(target_cut)
        res = TruncSeries._raw(res.nvars, target_cut, res.coeffs)
    return res


# ---------------------------------------------------------------------------
# Series with a monomial prefactor
# ---------------------------------------------------------------------------

class GenSeries:
    """x^alpha * y^beta * body, with rational exponents and a truncated body.

    For one variable only ``alpha`` is used.
    """

    __slots__ = ("exps", "body")

    def __init__(self, exps, body: TruncSeries):
        exps = tuple(Q(e) for e in exps)
        if len(exps) != body.nvars:
            raise ValueError("one prefactor exponent per variable")
        self.exps = exps
        self.body = body

    @classmethod
    def of(cls, body: TruncSeries):
        return cls((0,) * body.nvars, body)

    @property
    def alpha(self):
        return self.exps[0]

    @property
    def beta(self):
        return self.exps[1] if len(self.exps) > 1 else Fraction(0)

    @property
    def nvars(self):
        return self.body.nvars

    @property
    def order(self):
        return self.body.order

    def __repr__(self):
        names = ("x", "y")
        pre = "*".join(f"{n}^({fmt_q(e)})" for n, e in zip(names, self.exps) if e)
        return f"GenSeries({pre + '*' if pre else ''}[{self.body}])"

    def normalize(self) -> "GenSeries":
        """Pull the largest monomial dividing the known body into the prefactor."""
        cs = self.body.coeffs
        if not cs:
            return self
        low = tuple(min(k[i] for k in cs) for i in range(self.nvars))
        if not any(low):
            return self
        return GenSeries(tuple(e + l for e, l in zip(self.exps, low)), self.body.unshift(low))

    def _align(self, other: "GenSeries"):
        if other.nvars != self.nvars:
            raise ValueError("mixing series in different numbers of variables")
        base = []
        for a, b in zip(self.exps, other.exps):
            if (a - b).denominator != 1:
                raise ValueError(f"prefactor exponents {a} and {b} differ by a non-integer")
            base.append(min(a, b))
        s1 = tuple(int(a - m) for a, m in zip(self.exps, base))
        s2 = tuple(int(b - m) for b, m in zip(other.exps, base))
        return tuple(base), self.body.shift(s1), other.body.shift(s2)

    def __add__(self, other):
        if not isinstance(other, GenSeries):
            other = GenSeries.of(TruncSeries.const(self.nvars, Q(other)))
        base, a, b = self._align(other)
        return GenSeries(base, a + b)

    __radd__ = __add__

    def __neg__(self):
        return GenSeries(self.exps, -self.body)

    def __sub__(self, other):
        if not isinstance(other, GenSeries):
            other = GenSeries.of(TruncSeries.const(self.nvars, Q(other)))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GenSeries(self.exps, self.body.scale(other))
        if isinstance(other, TruncSeries):
            other = GenSeries.of(other)
        return GenSeries(tuple(a + b for a, b in zip(self.exps, other.exps)),
                         self.body * other.body)

    __rmul__ = __mul__

    def inverse(self, N=None) -> "GenSeries":
        g = self.normalize()
        return GenSeries(tuple(-e for e in g.exps), g.body.inverse(N))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return GenSeries(self.exps, self.body.scale(1 / Fraction(other)))
        if isinstance(other, TruncSeries):
            other = GenSeries.of(other)
        N = min(self.order, other.order)
        return self * other.inverse(N if N != INF else None)

    def pow_rational(self, e, N=None) -> "GenSeries":
        e = Q(e)
        g = self.normalize()
        if e.denominator == 1 and e >= 0 and g.body.order == INF and N is None:
            return GenSeries(tuple(x * e for x in g.exps), g.body ** int(e))
        return GenSeries(tuple(x * e for x in g.exps), g.body.pow_rational(e, N))

    def shift(self, mono) -> "GenSeries":
        return GenSeries(tuple(e + Q(m) for e, m in zip(self.exps, mono)), self.body)

    def partial(self, index: int = 0) -> "GenSeries":
        """d/d(var index) via the product rule on the prefactor."""
        a = self.exps[index]
        body = self.body
        # (a * body + v * d body / dv) * v^(a-1)
        unit = [0] * self.nvars
        unit[index] = 1
        term = body.partial(index).shift(tuple(unit))
        term = TruncSeries._raw(term.nvars, body.order, term.coeffs)
        new = body.scale(a) + term
        exps = list(self.exps)
        exps[index] = a - 1
        return GenSeries(tuple(exps), new)

    def is_zero(self, upto=None) -> bool:
        return self.body.is_zero(upto)

    def equals(self, other: "GenSeries", upto=None):
        """Compare two prefactored series; returns (ok, first mismatch or None)."""
        diff = self - other
        N = diff.body.order if upto is None else upto
        for k in sorted(diff.body.coeffs, key=sum):
            if sum(k) <= N:
                return False, k
        return True, None


def gen_series_partial(G: GenSeries, axis: str) -> GenSeries:
    return G.partial(0 if axis == "x" else 1)


def ratfunc_normalize(p: UniPoly, q: UniPoly) -> RatFunc:
    return RatFunc(p, q)


__all__ = [
    "Rational", "Q", "INF", "fmt_q", "is_integer", "rational_power",
    "UniPoly", "poly_gcd", "RatFunc", "BiPoly", "TruncSeries", "GenSeries",
    "series_pow_rational", "series_compose", "gen_series_partial", "ratfunc_normalize",
]
