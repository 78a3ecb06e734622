"""Exact symbolic constants: a rational times products of Gamma values at
rationals and of rational powers of primes (and of -1).

Gauss's formula for 2F1(1) and radical prefactors like 2^(-a) produce such
constants.  Canonical forms make equality a structural comparison.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .exactnum import Q, fmt_q


def _factorint(n: int) -> dict:
    if n < 2:
        return {}
    out = {}
    for p in (2, 3, 5, 7, 11, 13):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n == 1:
        return out
    from sympy import factorint  # only for stubborn cofactors

    for p, k in factorint(n).items():
        out[int(p)] = out.get(int(p), 0) + int(k)
    return out


def _pochhammer(a: Fraction, n: int) -> Fraction:
    out = Fraction(1)
    for i in range(n):
        out *= a + i
    return out


class SymConst:
    """coeff * prod(Gamma(r)^k) * prod(p^e), kept canonical.

    Gamma atoms are stored at arguments in (0, 1); integer exponents only.
    Prime atoms carry exponents in [0, 1), and -1 carries an exponent in [0, 2).
    """

    __slots__ = ("coeff", "atoms")

    def __init__(self, coeff=1, atoms=None):
        self.coeff = Q(coeff)
        self.atoms = {}
        if atoms:
            for k, e in atoms.items():
                self._absorb(k, Fraction(e))

    @classmethod
    def one(cls):
        return cls(1)

    @classmethod
    def gamma(cls, r) -> "SymConst":
        r = Q(r)
        if r.denominator == 1:
            if r <= 0:
                raise ZeroDivisionError(f"Gamma has a pole at {r}")
            return cls(math.factorial(int(r) - 1))
        r0 = r - math.floor(r)
        out = cls(1)
        out.atoms[("G", r0)] = Fraction(1)
        k = int(r - r0)
        if k >= 0:
            out.coeff = _pochhammer(r0, k)
        else:
            out.coeff = 1 / _pochhammer(r, -k)
        return out

    def _absorb(self, key, e: Fraction):
        kind, base = key
        if kind == "G":
            if e.denominator != 1:
                raise ValueError("non-integer power of a Gamma value")
            cur = self.atoms.get(key, 0) + e
            if cur:
                self.atoms[key] = cur
            else:
                self.atoms.pop(key, None)
            return
        cur = self.atoms.get(key, 0) + e
        period = 2 if base == -1 else 1
        whole = math.floor(cur / period) * period
        rest = cur - whole
        if whole:
            self.coeff *= Fraction(base) ** int(whole)
        if rest:
            self.atoms[key] = rest
        else:
            self.atoms.pop(key, None)

    def is_rational(self) -> bool:
        return not self.atoms

    def __eq__(self, other):
        if not isinstance(other, SymConst):
            if isinstance(other, (int, Fraction)):
                return self.is_rational() and self.coeff == other
            return NotImplemented
        return self.coeff == other.coeff and self.atoms == other.atoms

    def __hash__(self):
        return hash((self.coeff, frozenset(self.atoms.items())))

    def __mul__(self, other):
        if not isinstance(other, SymConst):
            other = SymConst(other)
        out = SymConst(self.coeff * other.coeff)
        out.atoms = dict(self.atoms)
        for k, e in other.atoms.items():
            out._absorb(k, e)
        return out

    __rmul__ = __mul__

    def inverse(self) -> "SymConst":
        if not self.coeff:
            raise ZeroDivisionError("inverse of the zero constant")
        out = SymConst(1)
        for k, e in self.atoms.items():
            out._absorb(k, -e)
        # coefficient 1/c as prime powers keeps canonical form
        return out * SymConst(1 / self.coeff)

    def __truediv__(self, other):
        if not isinstance(other, SymConst):
            other = SymConst(other)
        return self * other.inverse()

    def power(self, e) -> "SymConst":
        e = Q(e)
        if e.denominator == 1:
            n = int(e)
            base = self if n >= 0 else self.inverse()
            out = SymConst(1)
            for _ in range(abs(n)):
                out = out * base
            return out
        out = SymConst(1)
        for k, x in self.atoms.items():
            out._absorb(k, x * e)
        c = self.coeff
        if not c:
            raise ZeroDivisionError("zero to a fractional power")
        if c < 0:
            out._absorb(("P", -1), e)
            c = -c
        for p, k in _factorint(c.numerator).items():
            out._absorb(("P", p), k * e)
        for p, k in _factorint(c.denominator).items():
            out._absorb(("P", p), -k * e)
        return out

    def __repr__(self):
        return f"SymConst({self})"

    def __str__(self):
        parts = [fmt_q(self.coeff)] if (self.coeff != 1 or not self.atoms) else []
        for (kind, base), e in sorted(self.atoms.items(), key=lambda kv: (kv[0][0], kv[0][1])):
            if kind == "G":
                parts.append(f"Gamma({fmt_q(base)})" + ("" if e == 1 else f"^{fmt_q(e)}"))
            else:
                parts.append(f"({base})^({fmt_q(e)})")
        return "*".join(parts)


def gauss_sum_at_one(A, B, C):
    """2F1(A,B;C;1) as a SymConst, or None when the series diverges.

    Terminating series are summed exactly (Chu-Vandermonde needs no Gamma).
    """
    A, B, C = Q(A), Q(B), Q(C)
    for up in (A, B):
        if up.denominator == 1 and up <= 0:
            total, term = Fraction(0), Fraction(1)
            for n in range(int(-up) + 1):
                total += term
                den = (C + n) * (n + 1)
                if den == 0:
                    raise ZeroDivisionError("zero lower parameter before termination")
                term = term * (A + n) * (B + n) / den
            return SymConst(total)
    if C - A - B <= 0:
        return None
    return (SymConst.gamma(C) * SymConst.gamma(C - A - B)
            / (SymConst.gamma(C - A) * SymConst.gamma(C - B)))
