"""Hypergeometric series: Pochhammer symbols, pFq and Appell F1-F4 coefficients,
exact terminating double sums, and expansion of expression trees.

Expressions are written in a small text grammar, e.g.::

    (1-x)^(-a) * F2(a; c1-b1, b2; c1, c2; x/(x-1), y/(1-x))
    pFq([1,1],[2]; t)
    (1+z^(1/2))^(-a) subst z = w^2

Identifiers that are not expansion variables are parameters, looked up in an
environment of Fractions at evaluation time.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .exactnum import INF, GenSeries, Q, TruncSeries, fmt_q
from .symconst import SymConst, gauss_sum_at_one

APPELL_PARAMS = {
    "F1": ("a", "b1", "b2", "c"),
    "F2": ("a", "b1", "b2", "c1", "c2"),
    "F3": ("a1", "a2", "b1", "b2", "c"),
    "F4": ("a", "b", "c1", "c2"),
}
# how the parameters are grouped by ';' in the text form
APPELL_GROUPS = {"F1": (1, 2, 1), "F2": (1, 2, 2), "F3": (2, 2, 1), "F4": (1, 1, 2)}


def pochhammer(a, n: int) -> Fraction:
    if n < 0:
        raise ValueError("pochhammer needs n >= 0")
    a = Q(a)
    out = Fraction(1)
    for i in range(n):
        out *= a + i
    return out


def _nonpos_int(q: Fraction) -> bool:
    return q.denominator == 1 and q <= 0


@dataclass(frozen=True)
class PfqSpec:
    upper: tuple
    lower: tuple

    def __init__(self, upper, lower):
        object.__setattr__(self, "upper", tuple(Q(u) for u in upper))
        object.__setattr__(self, "lower", tuple(Q(v) for v in lower))

    def termination(self):
        """Degree of the last nonzero term if some upper parameter is a
        non-positive integer, else None."""
        ends = [int(-u) for u in self.upper if _nonpos_int(u)]
        return min(ends) if ends else None

    def coefficient_list(self, N: int):
        out = [Fraction(1)]
        term = Fraction(1)
        for n in range(N):
            num = Fraction(1)
            for u in self.upper:
                num *= u + n
            if not num:
                out.extend([Fraction(0)] * (N - n))
                return out
            den = Fraction(n + 1)
            for v in self.lower:
                den *= v + n
            if not den:
                raise ZeroDivisionError(
                    f"zero lower Pochhammer at degree {n + 1} before termination in {self}")
            term = term * num / den
            out.append(term)
        return out

    def __str__(self):
        u = ",".join(fmt_q(x) for x in self.upper)
        v = ",".join(fmt_q(x) for x in self.lower)
        return f"pFq([{u}],[{v}])"


def pfq_series(spec: PfqSpec, N: int) -> TruncSeries:
    end = spec.termination()
    if end is not None and end <= N:
        return TruncSeries.from_poly(spec.coefficient_list(end), INF)
    return TruncSeries.from_list(spec.coefficient_list(N), N)


class AppellSpec:
    """Kind F1..F4 with its instantiated parameters."""

    def __init__(self, kind: str, params):
        if kind not in APPELL_PARAMS:
            raise ValueError(f"unknown Appell kind {kind!r}")
        names = APPELL_PARAMS[kind]
        if isinstance(params, dict):
            vals = [params[n] for n in names]
        else:
            vals = list(params)
        if len(vals) != len(names):
            raise ValueError(f"{kind} takes {len(names)} parameters")
        self.kind = kind
        self.p = dict(zip(names, (Q(v) for v in vals)))

    def __repr__(self):
        return f"AppellSpec({self.kind}, {', '.join(f'{k}={fmt_q(v)}' for k, v in self.p.items())})"

    def _factors(self):
        """(joint uppers, x uppers, y uppers, joint lowers, x lowers, y lowers)."""
        p = self.p
        if self.kind == "F1":
            return [p["a"]], [p["b1"]], [p["b2"]], [p["c"]], [], []
        if self.kind == "F2":
            return [p["a"]], [p["b1"]], [p["b2"]], [], [p["c1"]], [p["c2"]]
        if self.kind == "F3":
            return [], [p["a1"], p["b1"]], [p["a2"], p["b2"]], [p["c"]], [], []
        return [p["a"], p["b"]], [], [], [], [p["c1"]], [p["c2"]]

    def bounds(self):
        """(x bound, y bound, joint bound): largest index with a possibly
        nonzero coefficient, or None when unbounded."""
        ju, xu, yu, _, _, _ = self._factors()

        def bound(ps):
            ends = [int(-u) for u in ps if _nonpos_int(u)]
            return min(ends) if ends else None

        return bound(xu), bound(yu), bound(ju)

    def coefficient(self, n: int, m: int) -> Fraction:
        ju, xu, yu, jl, xl, yl = self._factors()
        num = Fraction(1)
        for u in ju:
            num *= pochhammer(u, n + m)
        for u in xu:
            num *= pochhammer(u, n)
        for u in yu:
            num *= pochhammer(u, m)
        if not num:
            return num
        den = Fraction(math.factorial(n) * math.factorial(m))
        for v in jl:
            den *= pochhammer(v, n + m)
        for v in xl:
            den *= pochhammer(v, n)
        for v in yl:
            den *= pochhammer(v, m)
        if not den:
            raise ZeroDivisionError(f"zero lower Pochhammer at ({n},{m}) before termination in {self}")
        return num / den

    def support(self, N=None):
        """Index pairs (n, m) to sum; N limits unbounded directions (total degree)."""
        bx, by, bj = self.bounds()
        out = []
        nmax = bx if bx is not None else (bj if bj is not None else N)
        if nmax is None:
            raise ValueError("series does not terminate in the x direction")
        for n in range(nmax + 1):
            mmax = by if by is not None else (bj - n if bj is not None else None)
            if mmax is None:
                if N is None:
                    raise ValueError("series does not terminate in the y direction")
                mmax = N - n
            if bj is not None:
                mmax = min(mmax, bj - n)
            for m in range(mmax + 1):
                out.append((n, m))
        return out

    def terminates(self) -> bool:
        bx, by, bj = self.bounds()
        return bj is not None or (bx is not None and by is not None)

    def gauss_row(self, n: int, along: str):
        """Row n of the series with the other variable set to 1:
        (rational prefactor, (A, B, C)) so that the row equals
        prefactor * 2F1(A, B; C; 1)."""
        p = self.p
        if along == "y":  # swap roles of x and y
            sw = {"F1": {"b1": p["b2"], "b2": p["b1"]},
                  "F2": {"b1": p["b2"], "b2": p["b1"], "c1": p["c2"], "c2": p["c1"]},
                  "F3": {"a1": p["a2"], "a2": p["a1"], "b1": p["b2"], "b2": p["b1"]},
                  "F4": {"c1": p["c2"], "c2": p["c1"]}}[self.kind]
            return AppellSpec(self.kind, {**p, **sw}).gauss_row(n, "x")
        f = Fraction(1, math.factorial(n))
        if self.kind == "F1":
            f *= pochhammer(p["a"], n) * pochhammer(p["b1"], n) / pochhammer(p["c"], n)
            return f, (p["a"] + n, p["b2"], p["c"] + n)
        if self.kind == "F2":
            f *= pochhammer(p["a"], n) * pochhammer(p["b1"], n) / pochhammer(p["c1"], n)
            return f, (p["a"] + n, p["b2"], p["c2"])
        if self.kind == "F3":
            f *= pochhammer(p["a1"], n) * pochhammer(p["b1"], n) / pochhammer(p["c"], n)
            return f, (p["a2"], p["b2"], p["c"] + n)
        f *= pochhammer(p["a"], n) * pochhammer(p["b"], n) / pochhammer(p["c1"], n)
        return f, (p["a"] + n, p["b"] + n, p["c2"])


def appell_series(spec: AppellSpec, N: int) -> TruncSeries:
    """Bivariate Taylor coefficients for n + m <= N (exact when terminating within N)."""
    coeffs = {}
    exact = spec.terminates()
    pairs = spec.support(N) if exact else None
    if exact and all(n + m <= N for n, m in pairs):
        for n, m in pairs:
            coeffs[(n, m)] = spec.coefficient(n, m)
        return TruncSeries(2, INF, coeffs)
    bx, by, bj = spec.bounds()
    for d in range(N + 1):
        for n in range(d + 1):
            m = d - n
            if (bx is not None and n > bx) or (by is not None and m > by) or (bj is not None and d > bj):
                continue
            coeffs[(n, m)] = spec.coefficient(n, m)
    return TruncSeries(2, N, coeffs)


def appell_terminating_eval(spec: AppellSpec, x, y):
    """Exact value of a terminating Appell series at a rational point.

    Returns (value, number of terms summed)."""
    if not spec.terminates():
        raise ValueError(f"{spec} does not terminate in both directions")
    x, y = Q(x), Q(y)
    pairs = spec.support()
    total = Fraction(0)
    for n, m in pairs:
        c = spec.coefficient(n, m)
        if c:
            total += c * x ** n * y ** m
    return total, len(pairs)


# ---------------------------------------------------------------------------
# Expression trees
# ---------------------------------------------------------------------------

class ExprError(ValueError):
    pass


class ParseError(ExprError):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text: str):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        if m.group(1):
            out.append(("num", m.group(1), m.start(1)))
        elif m.group(2):
            out.append(("id", m.group(2), m.start(2)))
        elif m.group(3):
            out.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


# AST nodes are tuples: ("num", Fraction) | ("var", name) | ("add", a, b) | ("sub", a, b)
# | ("mul", a, b) | ("div", a, b) | ("neg", a) | ("pow", a, b)
# | ("appell", kind, [param nodes], (X, Y)) | ("pfq", [upper], [lower], Z)
# | ("call", name, [args])

_CALLS = {"log", "Gamma", "poch", "fact"}


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            got = tok[1] or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", tok[2])
        self.i += 1
        return tok

    def at(self, value):
        tok = self.toks[self.i]
        return tok[0] in ("op", "id") and tok[1] == value

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            tok = self.peek()
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return node

    def expr(self):
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.take()[1]
            rhs = self.term()
            node = ("add", node, rhs) if op == "+" else ("sub", node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.at("*") or self.at("/"):
            op = self.take()[1]
            rhs = self.unary()
            node = ("mul", node, rhs) if op == "*" else ("div", node, rhs)
        return node

    def unary(self):
        if self.at("-"):
            self.take()
            return ("neg", self.unary())
        if self.at("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            self.take()
            return ("pow", base, self.unary())
        return base

    def arglist(self, closer=")"):
        """Comma separated expressions; returns groups split by ';'."""
        groups = [[]]
        if self.at(closer):
            return groups
        while True:
            groups[-1].append(self.expr())
            if self.at(","):
                self.take()
            elif self.at(";"):
                self.take()
                groups.append([])
            else:
                break
        return groups

    def bracket_list(self):
        self.take("op", "[")
        items = []
        if not self.at("]"):
            items.append(self.expr())
            while self.at(","):
                self.take()
                items.append(self.expr())
        self.take("op", "]")
        return items

    def atom(self):
        tok = self.peek()
        if tok[0] == "num":
            self.take()
            return ("num", Fraction(int(tok[1])))
        if tok[0] == "op" and tok[1] == "(":
            self.take()
            node = self.expr()
            self.take("op", ")")
            return node
        if tok[0] == "id":
            name = tok[1]
            self.take()
            if name in APPELL_PARAMS and self.at("("):
                self.take()
                groups = self.arglist()
                self.take("op", ")")
                want = APPELL_GROUPS[name]
                if len(groups) != 4 or tuple(len(g) for g in groups[:3]) != want or len(groups[3]) != 2:
                    shape = ";".join(str(k) for k in want)
                    raise ParseError(
                        f"{name} expects parameter groups of sizes {shape} then two arguments", tok[2])
                params = [p for g in groups[:3] for p in g]
                return ("appell", name, params, tuple(groups[3]))
            if name == "pFq" and self.at("("):
                self.take()
                upper = self.bracket_list()
                self.take("op", ",")
                lower = self.bracket_list()
                self.take("op", ";")
                z = self.expr()
                self.take("op", ")")
                return ("pfq", upper, lower, z)
            if name in _CALLS and self.at("("):
                self.take()
                groups = self.arglist()
                self.take("op", ")")
                if len(groups) != 1:
                    raise ParseError(f"{name} takes comma separated arguments", tok[2])
                return ("call", name, groups[0])
            return ("var", name)
        raise ParseError(f"unexpected {tok[1] or 'end of input'!r}", tok[2])


def parse_expr(text: str):
    """Parse an expression, with an optional trailing ``subst v = <poly>`` clause.

    Returns (ast, substitution dict name -> ast)."""
    subst = {}
    m = re.search(r"\bsubst\b", text)
    if m:
        body, clause = text[:m.start()], text[m.end():]
        for part in clause.split(","):
            if "=" not in part:
                raise ParseError("substitution clause needs 'name = expression'", m.end())
            name, rhs = part.split("=", 1)
            name = name.strip()
            if not re.fullmatch(r"[A-Za-z_]\w*", name):
                raise ParseError(f"bad substitution variable {name!r}", m.end())
            subst[name] = _Parser(rhs).parse()
        text = body
    return _Parser(text).parse(), subst


def free_names(ast) -> set:
    kind = ast[0]
    if kind == "num":
        return set()
    if kind == "var":
        return {ast[1]}
    if kind in ("add", "sub", "mul", "div", "pow"):
        return free_names(ast[1]) | free_names(ast[2])
    if kind == "neg":
        return free_names(ast[1])
    if kind == "call":
        parts = ast[2]
    elif kind == "pfq":
        parts = list(ast[1]) + list(ast[2]) + [ast[3]]
    else:  # appell
        parts = list(ast[2]) + list(ast[3])
    out = set()
    for q in parts:
        out |= free_names(q)
    return out


# ---------------------------------------------------------------------------
# Values during expansion
# ---------------------------------------------------------------------------

class Val:
    """const * gs, where gs is a GenSeries; coefficients of total degree
    >= div_from are divergent (they come from a divergent 2F1(1))."""

    __slots__ = ("const", "gs", "div_from")

    def __init__(self, const: SymConst, gs: GenSeries, div_from=INF):
        self.const = const
        self.gs = gs
        self.div_from = div_from

    @classmethod
    def rational(cls, nv, q):
        return cls(SymConst.one(), GenSeries.of(TruncSeries.const(nv, Q(q))))

    def as_rational(self):
        """The exact rational value of a constant, else None."""
        g = self.gs
        if not self.const.is_rational() or self.div_from != INF:
            return None
        if any(e for e in g.exps):
            if g.body.coeffs:
                return None
        if g.body.order != INF:
            return None
        if any(any(k) for k in g.body.coeffs):
            return None
        return self.const.coeff * g.body.constant_term()

    def is_zero(self):
        return self.gs.body.order == INF and not self.gs.body.coeffs


def _to_rational(v: Val, what: str, ast=None) -> Fraction:
    q = v.as_rational()
    if q is None:
        raise ExprError(f"{what} must be a rational constant" + (f": {unparse(ast)}" if ast else ""))
    return q


class Expander:
    """Evaluates an AST to a truncated series value at the origin."""

    def __init__(self, variables, env=None, N: int = 8, subst=None):
        variables = list(variables)
        self.N = N
        self.env = {k: Q(v) for k, v in (env or {}).items()}
        self.subst = dict(subst or {})
        # substituted names are expressed in the remaining active variables
        active = [v for v in variables if v not in self.subst]
        for _, rhs in self.subst.items():
            for name in sorted(free_names(rhs)):
                if name not in self.env and name not in active and name not in variables:
                    active.append(name)
        if not 1 <= len(active) <= 2:
            raise ExprError(f"expressions need one or two active variables, got {active}")
        self.active = active
        self.nv = len(active)
        self.bound = {}
        for i, name in enumerate(active):
            self.bound[name] = Val(SymConst.one(), GenSeries.of(TruncSeries.var(self.nv, i)))
        for name, rhs in self.subst.items():
            self.bound[name] = self.eval(rhs)

    def const(self, q):
        return Val.rational(self.nv, q)

    # -- arithmetic on Val -------------------------------------------------
    def add(self, a: Val, b: Val) -> Val:
        if a.is_zero():
            return b
        if b.is_zero():
            return a
        if a.const == b.const:
            return Val(a.const, a.gs + b.gs, min(a.div_from, b.div_from))
        ratio = b.const / a.const
        if ratio.is_rational():
            return Val(a.const, a.gs + b.gs * ratio.coeff, min(a.div_from, b.div_from))
        raise ExprError(f"cannot add terms with incommensurable constants {a.const} and {b.const}")

    def neg(self, a: Val) -> Val:
        return Val(a.const, -a.gs, a.div_from)

    def mul(self, a: Val, b: Val) -> Val:
        return Val(a.const * b.const, a.gs * b.gs, min(a.div_from, b.div_from))

    def inv(self, a: Val) -> Val:
        if a.is_zero():
            raise ExprError("division by zero")
        g = a.gs.normalize()
        if not g.body.constant_term():
            raise ExprError("division by a series that vanishes at the expansion point "
                            "and is not a monomial times a unit")
        return Val(a.const.inverse(), g.inverse(self.N), a.div_from)

    def power(self, a: Val, e: Fraction) -> Val:
        if e.denominator == 1 and e >= 0:
            out = self.const(1)
            for _ in range(int(e)):
                out = self.mul(out, a)
            return out
        g = a.gs.normalize()
        c0 = g.body.constant_term()
        if not c0:
            raise ExprError("rational power of a base that vanishes at the expansion point "
                            "without being a monomial times a unit")
        unit = g.body.scale(1 / c0)
        body = unit.pow_rational(e, self.N)
        exps = tuple(x * e for x in g.exps)
        const = (a.const * SymConst(c0)).power(e)
        return Val(const, GenSeries(exps, body), a.div_from)

    def log(self, a: Val) -> Val:
        g = a.gs.normalize()
        if any(g.exps) or a.const * SymConst(g.body.constant_term()) != SymConst(1):
            raise ExprError("log needs an argument equal to 1 at the expansion point")
        unit = g.body.scale(1 / g.body.constant_term())
        return Val(SymConst.one(), GenSeries.of(unit.log(self.N)), a.div_from)

    # -- evaluation ---------------------------------------------------------
    def eval(self, ast) -> Val:
        kind = ast[0]
        if kind == "num":
            return self.const(ast[1])
        if kind == "var":
            name = ast[1]
            if name in self.bound:
                return self.bound[name]
            if name in self.env:
                return self.const(self.env[name])
            raise ExprError(f"unbound name {name!r}")
        if kind in ("add", "sub"):
            a, b = self.eval(ast[1]), self.eval(ast[2])
            try:
                return self.add(a, b if kind == "add" else self.neg(b))
            except ValueError as exc:
                raise ExprError(f"{exc} in {unparse(ast)}") from None
        if kind == "neg":
            return self.neg(self.eval(ast[1]))
        if kind == "mul":
            return self.mul(self.eval(ast[1]), self.eval(ast[2]))
        if kind == "div":
            den = self.eval(ast[2])
            q = den.as_rational()
            num = self.eval(ast[1])
            if q is not None:
                if not q:
                    raise ExprError(f"division by zero: {unparse(ast[2])}")
                return Val(num.const, num.gs * (1 / q), num.div_from)
            return self.mul(num, self.inv(den))
        if kind == "pow":
            e = _to_rational(self.eval(ast[2]), "exponent", ast[2])
            base = self.eval(ast[1])
            try:
                return self.power(base, e)
            except (ExprError, ValueError, ZeroDivisionError) as exc:
                raise ExprError(f"{exc} in {unparse(ast)}") from None
        if kind == "call":
            return self._call(ast)
        if kind == "pfq":
            up = [_to_rational(self.eval(p), "pFq parameter", p) for p in ast[1]]
            lo = [_to_rational(self.eval(p), "pFq parameter", p) for p in ast[2]]
            return self._pfq(PfqSpec(up, lo), self.eval(ast[3]), ast)
        if kind == "appell":
            vals = [_to_rational(self.eval(p), f"{ast[1]} parameter", p) for p in ast[2]]
            spec = AppellSpec(ast[1], vals)
            X, Y = (self.eval(z) for z in ast[3])
            return self._appell(spec, X, Y, ast)
        raise ExprError(f"unknown node {kind}")

    def _call(self, ast) -> Val:
        name, args = ast[1], ast[2]
        if name == "log":
            if len(args) != 1:
                raise ExprError("log takes one argument")
            return self.log(self.eval(args[0]))
        vals = [_to_rational(self.eval(a), f"{name} argument", a) for a in args]
        if name == "Gamma":
            if len(vals) != 1:
                raise ExprError("Gamma takes one argument")
            return Val(SymConst.gamma(vals[0]), GenSeries.of(TruncSeries.const(self.nv, 1)))
        if name == "poch":
            if len(vals) != 2 or vals[1].denominator != 1 or vals[1] < 0:
                raise ExprError("poch(a, n) needs a non-negative integer n")
            return self.const(pochhammer(vals[0], int(vals[1])))
        if name == "fact":
            if len(vals) != 1 or vals[0].denominator != 1 or vals[0] < 0:
                raise ExprError("fact(n) needs a non-negative integer")
            return self.const(math.factorial(int(vals[0])))
        raise ExprError(f"unknown function {name}")

    def _series_of(self, v: Val, what, ast):
        """Plain truncated series of an argument (rational constant times series)."""
        if not v.const.is_rational() or v.div_from != INF:
            raise ExprError(f"{what} argument must have rational coefficients: {unparse(ast)}")
        g = v.gs
        if any(e.denominator != 1 for e in g.exps):
            raise ExprError(f"{what} argument has a fractional power prefactor: {unparse(ast)}")
        g = g.normalize() if g.body.coeffs else g
        if any(e < 0 for e in g.exps):
            raise ExprError(f"{what} argument has a pole at the expansion point: {unparse(ast)}")
        body = g.body.shift(tuple(int(e) for e in g.exps))
        return body.scale(v.const.coeff)

    def _compose1(self, coeffs, X: TruncSeries):
        N = self.N
        Xc = X.truncate(N)
        acc = TruncSeries.const(self.nv, 0)
        for c in reversed(coeffs):
            acc = (acc * Xc + c).truncate(N)
        return TruncSeries._raw(self.nv, N, acc.truncate(N).coeffs)

    def _pfq(self, spec: PfqSpec, Z: Val, ast) -> Val:
        N = self.N
        zq = Z.as_rational()
        end = spec.termination()
        if zq is not None:
            if end is not None:
                return self.const(sum((c * zq ** n for n, c in enumerate(spec.coefficient_list(end))),
                                      Fraction(0)))
            if zq == 0:
                return self.const(1)
            if zq == 1 and len(spec.upper) == 2 and len(spec.lower) == 1:
                g = gauss_sum_at_one(*spec.upper, *spec.lower)
                if g is None:
                    return Val(SymConst.one(), GenSeries.of(TruncSeries.const(self.nv, 1)), 0)
                return Val(g, GenSeries.of(TruncSeries.const(self.nv, 1)))
            raise ExprError(f"cannot evaluate a non-terminating series at {zq}: {unparse(ast)}")
        Xs = self._series_of(Z, "pFq", ast[3])
        if end is None and Xs.constant_term():
            raise ExprError(f"series argument does not vanish at the expansion point: {unparse(ast[3])}")
        coeffs = spec.coefficient_list(end if end is not None else N)
        return Val(SymConst.one(), GenSeries.of(self._compose1(coeffs, Xs)))

    def _appell(self, spec: AppellSpec, X: Val, Y: Val, ast) -> Val:
        N = self.N
        xq, yq = X.as_rational(), Y.as_rational()
        if xq is not None and yq is not None and spec.terminates():
            return self.const(appell_terminating_eval(spec, xq, yq)[0])
        # Gauss rows: one argument is the constant 1
        for one, other, along in ((yq, X, "x"), (xq, Y, "y")):
            if one == 1 and not spec.terminates():
                arg = ast[3][0] if along == "x" else ast[3][1]
                S = self._series_of(other, "Appell", arg)
                if S.constant_term():
                    raise ExprError(f"Appell argument does not vanish at the expansion point: {unparse(arg)}")
                return self._gauss_rows(spec, along, S)
        Xs = self._series_of(X, "Appell", ast[3][0])
        Ys = self._series_of(Y, "Appell", ast[3][1])
        bx, by, bj = spec.bounds()
        x0, y0 = Xs.constant_term(), Ys.constant_term()
        xlim = bx if bx is not None else bj
        ylim = by if by is not None else bj
        if x0 and xlim is None:
            raise ExprError(f"Appell argument does not vanish at the expansion point: {unparse(ast[3][0])}")
        if y0 and ylim is None:
            raise ExprError(f"Appell argument does not vanish at the expansion point: {unparse(ast[3][1])}")
        # index ranges: terminating directions use their bound, others use N
        nmax = xlim if x0 else (min(N, xlim) if xlim is not None else N)
        Xc, Yc = Xs.truncate(N), Ys.truncate(N)
        acc = TruncSeries.const(self.nv, 0)
        for n in range(nmax, -1, -1):
            mmax = ylim if y0 else (min(N, ylim) if ylim is not None else N)
            if bj is not None:
                mmax = min(mmax, bj - n)
            if not x0 and not y0:
                mmax = min(mmax, N - n)
            row = TruncSeries.const(self.nv, 0)
            for m in range(mmax, -1, -1):
                row = (row * Yc + spec.coefficient(n, m)).truncate(N)
            acc = (acc * Xc + row).truncate(N)
        return Val(SymConst.one(), GenSeries.of(TruncSeries._raw(self.nv, N, acc.truncate(N).coeffs)))

    def _gauss_rows(self, spec: AppellSpec, along: str, S: TruncSeries) -> Val:
        N = self.N
        base = None
        coeffs = []
        div_from = INF
        for n in range(N + 1):
            f, (A, B, C) = spec.gauss_row(n, along)
            if not f:
                coeffs.append(Fraction(0))
                continue
            g = gauss_sum_at_one(A, B, C)
            if g is None:
                div_from = min(div_from, n)
                coeffs.append(Fraction(0))
                continue
            g = g * SymConst(f)
            if base is None:
                base = g
                coeffs.append(Fraction(1))
                continue
            ratio = g / base
            if not ratio.is_rational():
                raise ExprError("Gauss rows are not commensurable")
            coeffs.append(ratio.coeff)
        if base is None:
            base = SymConst.one()
        body = self._compose1(coeffs, S)
        return Val(base, GenSeries.of(body), div_from)


def expr_expand(expr, variables, env=None, N: int = 8) -> Val:
    """Expand an expression (text or parsed) at the origin to total degree N."""
    if isinstance(expr, str):
        ast, subst = parse_expr(expr)
    else:
        ast, subst = expr
    ex = Expander(variables, env, N, subst)
    v = ex.eval(ast)
    body = v.gs.body
    if body.order != INF or body.degree() > N:
        v.gs = GenSeries(v.gs.exps, body.truncate(N))
    return v


def compare_vals(lhs: Val, rhs: Val, N: int):
    """Exact coefficientwise comparison to total degree N.

    Returns (ok, detail) where detail names the first mismatch."""
    for side, v in (("lhs", lhs), ("rhs", rhs)):
        if v.div_from <= N:
            return False, f"{side} coefficient of degree {v.div_from} diverges"
    a, b = lhs.gs.normalize(), rhs.gs.normalize()
    if lhs.is_zero() and rhs.is_zero():
        return True, None
    try:
        ratio = rhs.const / lhs.const
    except ZeroDivisionError:
        return False, "zero constant"
    if not ratio.is_rational():
        return False, f"constants differ: {lhs.const} vs {rhs.const}"
    try:
        diff = a - b * ratio.coeff
    except ValueError as exc:
        return False, str(exc)
    body = diff.body
    top = min(N, body.order)
    for k in sorted(body.coeffs, key=lambda k: (sum(k), k)):
        if sum(k) <= top:
            return False, f"coefficient {k} differs by {fmt_q(body.coeffs[k] * lhs.const.coeff)}" \
                if lhs.const.is_rational() else f"coefficient {k} differs"
    return True, None


def proportional_vals(lhs: Val, rhs: Val, N: int):
    """lhs * rhs0 == rhs * lhs0 with one ratio constant; returns (ok, ratio or detail)."""
    for side, v in (("lhs", lhs), ("rhs", rhs)):
        if v.div_from <= N:
            return False, f"{side} coefficient of degree {v.div_from} diverges"
    a, b = lhs.gs.normalize(), rhs.gs.normalize()
    if a.exps != b.exps:
        return False, f"leading exponents differ: {a.exps} vs {b.exps}"
    a0, b0 = a.body.constant_term(), b.body.constant_term()
    if not a0 or not b0:
        return False, "zero leading coefficient"
    diff = a.body.scale(b0) - b.body.scale(a0)
    top = min(N, diff.order)
    bad = [k for k in diff.coeffs if sum(k) <= top]
    if bad:
        return False, f"coefficient {min(bad, key=sum)} breaks proportionality"
    ratio = (rhs.const * SymConst(b0)) / (lhs.const * SymConst(a0))
    return True, str(ratio)


def unparse(ast) -> str:
    kind = ast[0]
    if kind == "num":
        return fmt_q(ast[1])
    if kind == "var":
        return ast[1]
    if kind in ("add", "sub", "mul", "div"):
        op = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[kind]
        return f"({unparse(ast[1])} {op} {unparse(ast[2])})"
    if kind == "neg":
        return f"-{unparse(ast[1])}"
    if kind == "pow":
        return f"{unparse(ast[1])}^({unparse(ast[2])})"
    if kind == "call":
        return f"{ast[1]}({', '.join(unparse(a) for a in ast[2])})"
    if kind == "pfq":
        return (f"pFq([{', '.join(unparse(a) for a in ast[1])}], "
                f"[{', '.join(unparse(a) for a in ast[2])}]; {unparse(ast[3])})")
    if kind == "appell":
        groups, i, parts = APPELL_GROUPS[ast[1]], 0, []
        for g in groups:
            parts.append(", ".join(unparse(p) for p in ast[2][i:i + g]))
            i += g
        args = ", ".join(unparse(z) for z in ast[3])
        return f"{ast[1]}({'; '.join(parts)}; {args})"
    return str(ast)


__all__ = [
    "pochhammer", "PfqSpec", "pfq_series", "AppellSpec", "appell_series",
    "appell_terminating_eval", "parse_expr", "expr_expand", "Expander", "Val",
    "ExprError", "ParseError", "compare_vals", "proportional_vals", "unparse",
    "APPELL_PARAMS",
]
