"""The Appell PDE systems as Weyl-algebra operators, their singular loci, and
derivation of the ODE satisfied along a rational curve by bounded linear
elimination over Q(t)."""

from __future__ import annotations

from fractions import Fraction

from .exactnum import INF, BiPoly, GenSeries, Q, RatFunc, TruncSeries, UniPoly, fmt_q
from .fuchsode import Lode
from .hyperseries import APPELL_PARAMS, AppellSpec, ExprError, parse_expr, unparse

X = BiPoly.x()
Y = BiPoly.y()
ONE = BiPoly.const(1)


class SystemId:
    def __init__(self, kind: str, params):
        spec = AppellSpec(kind, params)
        self.kind = kind
        self.p = spec.p

    def __repr__(self):
        return f"SystemId({self.kind}, {', '.join(f'{k}={fmt_q(v)}' for k, v in self.p.items())})"

    def to_json(self):
        return {"system": self.kind, "params": {k: fmt_q(v) for k, v in self.p.items()}}


class WeylOp:
    """sum over (i, j) of coefficient(x, y) * d^i/dx^i d^j/dy^j."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = {k: v for k, v in terms.items() if not v.is_zero()}

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return WeylOp(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "WeylOp":
        if isinstance(c, BiPoly):
            return WeylOp({k: v * c for k, v in self.terms.items()})
        c = Q(c)
        return WeylOp({k: v * c for k, v in self.terms.items()})

    def order(self) -> int:
        return max((i + j for i, j in self.terms), default=0)

    def __eq__(self, other):
        return isinstance(other, WeylOp) and self.terms == other.terms

    def __repr__(self):
        parts = []
        for (i, j), c in sorted(self.terms.items(), reverse=True):
            d = "".join(["Dx" * i, "Dy" * j]) or "1"
            parts.append(f"({c})*{d}")
        return "WeylOp(" + " + ".join(parts) + ")"

    def apply(self, G: GenSeries) -> GenSeries:
        """Apply to a bivariate prefactored series at the origin."""
        out = None
        cache = {(0, 0): G}

        def deriv(i, j):
            if (i, j) not in cache:
                if i:
                    cache[(i, j)] = deriv(i - 1, j).partial(0)
                else:
                    cache[(i, j)] = deriv(i, j - 1).partial(1)
            return cache[(i, j)]

        for (i, j), c in self.terms.items():
            term = deriv(i, j) * TruncSeries(2, INF, c.terms)
            out = term if out is None else out + term
        return out


def weyl_prolong(op: WeylOp, axis: str) -> WeylOp:
    """Left composition d/d(axis) o op, by the Leibniz rule."""
    di, dj = (1, 0) if axis == "x" else (0, 1)
    out = {}
    for (i, j), c in op.terms.items():
        dc = c.deriv(axis)
        if not dc.is_zero():
            out[(i, j)] = out[(i, j)] + dc if (i, j) in out else dc
        k = (i + di, j + dj)
        out[k] = out[k] + c if k in out else c
    return WeylOp(out)


def appell_system(sys: SystemId):
    p = sys.p
    if sys.kind == "F2":
        a, b1, b2, c1, c2 = (p[k] for k in APPELL_PARAMS["F2"])
        e1 = WeylOp({(2, 0): X * (1 - X), (1, 1): -(X * Y), (1, 0): c1 - (a + b1 + 1) * X,
                     (0, 1): -b1 * Y, (0, 0): BiPoly.const(-a * b1)})
        e2 = WeylOp({(0, 2): Y * (1 - Y), (1, 1): -(X * Y), (0, 1): c2 - (a + b2 + 1) * Y,
                     (1, 0): -b2 * X, (0, 0): BiPoly.const(-a * b2)})
        return [e1, e2]
    if sys.kind == "F3":
        a1, a2, b1, b2, c = (p[k] for k in APPELL_PARAMS["F3"])
        e1 = WeylOp({(2, 0): X * (1 - X), (1, 1): Y, (1, 0): c - (a1 + b1 + 1) * X,
                     (0, 0): BiPoly.const(-a1 * b1)})
        e2 = WeylOp({(0, 2): Y * (1 - Y), (1, 1): X, (0, 1): c - (a2 + b2 + 1) * Y,
                     (0, 0): BiPoly.const(-a2 * b2)})
        return [e1, e2]
    if sys.kind == "F4":
        a, b, c1, c2 = (p[k] for k in APPELL_PARAMS["F4"])
        s = a + b + 1
        e1 = WeylOp({(2, 0): X * (1 - X), (0, 2): -(Y * Y), (1, 1): -2 * (X * Y),
                     (1, 0): c1 - s * X, (0, 1): -s * Y, (0, 0): BiPoly.const(-a * b)})
        e2 = WeylOp({(0, 2): Y * (1 - Y), (2, 0): -(X * X), (1, 1): -2 * (X * Y),
                     (0, 1): c2 - s * Y, (1, 0): -s * X, (0, 0): BiPoly.const(-a * b)})
        return [e1, e2]
    a, b1, b2, c = (p[k] for k in APPELL_PARAMS["F1"])
    e1 = WeylOp({(2, 0): X * (1 - X), (1, 1): Y * (1 - X), (1, 0): c - (a + b1 + 1) * X,
                 (0, 1): -b1 * Y, (0, 0): BiPoly.const(-a * b1)})
    e2 = WeylOp({(0, 2): Y * (1 - Y), (1, 1): X * (1 - Y), (0, 1): c - (a + b2 + 1) * Y,
                 (1, 0): -b2 * X, (0, 0): BiPoly.const(-a * b2)})
    e3 = WeylOp({(1, 1): Y - X, (1, 0): BiPoly.const(b2), (0, 1): BiPoly.const(-b1)})
    return [e1, e2, e3]


# ---------------------------------------------------------------------------
# Curves and loci
# ---------------------------------------------------------------------------

def ratfunc_from_ast(ast, var="t", env=None) -> RatFunc:
    env = env or {}
    kind = ast[0]
    if kind == "num":
        return RatFunc(ast[1])
    if kind == "var":
        if ast[1] == var:
            return RatFunc.t()
        if ast[1] in env:
            return RatFunc(Q(env[ast[1]]))
        raise ExprError(f"unbound name {ast[1]!r} in a rational function of {var}")
    if kind == "neg":
        return -ratfunc_from_ast(ast[1], var, env)
    if kind in ("add", "sub", "mul", "div"):
        a = ratfunc_from_ast(ast[1], var, env)
        b = ratfunc_from_ast(ast[2], var, env)
        return {"add": a + b, "sub": a - b, "mul": a * b}[kind] if kind != "div" else a / b
    if kind == "pow":
        e = ratfunc_from_ast(ast[2], var, env)
        if not e.is_const() or e.const_value().denominator != 1:
            raise ExprError(f"only integer powers in a rational function: {unparse(ast)}")
        return ratfunc_from_ast(ast[1], var, env) ** int(e.const_value())
    raise ExprError(f"not a rational function of {var}: {unparse(ast)}")


def parse_ratfunc(text: str, var="t", env=None) -> RatFunc:
    ast, subst = parse_expr(text)
    if subst:
        raise ExprError("substitution clauses are not allowed in a rational function")
    return ratfunc_from_ast(ast, var, env)


class Curve:
    def __init__(self, x, y):
        self.x = x if isinstance(x, RatFunc) else RatFunc(x)
        self.y = y if isinstance(y, RatFunc) else RatFunc(y)
        if self.x.is_const() and self.y.is_const():
            raise ValueError("the curve is constant")
        self.dx = self.x.deriv()
        self.dy = self.y.deriv()

    @classmethod
    def parse(cls, text: str, env=None) -> "Curve":
        """'x = <ratfunc in t>; y = <ratfunc in t>'."""
        parts = [p for p in text.split(";") if p.strip()]
        got = {}
        for part in parts:
            if "=" not in part:
                raise ExprError(f"curve component {part.strip()!r} needs the form 'x = ...'")
            name, rhs = part.split("=", 1)
            name = name.strip()
            if name not in ("x", "y"):
                raise ExprError(f"curve components are x and y, not {name!r}")
            got[name] = parse_ratfunc(rhs, "t", env)
        if set(got) != {"x", "y"}:
            raise ExprError("a curve needs both x and y")
        return cls(got["x"], got["y"])

    def to_json(self):
        return {"x": str(self.x), "y": str(self.y)}

    def __repr__(self):
        return f"Curve(x={self.x}, y={self.y})"


def singular_locus(sys: SystemId):
    """(name, BiPoly) descriptors of the affine singular locus; the lines at
    infinity are reported with polynomial None."""
    k = sys.kind
    if k == "F2":
        comps = [("x", X), ("x-1", X - 1), ("y", Y), ("y-1", Y - 1), ("x+y-1", X + Y - 1)]
        inf = [("x=inf", None), ("y=inf", None)]
    elif k == "F3":
        comps = [("x", X), ("x-1", X - 1), ("y", Y), ("y-1", Y - 1), ("xy-x-y", X * Y - X - Y)]
        inf = [("x=inf", None), ("y=inf", None)]
    elif k == "F4":
        comps = [("x", X), ("y", Y),
                 ("x^2+y^2+1-2xy-2x-2y", X * X + Y * Y + 1 - 2 * (X * Y) - 2 * X - 2 * Y)]
        inf = [("line at infinity", None)]
    else:
        comps = [("x", X), ("x-1", X - 1), ("y", Y), ("y-1", Y - 1), ("y-x", Y - X)]
        inf = [("x=inf", None), ("y=inf", None)]
    return comps + inf


def curve_on_locus(sys: SystemId, curve: Curve):
    for name, poly in singular_locus(sys):
        if poly is not None and poly.at_curve(curve.x, curve.y).is_zero():
            return name
    return None


# ---------------------------------------------------------------------------
# The module M: full derivatives and specialized partial operators
# ---------------------------------------------------------------------------

class MixedElement:
    """sum_k full[k] d^k/dt^k + sum_(i,j) partial[(i,j)] dx^i dy^j over Q(t)."""

    def __init__(self, full=None, partial=None):
        self.full = {k: v for k, v in (full or {}).items() if not v.is_zero()}
        self.partial = {k: v for k, v in (partial or {}).items() if not v.is_zero()}

    def __repr__(self):
        f = " + ".join(f"[{v}]*d^{k}" for k, v in sorted(self.full.items()))
        p = " + ".join(f"[{v}]*D{i},{j}" for (i, j), v in sorted(self.partial.items()))
        return f"MixedElement({f} | {p})"


def specialize(op: WeylOp, curve: Curve) -> MixedElement:
    return MixedElement(partial={k: c.at_curve(curve.x, curve.y) for k, c in op.terms.items()})


def _full_derivative_partials(curve: Curve, r: int):
    """Partial-derivative expansions of d^k F/dt^k for k = 0..r."""
    out = [{(0, 0): RatFunc(1)}]
    cur = out[0]
    for _ in range(r):
        new = {}
        for (i, j), c in cur.items():
            dc = c.deriv()
            if not dc.is_zero():
                new[(i, j)] = new[(i, j)] + dc if (i, j) in new else dc
            for key, f in (((i + 1, j), curve.dx), ((i, j + 1), curve.dy)):
                if f.is_zero():
                    continue
                v = c * f
                new[key] = new[key] + v if key in new else v
        cur = {k: v for k, v in new.items() if not v.is_zero()}
        out.append(cur)
    return out


def full_derivative_elements(curve: Curve, r: int):
    """d^k/dt^k minus its partial-derivative expansion, for k = 1..r."""
    if r < 1:
        raise ValueError("r must be at least 1")
    exps = _full_derivative_partials(curve, r)
    return [MixedElement(full={k: RatFunc(1)}, partial={key: -v for key, v in exps[k].items()})
            for k in range(1, r + 1)]


# ---------------------------------------------------------------------------
# Elimination over Q(t)
# ---------------------------------------------------------------------------

def _weight(f: RatFunc) -> int:
    return f.num.degree + f.den.degree


class _Echelon:
    """Row echelon form over Q(t) with columns in a fixed elimination order."""

    def __init__(self, columns):
        self.columns = list(columns)
        self.pivots = []  # (column, row normalized to 1 at column)

    def reduce(self, vec):
        vec = dict(vec)
        for col, row in self.pivots:
            c = vec.get(col)
            if c is None or c.is_zero():
                continue
            for k, v in row.items():
                nv = vec[k] - c * v if k in vec else -(c * v)
                if nv.is_zero():
                    vec.pop(k, None)
                else:
                    vec[k] = nv
        return vec

    def build(self, rows):
        rows = [{k: v for k, v in r.items() if not v.is_zero()} for r in rows]
        rows = [r for r in rows if r]
        for col in self.columns:
            cand = [i for i, r in enumerate(rows) if col in r]
            if not cand:
                continue
            best = min(cand, key=lambda i: (_weight(rows[i][col]), len(rows[i])))
            prow = rows.pop(best)
            inv = prow[col].inv()
            prow = {k: v * inv for k, v in prow.items()}
            new_rows = []
            for r in rows:
                c = r.get(col)
                if c is not None:
                    for k, v in prow.items():
                        nv = r[k] - c * v if k in r else -(c * v)
                        if nv.is_zero():
                            r.pop(k, None)
                        else:
                            r[k] = nv
                if r:
                    new_rows.append(r)
            rows = new_rows
            self.pivots.append((col, prow))
        return rows  # leftovers in columns outside the order (none expected)


class NoOdeFound:
    """Outcome of a bounded search that found no relation."""

    def __init__(self, max_order, prolong_depth, detail=""):
        self.max_order = max_order
        self.prolong_depth = prolong_depth
        self.detail = detail

    def __bool__(self):
        return False

    def __repr__(self):
        return (f"NoOdeFound(no ODE found within bounds: max_order={self.max_order}, "
                f"prolong_depth={self.prolong_depth})")

    def __str__(self):
        return (f"no ODE found within bounds (max_order={self.max_order}, "
                f"prolong_depth={self.prolong_depth})")


class DegenerateRelation(ArithmeticError):
    pass


def _prolongations(ops, depth):
    out = []
    for op in ops:
        layer = {(0, 0): op}
        out.append(op)
        for d in range(1, depth + 1):
            nxt = {}
            for (i, j), w in layer.items():
                if (i + 1, j) not in nxt:
                    nxt[(i + 1, j)] = weyl_prolong(w, "x")
                if (i, j + 1) not in nxt:
                    nxt[(i, j + 1)] = weyl_prolong(w, "y")
            out.extend(nxt.values())
            layer = nxt
    return out


def _independent_relation(vectors, keys):
    """Find lambda with last entry 1 and sum lambda_k v_k = 0 over Q(t), or None.
    Raises DegenerateRelation when the earlier vectors are dependent."""
    r = len(vectors) - 1
    rows = []
    for key in keys:
        row = [v.get(key, RatFunc(0)) for v in vectors]
        if any(not x.is_zero() for x in row):
            rows.append(row)
    # Gaussian elimination on columns 0..r-1 with augmented column r
    piv_cols = []
    m = [list(row) for row in rows]
    rank_row = 0
    for col in range(r):
        piv = None
        for i in range(rank_row, len(m)):
            if not m[i][col].is_zero():
                if piv is None or _weight(m[i][col]) < _weight(m[piv][col]):
                    piv = i
        if piv is None:
            raise DegenerateRelation(f"full derivatives of order < {r} are already dependent")
        m[rank_row], m[piv] = m[piv], m[rank_row]
        inv = m[rank_row][col].inv()
        m[rank_row] = [x * inv for x in m[rank_row]]
        for i in range(len(m)):
            if i != rank_row and not m[i][col].is_zero():
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank_row])]
        piv_cols.append(col)
        rank_row += 1
    for i in range(rank_row, len(m)):
        if not m[i][r].is_zero():
            return None
    lam = [-m[i][r] for i in range(r)]
    return lam + [RatFunc(1)]


def minimal_ode(sys: SystemId, curve: Curve, max_order: int = 4, prolong_depth: int = 2):
    """Lowest order ODE in t that follows from the system along the curve,
    searching orders up to max_order with prolongations up to prolong_depth.

    Returns a Lode, or a NoOdeFound value when the bounded search fails."""
    ops = appell_system(sys)
    gens = _prolongations(ops, prolong_depth)
    rows = [specialize(w, curve).partial for w in gens]
    top = max(w.order() for w in gens)
    top = max(top, max_order)
    columns = [(i, d - i) for d in range(top, -1, -1) for i in range(d, -1, -1)]
    ech = _Echelon(columns)
    ech.build(rows)
    pivot_cols = {c for c, _ in ech.pivots}
    free = [c for c in reversed(columns) if c not in pivot_cols]
    D = _full_derivative_partials(curve, max_order)
    residuals = [ech.reduce(D[0])]
    if not residuals[0]:
        raise DegenerateRelation("the system annihilates every function along the curve")
    for r in range(1, max_order + 1):
        residuals.append(ech.reduce(D[r]))
        lam = _independent_relation(residuals, free + sorted(pivot_cols))
        if lam is not None:
            return Lode(lam)
    return NoOdeFound(max_order, prolong_depth)


# ---------------------------------------------------------------------------
# Order-2 obstruction and the F1 curve condition
# ---------------------------------------------------------------------------

def order2_obstruction(sys: SystemId, curve: Curve) -> RatFunc:
    x, y, dx, dy = curve.x, curve.y, curve.dx, curve.dy
    if sys.kind == "F2":
        return y / (1 - x) * dx * dx + 2 * dx * dy + x / (1 - y) * dy * dy
    if sys.kind == "F4":
        return dx * dx + (1 - x - y) / y * dx * dy + x / y * dy * dy
    raise ValueError("the order-2 obstruction form is defined for F2 and F4")


def f1_curve_residual(sys: SystemId, curve: Curve) -> RatFunc:
    """Left side of the F1 curve condition.  When x or y is constant along the
    curve the condition is returned multiplied by dx/dt * dy/dt, which is the
    form that stays finite there."""
    if sys.kind != "F1":
        raise ValueError("the curve condition is for F1")
    a, b1, b2, c = (sys.p[k] for k in APPELL_PARAMS["F1"])
    x, y, dx, dy = curve.x, curve.y, curve.dx, curve.dy
    if (y - x).is_zero():
        raise ValueError("the curve lies on the singular line y = x")
    for name, v in (("x", x), ("y", y)):
        if v.is_const() and v.const_value() in (0, 1):
            raise ValueError(f"the curve lies on the singular line {name} = {fmt_q(v.const_value())}")
    ddx, ddy = dx.deriv(), dy.deriv()
    xm1, ym1 = x - 1, y - 1
    u = dx / (x * xm1) - dy / (y * ym1)
    cleared = ddx * dy - ddy * dx
    cleared = cleared - (a + 1) * (dx / xm1 - dy / ym1) * dx * dy
    cleared = cleared + c * u * dx * dy
    cleared = cleared + (x * xm1 * y * ym1) / (y - x) * (dx / x - dy / y) * u \
        * (b1 * dx / xm1 + b2 * dy / ym1)
    if dx.is_zero() or dy.is_zero():
        return cleared
    return cleared / (dx * dy)


def reducibility_predicate(p):
    """Integer test on the F4 reducibility list.  Returns (verdict, witness);
    verdict is None when c1 or c2 is an integer (outside the hypothesis)."""
    if isinstance(p, SystemId):
        p = p.p
    a, b, c1, c2 = (Q(p[k]) for k in ("a", "b", "c1", "c2"))
    if c1.denominator == 1 or c2.denominator == 1:
        return None, "c1 or c2 is an integer; the criterion does not apply"
    checks = [("a", a), ("b", b), ("c1-a", c1 - a), ("c1-b", c1 - b), ("c2-a", c2 - a),
              ("c2-b", c2 - b), ("c1+c2-a", c1 + c2 - a), ("c1+c2-b", c1 + c2 - b)]
    for name, v in checks:
        if v.denominator == 1:
            return True, name
    return False, None


def solves_system(sys: SystemId, candidate: GenSeries, N: int):
    """(ok, detail): every operator annihilates the candidate through degree N."""
    if candidate.body.order < N + 2:
        raise ValueError(f"candidate known to order {candidate.body.order}; need at least {N + 2}")
    for idx, op in enumerate(appell_system(sys)):
        res = op.apply(candidate)
        ok, detail = _residual_zero(res, N)
        if not ok:
            return False, f"operator {idx + 1}: {detail}"
    return True, None


def _residual_zero(res: GenSeries, N):
    body = res.body
    if body.order < N:
        return False, f"residual known only to order {body.order}"
    bad = [k for k in body.coeffs if sum(k) <= N]
    if bad:
        return False, f"residual coefficient {min(bad, key=sum)} is nonzero"
    return True, None


class Chart:
    """Local coordinates (u, v) with x = X(u, v), y = Y(u, v).

    X and Y are GenSeries with integer prefactor exponents, so maps such as
    x = 1/u or x = 1 - v/u are allowed."""

    def __init__(self, Xs, Ys, N: int):
        self.X = Xs if isinstance(Xs, GenSeries) else GenSeries.of(Xs)
        self.Y = Ys if isinstance(Ys, GenSeries) else GenSeries.of(Ys)
        for g in (self.X, self.Y):
            if any(e.denominator != 1 for e in g.exps):
                raise ValueError("chart maps need integer prefactor exponents")
        self.Xu, self.Xv = self.X.partial(0), self.X.partial(1)
        self.Yu, self.Yv = self.Y.partial(0), self.Y.partial(1)
        det = (self.Xu * self.Yv - self.Xv * self.Yu).normalize()
        if not det.body.constant_term():
            raise ValueError("chart Jacobian is not a monomial times a unit")
        self.inv_det = det.inverse(N + 4)
        self._powers = {}

    def dx(self, G: GenSeries) -> GenSeries:
        return (G.partial(0) * self.Yv - G.partial(1) * self.Yu) * self.inv_det

    def dy(self, G: GenSeries) -> GenSeries:
        return (G.partial(1) * self.Xu - G.partial(0) * self.Xv) * self.inv_det

    def _mono(self, p, q):
        if (p, q) not in self._powers:
            out = GenSeries.of(TruncSeries.const(2, 1))
            for _ in range(p):
                out = out * self.X
            for _ in range(q):
                out = out * self.Y
            self._powers[(p, q)] = out
        return self._powers[(p, q)]

    def apply(self, op: WeylOp, G: GenSeries) -> GenSeries:
        cache = {(0, 0): G}

        def deriv(i, j):
            if (i, j) not in cache:
                cache[(i, j)] = self.dx(deriv(i - 1, j)) if i else self.dy(deriv(i, j - 1))
            return cache[(i, j)]

        out = None
        for (i, j), c in op.terms.items():
            cval = None
            for (p, q), coef in c.terms.items():
                m = self._mono(p, q) * coef
                cval = m if cval is None else cval + m
            term = deriv(i, j) * cval
            out = term if out is None else out + term
        return out


def solves_system_chart(sys: SystemId, candidate: GenSeries, chart: Chart, N: int):
    for idx, op in enumerate(appell_system(sys)):
        res = chart.apply(op, candidate)
        ok, detail = _residual_zero(res, N)
        if not ok:
            return False, f"operator {idx + 1}: {detail}"
    return True, None


__all__ = [
    "SystemId", "WeylOp", "weyl_prolong", "appell_system", "Curve", "parse_ratfunc",
    "singular_locus", "curve_on_locus", "MixedElement", "specialize", "full_derivative_elements",
    "minimal_ode", "NoOdeFound", "DegenerateRelation", "order2_obstruction", "f1_curve_residual",
    "reducibility_predicate", "solves_system", "solves_system_chart", "Chart",
]
