"""Registry of identities and same-equation claims, with a sampling driver.

Each record pairs two sides and a verification mode:

Exact          both expressions expand to the same truncated series
Proportional   the expansions agree up to one constant factor
SameOde        two ODE recipes give the same monic equation
SolvesSystem   a candidate series is annihilated by an Appell system
ExpectFail     like Exact, but the comparison must find a mismatch
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .appellpde import (Chart, Curve, DegenerateRelation, SystemId, minimal_ode, parse_ratfunc,
                        ratfunc_from_ast, solves_system_chart)
from .exactnum import INF, GenSeries, Q, fmt_q
from .fuchsode import builtin_ode, lode_difference, lode_equal, projective_transform, \
    pullback_transform, symmetric_square
from .hyperseries import (AppellSpec, ExprError, appell_terminating_eval, compare_vals,
                          expr_expand, parse_expr, proportional_vals)

MODES = ("Exact", "Proportional", "SameOde", "SolvesSystem", "ExpectFail")
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class IdentityRecord:
    id: str
    mode: str
    lhs: object
    rhs: object
    variables: tuple = ("x", "y")
    free: tuple = ()
    derived: tuple = ()       # (name, expression in earlier names)
    domains: dict = field(default_factory=dict)  # name -> ("int", lo, hi) | ("range", lo, hi)
    nonint: tuple = ()        # extra expressions that must not be integers
    positive: tuple = ()      # expressions that must be positive
    N: int = 8
    quote: str = ""
    term_count: tuple = None  # (kind, parameter expressions) of a terminating Appell sum

    def to_json(self):
        out = {
            "id": self.id, "mode": self.mode, "lhs": self.lhs, "rhs": self.rhs,
            "variables": list(self.variables), "free": list(self.free),
            "constraints": [f"{k} = {v}" for k, v in self.derived],
            "domains": {k: list(v) for k, v in self.domains.items()},
            "nonint": list(self.nonint), "positive": list(self.positive),
            "N": self.N, "provenance": self.quote,
        }
        return out


@dataclass
class VerificationReport:
    id: str
    sample: dict
    outcome: str              # pass | fail | rejected
    detail: str = None
    elapsed: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.outcome == "pass"

    def to_json(self):
        return {"id": self.id, "sample": {k: fmt_q(v) for k, v in self.sample.items()},
                "outcome": self.outcome, "detail": self.detail,
                "elapsed": round(self.elapsed, 4), **self.extra}


# ---------------------------------------------------------------------------
# Helpers for writing records
# ---------------------------------------------------------------------------

def _mo(system, params, curve, theta=None):
    r = {"kind": "minimal_ode", "system": system, "params": params, "curve": curve}
    if theta:
        r["theta"] = theta
    return r


def _bi(name, *params):
    return {"kind": "builtin", "name": name, "params": list(params)}


def _pb(of, phi, theta=()):
    return {"kind": "pullback", "of": of, "phi": phi, "theta": [list(x) for x in theta]}


def _sq(of):
    return {"kind": "symsq", "of": of}


def _ss(system, params, candidate_chart=None):
    return {"system": system, "params": params, "chart": candidate_chart}


F1P = {"a": "a", "b1": "b1", "b2": "b2", "c": "c"}
F2P = {"a": "a", "b1": "b1", "b2": "b2", "c1": "c1", "c2": "c2"}
F3P = {"a1": "a1", "a2": "a2", "b1": "b1", "b2": "b2", "c": "c"}
F4P = {"a": "a", "b": "b", "c1": "c1", "c2": "c2"}
# upper minus lower parameter differences of the y=0 and y=1 restrictions; an integer
# there makes the restricted equation reducible and the minimal ODE can drop in order
F2_RED = ("c1-a", "c1-b1", "c1+c2-a", "c2-b2", "a+b2-c2-b1", "a+b1+b2-c1-c2")
F3_RED = ("c-a1", "c-b1", "c-a1-a2", "c-a2-b1", "c-a1-b2", "c-b1-b2", "a1+a2+b1+b2-c")
# 3F2(2a, 2b, c; a+b+1/2, 2c): upper minus lower differences
A4HPG3_NONINT = ("2*a", "2*b", "2*c", "a+b+1/2", "a-b", "a+b+1/2-c", "a-b+1/2", "b-a+1/2",
                 "2*c-2*a", "2*c-2*b")
KATO_NONINT = ("c1-a", "c1-b", "c2-a", "c2-b", "c1+c2-a", "c1+c2-b", "a-b", "c1+c2-a-b",
               "2*c1", "2*c2", "c2-a-b", "c1-a-b", "2*a-2*b", "2*c1+2*c2-2*a", "2*c1+2*c2-2*b")

_F1Q0 = _mo("F1", {"a": "a", "b1": "2*b", "b2": "a-b", "c": "1+b"}, "x=t; y=t^2")
_F1Q_NONINT = ("2*b", "a-b", "2*a", "a-2*b", "2*a-2*b", "a+b")

DIH_F2 = "F2(a; -k, -l; -2*k, -2*l; {x}, {y})"


def _dih_rhs(sign, swap=False):
    p = "(1+w)^(-a)/2*" + DIH_F2.format(x="2*w/(1+w)", y="2/(1+w)")
    m = "(1-w)^(-a)/2*" + DIH_F2.format(x="2*w/(w-1)", y="2/(1-w)")
    if swap:
        p, m = m, p
    return f"{p} {sign} {m}"


def _records():
    R = []
    add = R.append
    # ---- Exact: separation and bridging identities --------------------------------
    add(IdentityRecord(
        "bailey-separation", "Exact",
        "F4(a; b; c, a+b-c+1; x*(1-y), y*(1-x))",
        "pFq([a, b], [c]; x) * pFq([a, b], [a+b-c+1]; y)",
        free=("a", "b", "c"), quote="the well-known Bailey case of variable separation"))
    f2sep_lhs = "F2(b1+b2-1/2; b1, b2; 2*b1, 2*b2; 4*(1-s^2)*t/(1+s+t-s*t)^2, 4*(1-t^2)*s/(1+s+t-s*t)^2)"
    f2sep_rhs = ("((1+s+t-s*t)/(1-s))^(2*b1+2*b2-1) * pFq([b1+b2-1/2, b2], [2*b2]; {z})"
                 " * pFq([b1+b2-1/2, b2], [b1+1/2]; t^2)")
    for rid, mode, z in (("f2-separation", "Exact", "-4*s/(s-1)^2"),
                         ("f2-separation-as-printed", "ExpectFail", "4*s/(s^2-1)")):
        add(IdentityRecord(
            rid, mode, f2sep_lhs, f2sep_rhs.format(z=z),
            variables=("t", "s"), free=("b1", "b2"), nonint=("b1+b2", "2*b1", "2*b2"),
            quote="One can check this identity by comparing low degree terms"))
    add(IdentityRecord(
        "f2f4-bridge", "Exact",
        "F4(a; b; 2*b, a-b+1; x, y^2)",
        "(1+y)^(-2*a) * F2(a; b, a-b+1/2; 2*b, 2*a-2*b+1; x/(1+y)^2, 4*y/(1+y)^2)",
        free=("a", "b"), nonint=("2*b", "a-b", "2*a-2*b"),
        quote="This identity is derived by Srivastava"))
    add(IdentityRecord(
        "f2f4-bridge-2", "Exact",
        "F4(a/2; (a+1)/2; b1+1/2, b2+1/2; x^2, y^2)",
        "(1+x+y)^(-a) * F2(a; b1, b2; 2*b1, 2*b2; 2*x/(x+y+1), 2*y/(x+y+1))",
        free=("a", "b1", "b2"), nonint=("2*b1", "2*b2", "b1+1/2", "b2+1/2"),
        quote="identity between F4 and F2 functions is implied"))
    add(IdentityRecord(
        "f1-f3", "Exact",
        "F1(a; b1, b2; c; x, y)",
        "(1-x)^(-b1) * F3(c-a, a; b1, b2; c; x/(x-1), y)",
        free=("a", "b1", "b2", "c"), quote="Using the identity"))
    # ---- Exact: F2 solution quartet ----------------------------------------------
    for i, rhs in enumerate((
            "(1-x)^(-a) * F2(a; c1-b1, b2; c1, c2; x/(x-1), y/(1-x))",
            "(1-y)^(-a) * F2(a; b1, c2-b2; c1, c2; x/(1-y), y/(y-1))",
            "(1-x-y)^(-a) * F2(a; c1-b1, c2-b2; c1, c2; x/(x+y-1), y/(x+y-1))"), 1):
        add(IdentityRecord(
            f"f2-quartet-{i}", "Exact", "F2(a; b1, b2; c1, c2; x, y)", rhs,
            free=("a", "b1", "b2", "c1", "c2"),
            quote="each Appell's F2(x,y) function can be represented by four F2 series at the origin"))
    # ---- Exact: F1 sextet ---------------------------------------------------------
    for i, rhs in enumerate((
            "(1-x)^(-b1)*(1-y)^(-b2) * F1(c-a; b1, b2; c; x/(x-1), y/(y-1))",
            "(1-x)^(-a) * F1(a; c-b1-b2, b2; c; x/(x-1), (x-y)/(x-1))",
            "(1-y)^(-a) * F1(a; b1, c-b1-b2; c; (x-y)/(1-y), y/(y-1))",
            "(1-x)^(c-a-b1)*(1-y)^(-b2) * F1(c-a; c-b1-b2, b2; c; x, (x-y)/(1-y))",
            "(1-x)^(-b1)*(1-y)^(c-a-b2) * F1(c-a; b1, c-b1-b2; c; (x-y)/(x-1), y)"), 1):
        add(IdentityRecord(
            f"f1-sextet-{i}", "Exact", "F1(a; b1, b2; c; x, y)", rhs,
            free=("a", "b1", "b2", "c"), nonint=("c-b1-b2", "c-a"),
            quote="the F1 solutions are identified in sextets"))
    add(IdentityRecord(
        "f1-line-y0", "Exact", "F1(a; b1, b2; c; x, 0)", "pFq([a, b1], [c]; x)",
        variables=("x",), free=("a", "b1", "b2", "c"),
        quote="Univariate specializations to the singular lines are known"))
    add(IdentityRecord(
        "f1-line-diagonal", "Exact", "F1(a; b1, b2; c; x, x)", "pFq([a, b1+b2], [c]; x)",
        variables=("x",), free=("a", "b1", "b2", "c"),
        quote="Univariate specializations to the singular lines are known"))
    # ---- Exact: dihedral functions ------------------------------------------------
    add(IdentityRecord(
        "dihedral-half", "Exact",
        "pFq([a/2, (a+1)/2], [1/2]; z) subst z = w^2",
        "((1-w)^(-a) + (1+w)^(-a))/2",
        variables=("w",), free=("a",), quote="An example of such an elementary expression is"))
    add(IdentityRecord(
        "dihedral-three-halves", "Exact",
        "pFq([(a+1)/2, (a+2)/2], [3/2]; z) subst z = w^2",
        "((1-w)^(-a) - (1+w)^(-a))/(2*a*w)",
        variables=("w",), free=("a",), quote="Relatedly"))
    add(IdentityRecord(
        "dihedral-log", "Exact",
        "pFq([1/2, 1], [3/2]; z) subst z = w^2",
        "(log(1+w) - log(1-w))/(2*w)",
        variables=("w",), quote="Relatedly"))
    add(IdentityRecord(
        "dihedral-sqrt", "Exact",
        "pFq([a/2, (a+1)/2], [a+1]; z) subst z = 2*w - w^2",
        "((2-w)/2)^(-a)",
        variables=("w",), free=("a",), quote="Relatedly"))
    ints = {"k": ("int", 0, 3), "l": ("int", 0, 3)}
    add(IdentityRecord(
        "dih12", "Exact",
        "poch((a+1)/2, l)/poch(1/2, l) * pFq([a/2, (a+1)/2+l], [1/2-k]; z) subst z = w^2",
        _dih_rhs("+"),
        variables=("w",), free=("a", "k", "l"), domains=ints, nonint=("2*a",),
        term_count=("F2", ("a", "-k", "-l", "-2*k", "-2*l")),
        quote="The F2 series on the right-hand side are finite sums with (k+1)(l+1) terms"))
    add(IdentityRecord(
        "dih32", "Exact",
        "poch((a+1)/2, k)*poch(a/2, k+l+1)/(poch(1/2, k)*poch(1/2, k+1)*poch(1/2, l))"
        " * (-1)^k * w^(2*k+1) * pFq([(a+1)/2+k, a/2+k+l+1], [3/2+k]; z) subst z = w^2",
        _dih_rhs("-", swap=True),
        variables=("w",), free=("a", "k", "l"), domains=ints, nonint=("2*a",),
        term_count=("F2", ("a", "-k", "-l", "-2*k", "-2*l")),
        quote="Similarly, a generalization of"))
    add(IdentityRecord(
        "dih32-as-printed", "ExpectFail",
        "poch((a+1)/2, k)*poch(a/2, k+l+1)/(poch(1/2, k)*poch(1/2, k+1)*poch(1/2, l))"
        " * (-1)^k * w^(2*k+1) * pFq([(a+1)/2+k, a/2+k+l+1], [3/2+k]; z) subst z = w^2",
        _dih_rhs("-"),
        variables=("w",), free=("a", "k", "l"), domains=ints, nonint=("2*a",),
        term_count=("F2", ("a", "-k", "-l", "-2*k", "-2*l")),
        quote="Similarly, a generalization of"))
    add(IdentityRecord(
        "diha2", "Exact",
        "pFq([(a-l)/2, (a+l+1)/2], [a+k+1]; z) subst z = 2*w - w^2",
        "((2-w)/2)^(-a-k) * (1-w)^k * F3(k+1, l+1; -k, -l; a+k+1; -w/(2*(1-w)), w/2)",
        variables=("w",), free=("a", "k", "l"), domains=ints, nonint=("2*a",),
        quote="Karlsson's identity gives the following generalization"))
    add(IdentityRecord(
        "f2-f3-reversal", "Exact",
        "F2(a; -k, -l; -2*k, -2*l; p, q)",
        "fact(k)*fact(l)*poch(a, k+l)/(fact(2*k)*fact(2*l)) * p^k * q^l"
        " * F3(k+1, l+1; -k, -l; 1-a-k-l; 1/p, 1/q)",
        variables=("t",), free=("a", "k", "l", "p", "q"),
        domains={"k": ("int", 0, 3), "l": ("int", 0, 3)}, nonint=("a+k+l",),
        quote="by reversing the double summation in both directions"))
    # ---- Exact: appendix 4F3 identities ------------------------------------------
    for rid, lhs, rhs, free, extra in (
            ("f2-4f3-bailey-1", "F2(a; b, b; c, c; x, -x)",
             "pFq([a/2, (a+1)/2, b, c-b], [c, c/2, (c+1)/2]; x^2)", ("a", "b", "c"), ()),
            ("f2-4f3-bailey-2", "F2(a; b1, b2; 2*b1, 2*b2; x, -x)",
             "pFq([a/2, (a+1)/2, (b1+b2)/2, (b1+b2+1)/2], [b1+1/2, b2+1/2, b1+b2]; x^2)",
             ("a", "b1", "b2"), ("2*b1", "2*b2", "b1+b2")),
            ("f3-4f3-bailey", "F3(a, a; b, b; c; x, -x)",
             "pFq([a, b, (a+b)/2, (a+b+1)/2], [a+b, c/2, (c+1)/2]; x^2)", ("a", "b", "c"), ("a+b",)),
            ("f4-4f3-burchnall", "F4(a; b; c1, c2; x, x)",
             "pFq([a, b, (c1+c2)/2, (c1+c2-1)/2], [c1, c2, c1+c2-1]; 4*x)",
             ("a", "b", "c1", "c2"), ("c1+c2",)),
            ("f4-4f3-antidiagonal", "F4(a; b; c, c; x, -x)",
             "pFq([a/2, (a+1)/2, b/2, (b+1)/2], [c, c/2, (c+1)/2]; -4*x^2)", ("a", "b", "c"), ())):
        add(IdentityRecord(rid, "Exact", lhs, rhs, variables=("x",), free=free,
                           nonint=extra,
                           quote="give a taste of what can be expected"))
    # ---- Proportional -------------------------------------------------------------
    add(IdentityRecord(
        "f1-line-y1", "Proportional", "F1(a; b1, b2; c; x, 1)",
        "Gamma(c)*Gamma(c-a-b2)/(Gamma(c-a)*Gamma(c-b2)) * pFq([a, b1], [c-b2]; x)",
        variables=("x",), free=("a", "b1", "b2", "c"), positive=("c-a-b2",),
        nonint=("c-a-b2", "c-a", "c-b2"), quote="The second identity holds if Re(c-a-b2)>0"))
    add(IdentityRecord(
        "f3-line-y1", "Proportional", "F3(a1, a2; b1, b2; c; x, 1)",
        "Gamma(c)*Gamma(c-a2-b2)/(Gamma(c-a2)*Gamma(c-b2)) * pFq([a1, b1, c-a2-b2], [c-a2, c-b2]; x)",
        variables=("x",), free=("a1", "a2", "b1", "b2", "c"), positive=("c-a2-b2",),
        nonint=("c-a2-b2", "c-a2", "c-b2"),
        quote="convergence of the 2F1(1) coefficients actually improves with higher powers"))
    # ---- ExpectFail and its companion ----------------------------------------------
    f2x1 = dict(variables=("x",), free=("a", "b1", "b2", "c1", "d"), derived=(("c2", "a+b2+d"),),
                domains={"d": ("range", 0, 7)}, nonint=("c2-a", "c2-b2", "a-c2+1", "a+b2-c2+1") + F2_RED)
    add(IdentityRecord(
        "f2x1-wrongformula", "ExpectFail", "F2(a; b1, b2; c1, c2; x, 1)",
        "Gamma(c2)*Gamma(c2-a-b2)/(Gamma(c2-a)*Gamma(c2-b2))"
        " * pFq([a, b1, a-c2+1], [c1, a+b2-c2+1]; x)",
        quote="this identification is incorrect", **f2x1))
    # ---- SameOde: F2 ---------------------------------------------------------------
    add(IdentityRecord(
        "hpg32-pair-1", "SameOde", _mo("F2", F2P, "x=t; y=0"), _bi("euler", "a", "b1", "c1"),
        variables=(), free=("a", "b1", "b2", "c1", "c2"), nonint=F2_RED,
        quote="The first specialization is trivial"))
    add(IdentityRecord(
        "hpg32-pair-2", "SameOde", _mo("F2", F2P, "x=t; y=1"),
        _bi("hpg32", "a", "b1", "a-c2+1", "c1", "a+b2-c2+1"),
        quote="The following function pairs satisfy the same ordinary differential equations",
        **{**f2x1, "variables": ()}))
    add(IdentityRecord(
        "hpg32-pair-3", "SameOde", _mo("F2", F2P, "x=t; y=1-t"),
        _pb(_bi("hpg32", "a", "c1-b1", "a-c2+1", "c1", "a+b2-c2+1"), "t/(t-1)", [("1", "-a")]),
        variables=(), free=("a", "b1", "b2", "c1", "c2"), nonint=("a-c2", "a+b2-c2", "c1-b1") + F2_RED,
        quote="The following function pairs satisfy the same ordinary differential equations"))
    f2sym = {"a": "a", "b1": "b1", "b2": "b2", "c1": "2*b1", "c2": "2*b2"}
    add(IdentityRecord(
        "f2cases-xy2", "SameOde", _mo("F2", f2sym, "x=t; y=2-t"),
        _pb(_bi("euler", "a/2+1/2-b2", "a/2", "b1+1/2"), "t^2/(2-t)^2", [("2", "-a")]),
        variables=(), free=("a", "b1", "b2"), nonint=("2*b1", "2*b2", "b1+b2-a", "a/2", "a/2-b2"),
        quote="we recognize the second order equation"))
    add(IdentityRecord(
        "f2cases-xy2-builtin", "SameOde", _mo("F2", f2sym, "x=t; y=2-t"), _bi("xy2", "a", "b1", "b2"),
        variables=(), free=("a", "b1", "b2"), nonint=("2*b1", "2*b2", "b1+b2-a"),
        quote="we recognize the second order equation"))
    sep = {"a": "b1+b2-1/2", "b1": "b1", "b2": "b2", "c1": "2*b1", "c2": "2*b2"}
    add(IdentityRecord(
        "f2-separated-family", "SameOde", _mo("F2", sep, "x=1-t^2; y=1-(t+s)^2/(s^2-1)"),
        _bi("f2sep", "b1", "b2", "s"),
        variables=(), free=("b1", "b2", "s"), nonint=("2*b1", "2*b2", "b1+b2", "s^2"),
        quote="the following differential equation can be checked"))
    add(IdentityRecord(
        "f2cases-separable", "SameOde",
        _mo("F2", sep, "x=-4*t/(t-1)^2; y=(1-s)*(s*t^2-1)/(s*(t-1)^2)"),
        _pb(_bi("euler", "b1+b2-1/2", "b2", "b1+1/2"), "s*t^2", [("1", "2*b1+2*b2-1")]),
        variables=(), free=("b1", "b2", "s"), nonint=("2*b1", "2*b2", "b1+b2"),
        quote="In the last pair, s is any constant"))
    add(IdentityRecord(
        "f2last-f2hpgs", "SameOde",
        _mo("F2", sep, "x=-4*s*t/(t-s)^2; y=-(s^2-1)*(t^2-1)/(t-s)^2"),
        _pb(_bi("euler", "b1+b2-1/2", "b2", "b1+1/2"), "t^2", [("s", "2*b1+2*b2-1")]),
        variables=(), free=("b1", "b2", "s"), nonint=("2*b1", "2*b2", "b1+b2", "s^2"),
        quote="satisfy the same second order ordinary differential equation, with respect to t"))
    # ---- SameOde: F3 ---------------------------------------------------------------
    for i, (curve, rhs, extra) in enumerate((
            ("x=t; y=0", _bi("euler", "a1", "b1", "c"), ()),
            ("x=t; y=1", _bi("hpg32", "a1", "b1", "c-a2-b2", "c-a2", "c-b2"), ("c-a2-b2",)),
            ("x=t; y=t/(t-1)",
             _pb(_bi("hpg32", "1+a1+a2-c", "1+b1+a2-c", "1-b2", "1+a1+a2+b1-c", "1+a2-b2"),
                 "1-t", [("0", "1-c"), ("1", "a2")]),
             ("a1+a2-c", "b1+a2-c", "a1+a2+b1-c", "a2-b2"))), 1):
        add(IdentityRecord(
            f"f3cases-{i}", "SameOde", _mo("F3", F3P, curve), rhs,
            variables=(), free=("a1", "a2", "b1", "b2", "c"), nonint=extra + F3_RED,
            quote="The function pairs represent all cases"))
    f3s = {"a1": "1-b1", "a2": "1-b2", "b1": "b1", "b2": "b2", "c": "c"}
    add(IdentityRecord(
        "f3cases-4", "SameOde", _mo("F3", f3s, "x=t; y=t/(2*t-1)"),
        _pb(_bi("euler", "(b2-b1+c)/2", "(b1+b2+c-1)/2", "c"), "4*t*(1-t)",
            [("1", "c-1"), ("1/2", "b2")]),
        variables=(), free=("b1", "b2", "c"), nonint=("(b2-b1+c)/2", "(b1+b2+c-1)/2", "b1-b2"),
        quote="The function pairs represent all cases"))
    f3h = {"a1": "1-b1", "a2": "1-b2", "b1": "b1", "b2": "b2", "c": "3/2"}
    add(IdentityRecord(
        "f3cases-5", "SameOde",
        _mo("F3", f3h, "x=-(t-1)^2/(4*t); y=s*(t-1)^2/((1-s)*(s*t^2-1))"),
        _pb(_bi("euler", "1-b2", "b2", "b1+1/2"), "s*t^2/(s*t^2-1)", [("0", "b1"), ("1", "-1")]),
        variables=(), free=("b1", "b2", "s"), nonint=("2*b1", "2*b2", "b1+b2"),
        quote="In the last pair, s is any constant"))
    add(IdentityRecord(
        "f3last-f3hpgs", "SameOde",
        _mo("F3", f3h, "x=-(t-s)^2/(4*s*t); y=-(t-s)^2/((s^2-1)*(t^2-1))"),
        _pb(_bi("euler", "b1+b2-1/2", "b2", "b1+1/2"), "t^2",
            [("0", "b1"), ("1", "b2"), ("-1", "b2"), ("s", "-1")]),
        variables=(), free=("b1", "b2", "s"), nonint=("2*b1", "2*b2", "b1+b2", "s^2"),
        quote="satisfy the same system of partial differential equations with respect to s and t"))
    # ---- SameOde: F4 ---------------------------------------------------------------
    quad = "x=t^2; y=(1-t)^2"
    add(IdentityRecord(
        "kato-ode", "SameOde", _mo("F4", F4P, quad), _bi("kato", "a", "b", "c1", "c2"),
        variables=(), free=("a", "b", "c1", "c2"), nonint=KATO_NONINT,
        quote="satisfies the differential equation"))
    add(IdentityRecord(
        "bailey-family", "SameOde",
        _mo("F4", {"a": "a", "b": "b", "c1": "c", "c2": "a+b-c+1"}, "x=s*t; y=(1-s)*(1-t)"),
        _bi("euler", "a", "b", "c"),
        variables=(), free=("a", "b", "c", "s"), nonint=("c-a-b", "a-b"),
        quote="The general second order equation is satisfied by"))
    add(IdentityRecord(
        "app4ga-quadratic", "SameOde",
        _mo("F4", {"a": "a", "b": "b", "c1": "c", "c2": "a+b-c+3/2"}, quad),
        _bi("euler", "2*a", "2*b", "2*c-1"),
        variables=(), free=("a", "b", "c"), nonint=("2*a", "2*b", "2*c", "2*a-2*b", "2*c-2*a-2*b"),
        quote="This is the only case"))
    add(IdentityRecord(
        "a4hpg3", "SameOde",
        _mo("F4", {"a": "a", "b": "b", "c1": "c+1/2", "c2": "1/2"}, quad),
        _bi("hpg32", "2*a", "2*b", "c", "a+b+1/2", "2*c"),
        variables=(), free=("a", "b", "c"), nonint=A4HPG3_NONINT,
        quote="satisfy the same ordinary Fuchsian equation"))
    add(IdentityRecord(
        "a4hpg3a", "SameOde",
        _mo("F4", {"a": "a+1/2", "b": "b+1/2", "c1": "c+1/2", "c2": "3/2"}, quad, [("1", "1")]),
        _bi("hpg32", "2*a", "2*b", "c", "a+b+1/2", "2*c"),
        variables=(), free=("a", "b", "c"), nonint=A4HPG3_NONINT,
        quote="That equation is satisfied by"))
    add(IdentityRecord(
        "a4hpg3b", "SameOde",
        _mo("F4", {"a": "a", "b": "a+1/2", "c1": "c+1/2", "c2": "1+a-b"},
            "x=t^2/(t-1)^2; y=1/(t-1)^2", [("1", "-2*a")]),
        _bi("hpg32", "2*a", "2*b", "c", "a+b+1/2", "2*c"),
        variables=(), free=("a", "b", "c"), nonint=A4HPG3_NONINT,
        quote="That equation is satisfied by"))
    add(IdentityRecord(
        "a4hpg3-c2-three-halves", "SameOde",
        _mo("F4", {"a": "a", "b": "b", "c1": "c", "c2": "3/2"}, quad),
        {"kind": "projective", "of": _bi("hpg32", "2*a-1", "2*b-1", "c-1/2", "a+b-1/2", "2*c-1"),
         "theta": [["1", "-1"]]},
        variables=(), free=("a", "b", "c"), nonint=A4HPG3_NONINT + ("a+b-c",),
        quote="We get the coincidence of Kato's and hypergeometric equations unconditionally"))
    add(IdentityRecord(
        "a4hpg3-b-shift", "SameOde",
        _mo("F4", {"a": "a", "b": "a+1/2", "c1": "c1", "c2": "c2"}, quad),
        _pb(_bi("hpg32", "2*a", "2*a-2*c2+2", "c1-1/2", "2*a-c2+3/2", "2*c1-1"), "t/(t-1)",
            [("1", "-2*a")]),
        variables=(), free=("a", "c1", "c2"),
        nonint=("2*a", "2*c1", "2*c2", "2*a-2*c2", "c1+c2-2*a", "c1-2*a", "c2-2*a", "2*c1-2*a",
                "2*c1+2*c2-2*a"),
        quote="we permute the singular points t=1 and t=infinity"))
    add(IdentityRecord(
        "f4-symmetric-square", "SameOde",
        _mo("F4", {"a": "a", "b": "b", "c1": "c", "c2": "a+b-c+1"}, quad),
        _sq(_bi("euler", "a", "b", "c")),
        variables=(), free=("a", "b", "c"), nonint=("2*a", "2*b", "2*c", "a-b", "c-a-b"),
        quote="Appell himself derived this fact explicitly"))
    sq = _sq(_bi("euler", "c", "3*c-1", "2*c"))
    for rid, params, theta in (
            ("a4hpg2s", {"a": "2*c-1/2", "b": "3*c-1", "c1": "c+1/2", "c2": "c+1/2"}, None),
            ("a4hpg2sa", {"a": "c", "b": "2*c-1/2", "c1": "3/2-c", "c2": "c+1/2"}, [("0", "1-2*c")]),
            ("a4hpg2sb", {"a": "1/2", "b": "c", "c1": "3/2-c", "c2": "3/2-c"},
             [("0", "1-2*c"), ("1", "1-2*c")])):
        add(IdentityRecord(
            rid, "SameOde", _mo("F4", params, quad, theta), sq,
            variables=(), free=("c",), nonint=("2*c", "3*c", "4*c", "6*c"),
            quote="satisfy the same ordinary Fuchsian equation of order 3"))
    # ---- SameOde: F1 ---------------------------------------------------------------
    q0_hpg = _pb(_bi("euler", "a", "1/2", "1+b"), "-4*t/(t-1)^2", [("1", "-2*a")])
    add(IdentityRecord(
        "f1q0", "SameOde", _F1Q0, q0_hpg, variables=(), free=("a", "b"), nonint=_F1Q_NONINT,
        quote="The following two univariate functions satisfy the same ordinary Fuchsian"))
    for rid, params, curve, theta in (
            ("f1q1-a", {"a": "a", "b1": "1-a", "b2": "a-b", "c": "1+b"}, "x=t/(t-1); y=-t",
             [("1", "-a")]),
            ("f1q1-b", {"a": "a", "b1": "2*b", "b2": "1-a", "c": "1+b"}, "x=t/(t+1); y=t^2/(t^2-1)",
             [("1", "-a"), ("-1", "-a")]),
            ("f1q2-a", {"a": "a", "b1": "2*b", "b2": "a-b", "c": "2*a"}, "x=1-t; y=1-t^2", None),
            ("f1q2-b", {"a": "a", "b1": "a-b", "b2": "a-b", "c": "2*a"}, "x=(t-1)/t; y=1-t",
             [("0", "-a")]),
            ("f1q3-a", {"a": "a", "b1": "a-b", "b2": "a-b", "c": "1+a-2*b"}, "x=1/t; y=t",
             [("0", "-a")]),
            ("f1q3-b", {"a": "a", "b1": "1-a", "b2": "a-b", "c": "1+a-2*b"}, "x=1/(1-t); y=t+1",
             [("1", "-a")]),
            ("f1q4", {"a": "1-2*b", "b1": "a-b", "b2": "a-b", "c": "1+a-2*b"},
             "x=1/(1-t); y=t/(t-1)", [("0", "-b"), ("1", "2*b-2*a")]),
            ("f1q5", {"a": "1-2*b", "b1": "a-b", "b2": "1-a", "c": "1+a-2*b"}, "x=t+1; y=t",
             [("0", "-b"), ("1", "1-2*a")])):
        add(IdentityRecord(
            rid, "SameOde", _mo("F1", params, curve, theta), _F1Q0,
            variables=(), free=("a", "b"), nonint=_F1Q_NONINT,
            quote="The same equation is satisfied by"))
    add(IdentityRecord(
        "f1q6", "SameOde",
        _mo("F1", {"a": "1-b2", "b1": "b1", "b2": "b2", "c": "2-b1-b2"}, "x=t; y=t/(t+1)"),
        _pb(_bi("euler", "1-b1", "1/2", "2-b1-b2"), "-4*t/(t-1)^2", [("-1", "b2"), ("1", "-1")]),
        variables=(), free=("b1", "b2"), nonint=("b1+b2", "2*b1", "2*b2", "b1-b2"),
        quote="satisfy the same second order ordinary Fuchsian equation"))
    # ---- SolvesSystem --------------------------------------------------------------
    for rid, cand in (
            ("f2-origin-x", "x^(1-c1) * F2(1+a-c1; 1+b1-c1, b2; 2-c1, c2; x, y)"),
            ("f2-origin-y", "y^(1-c2) * F2(1+a-c2; b1, 1+b2-c2; c1, 2-c2; x, y)"),
            ("f2-origin-xy", "x^(1-c1)*y^(1-c2) * F2(2+a-c1-c2; 1+b1-c1, 1+b2-c2; 2-c1, 2-c2; x, y)")):
        add(IdentityRecord(
            rid, "SolvesSystem", _ss("F2", F2P), cand, free=("a", "b1", "b2", "c1", "c2"),
            quote="four distinct F2(x,y) functions that are local solutions"))
    for rid, cand in (
            ("f4-origin-1", "F4(a; b; c1, c2; x, y)"),
            ("f4-origin-x", "x^(1-c1) * F4(1+a-c1; 1+b-c1; 2-c1, c2; x, y)"),
            ("f4-origin-y", "y^(1-c2) * F4(1+a-c2; 1+b-c2; c1, 2-c2; x, y)"),
            ("f4-origin-xy", "x^(1-c1)*y^(1-c2) * F4(2+a-c1-c2; 2+b-c1-c2; 2-c1, 2-c2; x, y)")):
        add(IdentityRecord(
            rid, "SolvesSystem", _ss("F4", F4P), cand, free=("a", "b", "c1", "c2"),
            nonint=("c1+c2",), quote="four generally different F4 local solutions"))
    f1free = ("a", "b1", "b2", "c")
    f1nonint = ("c-a", "c-b1-b2", "c-a-b1", "c-a-b2", "a-b1", "a-b2", "b1+b2-a", "c-a-b1-b2")
    uv = ("u", "v")
    for rid, chart, cand in (
            ("f1-ten-0", None, "F1(a; b1, b2; c; u, v)"),
            ("f1-ten-1", ("1-u", "1-v"), "F1(a; b1, b2; 1+a+b1+b2-c; u, v)"),
            ("f1-ten-2", ("1/u", "1/v"), "u^b1*v^b2 * F1(1+b1+b2-c; b1, b2; 1+b1+b2-a; u, v)"),
            ("f1-ten-3", ("1/u", "v/u"), "u^a * F1(a; 1+a-c, b2; 1+a-b1; u, v)"),
            ("f1-ten-4", ("u/v", "1/v"), "v^a * F1(a; b1, 1+a-c; 1+a-b2; u, v)"),
            ("f1-ten-5", ("1-v/u", "1-v"), "u^b1*v^(c-a-b1-b2) * F1(c-a; b1, c-b1-b2; c-a-b2+1; u, v)"),
            ("f1-ten-6", ("1-u", "1-u/v"), "u^(c-a-b1-b2)*v^b2 * F1(c-a; c-b1-b2, b2; c-a-b1+1; u, v)"),
            ("f1-ten-7", ("v/u", "v"), "u^b1*v^(1-c) * F1(1+b1+b2-c; b1, 1+a-c; 2+b1-c; u, v)"),
            ("f1-ten-8", ("u", "u/v"), "u^(1-c)*v^b2 * F1(1+b1+b2-c; 1+a-c, b2; 2+b2-c; u, v)"),
            ("f1-ten-9", ("1/(1-v)", "(1-u*v)/(1-v)"),
             "u^(1-b1-b2)*v^(c-a-b1-b2)*(1-v)^a"
             " * F1(1-b1; 1+a-c, c-b1-b2; 2-b1-b2; u, u*v)")):
        add(IdentityRecord(
            rid, "SolvesSystem", _ss("F1", F1P, chart), cand, variables=uv, free=f1free,
            nonint=f1nonint, quote="there are 10 different F1 solutions"))
    add(IdentityRecord(
        "f2-f3-relation", "SolvesSystem", _ss("F2", F2P, ("1/u", "1/v")),
        "u^b1*v^b2 * F3(1+b1-c1, 1+b2-c2; b1, b2; 1+b1+b2-a; u, v)", variables=uv,
        free=("a", "b1", "b2", "c1", "c2"), nonint=("b1-c1", "b2-c2", "b1+b2-a"),
        quote="both satisfy"))
    add(IdentityRecord(
        "f1-f2-blowup", "SolvesSystem", _ss("F1", F1P, ("v/(1-u)", "v")),
        "(1-u)^b1 * F2(b1+b2; b1, a; b1+b2, c; u, v)", variables=uv, free=f1free,
        nonint=("b1+b2",), quote="in the neighborhood of the point (x/y,y)=(1,0) of the blow-up"))
    add(IdentityRecord(
        "f1-separation-elementary", "SolvesSystem",
        _ss("F1", {"a": "b+1/2", "b1": "b", "b2": "1/2-b", "c": "3/2"},
            ("u^2/(2*r+2*v+u)^2", "-u^2/(((r+v+u)^2-1)*((r+v)^2-1))")),
        "(2*r+2*v+u)^(2*b) * (1-(r+v+u)^2)^(1/2-b) * (1-(r+v)^2)^(1/2-b) / u",
        variables=uv, free=("b", "r"), domains={"r": ("range", 0, 1)}, nonint=("2*b",),
        quote="has the following elementary solution"))
    return R


_CATALOG = None


def catalog_entries():
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = _records()
        ids = [r.id for r in _CATALOG]
        if len(set(ids)) != len(ids):
            raise RuntimeError("duplicate catalog ids")
    return list(_CATALOG)


def get_record(rid: str) -> IdentityRecord:
    for r in catalog_entries():
        if r.id == rid:
            return r
    raise KeyError(rid)


def catalog_json():
    return {"schema": SCHEMA_VERSION, "records": [r.to_json() for r in catalog_entries()]}


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------

def eval_rational(text, env) -> Fraction:
    ast, subst = parse_expr(str(text))
    f = ratfunc_from_ast(ast, "\0", env)
    if not f.is_const():
        raise ExprError(f"{text!r} is not a constant")
    return f.const_value()


def _draw(rng, dom):
    if dom is None:
        return Fraction(rng.randint(-20, 20), rng.randint(1, 20))
    kind, lo, hi = dom
    if kind == "int":
        return Fraction(rng.randint(lo, hi))
    # a rational strictly inside (lo, hi)
    den = rng.randint(1, 20)
    return Fraction(rng.randint(lo * den + 1, hi * den - 1), den) if den > 1 or hi - lo > 1 \
        else Fraction(2 * lo + 1, 2)


def complete_sample(record: IdentityRecord, free_values) -> dict:
    env = {k: Q(v) for k, v in free_values.items()}
    for name, expr in record.derived:
        env[name] = eval_rational(expr, env)
    return env


def sample_problem(record: IdentityRecord, env) -> str:
    """None when the sample is admissible, else the reason it is rejected."""
    for name, v in env.items():
        dom = record.domains.get(name)
        if dom is not None and dom[0] == "int":
            continue
        if v.denominator == 1:
            return f"{name} = {fmt_q(v)} is an integer"
    for expr in record.nonint:
        try:
            v = eval_rational(expr, env)
        except ZeroDivisionError:
            return f"{expr} is undefined"
        if v.denominator == 1:
            return f"{expr} = {fmt_q(v)} is an integer"
    for expr in record.positive:
        if eval_rational(expr, env) <= 0:
            return f"{expr} is not positive"
    return None


def sample_parameters(record: IdentityRecord, seed, count: int):
    rng = random.Random(f"{seed}:{record.id}")
    out = []
    if not record.free:
        return [complete_sample(record, {})] * min(count, 1)
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 500 * count:
            raise ValueError(f"constraint system for {record.id} looks unsatisfiable")
        free = {name: _draw(rng, record.domains.get(name)) for name in record.free}
        try:
            env = complete_sample(record, free)
        except ZeroDivisionError:
            continue
        if sample_problem(record, env) is None and env not in out:
            out.append(env)
    return out


# ---------------------------------------------------------------------------
# Building the compared objects
# ---------------------------------------------------------------------------

class Rejected(Exception):
    """The sample is degenerate for this record."""


def _theta(items, env):
    return [(eval_rational(p, env), eval_rational(e, env)) for p, e in items]


def build_ode(recipe, env):
    kind = recipe["kind"]
    if kind == "builtin":
        return builtin_ode(recipe["name"], [eval_rational(p, env) for p in recipe["params"]])
    if kind == "minimal_ode":
        sys = SystemId(recipe["system"], {k: eval_rational(v, env) for k, v in recipe["params"].items()})
        curve = Curve.parse(recipe["curve"], env)
        L = minimal_ode(sys, curve, recipe.get("max_order", 4), recipe.get("prolong_depth", 2))
        if not L:
            raise Rejected(str(L))
        if recipe.get("theta"):
            L = projective_transform(L, _theta(recipe["theta"], env))
        return L
    if kind == "pullback":
        base = build_ode(recipe["of"], env)
        return pullback_transform(base, parse_ratfunc(recipe["phi"], "t", env),
                                  _theta(recipe.get("theta", ()), env))
    if kind == "projective":
        return projective_transform(build_ode(recipe["of"], env), _theta(recipe["theta"], env))
    if kind == "symsq":
        return symmetric_square(build_ode(recipe["of"], env))
    raise ValueError(f"unknown recipe kind {kind!r}")


def _expand(text, record, env, N):
    return expr_expand(text, record.variables, env, N)


def _solves(record, env, N):
    spec = record.lhs
    sys = SystemId(spec["system"], {k: eval_rational(v, env) for k, v in spec["params"].items()})
    M = N + 6
    cand = _expand(record.rhs, record, env, M)
    G = cand.gs
    if spec.get("chart"):
        Xs, Ys = (_expand(t, record, env, M) for t in spec["chart"])
        for v in (Xs, Ys):
            if not v.const.is_rational():
                raise ExprError("chart maps need rational coefficients")
        chart = Chart(Xs.gs * Xs.const.coeff, Ys.gs * Ys.const.coeff, M)
    else:
        Xs = GenSeries.of(_var_series(0))
        Ys = GenSeries.of(_var_series(1))
        chart = Chart(Xs, Ys, M)
    return solves_system_chart(sys, G, chart, N)


def _var_series(i):
    from .exactnum import TruncSeries
    return TruncSeries.var(2, i)


def verify_identity(record: IdentityRecord, sample, N=None) -> VerificationReport:
    N = record.N if N is None else N
    env = {k: Q(v) for k, v in sample.items()}
    t0 = time.perf_counter()
    extra = {}
    problem = sample_problem(record, env)
    if problem:
        return VerificationReport(record.id, env, "rejected", problem, 0.0)
    try:
        mode = record.mode
        if mode in ("Exact", "ExpectFail"):
            ok, detail = compare_vals(_expand(record.lhs, record, env, N),
                                      _expand(record.rhs, record, env, N), N)
            if mode == "ExpectFail":
                ok, detail = (not ok), (f"mismatch as expected: {detail}" if not ok
                                        else "the comparison unexpectedly succeeded")
        elif mode == "Proportional":
            ok, info = proportional_vals(_expand(record.lhs, record, env, N),
                                         _expand(record.rhs, record, env, N), N)
            detail = None if ok else info
            if ok:
                extra["ratio"] = info
        elif mode == "SameOde":
            L1, L2 = build_ode(record.lhs, env), build_ode(record.rhs, env)
            ok = lode_equal(L1, L2)
            detail = None if ok else lode_difference(L1, L2)
            extra["order"] = L1.order
        elif mode == "SolvesSystem":
            ok, detail = _solves(record, env, N)
        else:
            raise ValueError(f"unknown mode {mode}")
        if record.term_count:
            kind, ps = record.term_count
            spec = AppellSpec(kind, [eval_rational(p, env) for p in ps])
            extra["terms"] = appell_terminating_eval(spec, 0, 0)[1]
    except Rejected as exc:
        return VerificationReport(record.id, env, "rejected", str(exc), time.perf_counter() - t0)
    except (ExprError, ZeroDivisionError, ArithmeticError, ValueError, DegenerateRelation) as exc:
        return VerificationReport(record.id, env, "rejected", f"{type(exc).__name__}: {exc}",
                                  time.perf_counter() - t0)
    keep = not ok or record.mode == "ExpectFail"
    return VerificationReport(record.id, env, "pass" if ok else "fail",
                              str(detail) if keep else None, time.perf_counter() - t0, extra)


def verify_record(record: IdentityRecord, seed=1, samples=5, N=None):
    return [verify_identity(record, s, N) for s in sample_parameters(record, seed, samples)]


__all__ = [
    "IdentityRecord", "VerificationReport", "catalog_entries", "get_record", "catalog_json",
    "sample_parameters", "verify_identity", "verify_record", "build_ode", "eval_rational", "MODES",
]
