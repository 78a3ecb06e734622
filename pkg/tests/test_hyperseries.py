from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings, strategies as st

from appellode.exactnum import INF
from appellode.hyperseries import (AppellSpec, ExprError, ParseError, PfqSpec, appell_series,
                                   appell_terminating_eval, compare_vals, expr_expand, pfq_series,
                                   pochhammer)

nonint = st.fractions(min_value=-5, max_value=5, max_denominator=20).filter(lambda q: q.denominator > 1)


# --- pochhammer -------------------------------------------------------------

def test_pochhammer_empty_product():
    assert pochhammer(F(7, 3), 0) == 1


def test_pochhammer_factorial():
    assert pochhammer(1, 4) == 24


def test_pochhammer_half():
    # (1/2)(3/2)
    assert pochhammer(F(1, 2), 2) == F(3, 4)


def test_pochhammer_negative_n():
    with pytest.raises(ValueError):
        pochhammer(1, -1)


# --- pfq_series -------------------------------------------------------------

def test_pfq_constant_term():
    assert pfq_series(PfqSpec([F(1, 3), F(2, 7)], [F(5, 9)]), 5)[0] == 1


def test_pfq_harmonic_coefficients():
    S = pfq_series(PfqSpec([1, 1], [2]), 6)
    assert S.coefficient_list() == [F(1, n + 1) for n in range(7)]


def test_pfq_terminates():
    S = pfq_series(PfqSpec([-2, F(1, 3)], [F(1, 5)]), 8)
    assert S.order == INF and S.degree() == 2


def test_pfq_gauss_coefficients():
    # 2F1(1/3, 1/5; 1/7; z), frozen from an independent CAS expansion
    S = pfq_series(PfqSpec([F(1, 3), F(1, 5)], [F(1, 7)]), 3)
    assert S.coefficient_list() == [1, F(7, 15), F(49, 150), F(26411, 101250)]


def test_pfq_zero_lower_parameter():
    with pytest.raises(ZeroDivisionError):
        pfq_series(PfqSpec([F(1, 3)], [-1]), 4)


# --- appell_series ----------------------------------------------------------

@pytest.mark.parametrize("kind, params", [
    ("F1", [F(1, 3), F(1, 5), F(2, 7), F(3, 11)]),
    ("F2", [F(1, 3), F(1, 5), F(2, 7), F(3, 11), F(5, 13)]),
    ("F3", [F(1, 3), F(1, 5), F(2, 7), F(3, 11), F(5, 13)]),
    ("F4", [F(1, 3), F(1, 5), F(2, 7), F(3, 11)]),
])
def test_appell_constant_term(kind, params):
    assert appell_series(AppellSpec(kind, params), 4)[(0, 0)] == 1


def test_f4_coefficient_11():
    a, b, c1, c2 = F(1, 3), F(1, 5), F(1, 7), F(1, 11)
    S = appell_series(AppellSpec("F4", [a, b, c1, c2]), 4)
    assert S[(1, 1)] == F(616, 75)
    assert S[(1, 1)] == a * (a + 1) * b * (b + 1) / (c1 * c2)


def test_f1_diagonal_is_gauss():
    a, b1, b2, c = F(1, 3), F(2, 5), F(-3, 7), F(4, 11)
    diag = expr_expand("F1(a; b1, b2; c; t, t)", ("t",), dict(a=a, b1=b1, b2=b2, c=c), 8)
    gauss = expr_expand("pFq([a, b1+b2], [c]; t)", ("t",), dict(a=a, b1=b1, b2=b2, c=c), 8)
    assert compare_vals(diag, gauss, 8)[0]


# --- appell_terminating_eval ------------------------------------------------

def test_terminating_f2_four_terms():
    a, x, y = F(1, 3), F(1, 2), F(1, 3)
    value, terms = appell_terminating_eval(AppellSpec("F2", [a, -1, -1, -2, -2]), x, y)
    assert terms == 4
    assert value == 1 + a * x / 2 + a * y / 2 + a * (a + 1) * x * y / 4
    assert value == F(125, 108)


def test_terminating_single_term():
    value, terms = appell_terminating_eval(AppellSpec("F2", [F(1, 3), 0, 0, F(1, 5), F(1, 7)]), 3, 5)
    assert (value, terms) == (1, 1)


def test_terminating_rejects_infinite():
    with pytest.raises(ValueError):
        appell_terminating_eval(AppellSpec("F2", [F(1, 3), -1, F(1, 2), 2, 3]), 0, 0)


@pytest.mark.parametrize("k, l", [(0, 0), (1, 2), (2, 1), (3, 3)])
def test_reversal_identity(k, l):
    a, p, q = F(2, 7), F(3, 5), F(-4, 3)
    env = dict(a=a, k=k, l=l, p=p, q=q)
    lhs = expr_expand("F2(a; -k, -l; -2*k, -2*l; p, q)", ("t",), env, 2)
    rhs = expr_expand("fact(k)*fact(l)*poch(a, k+l)/(fact(2*k)*fact(2*l)) * p^k * q^l"
                      " * F3(k+1, l+1; -k, -l; 1-a-k-l; 1/p, 1/q)", ("t",), env, 2)
    assert lhs.as_rational() == rhs.as_rational()
    assert lhs.as_rational() == appell_terminating_eval(AppellSpec("F2", [a, -k, -l, -2 * k, -2 * l]), p, q)[0]


# --- expr_expand ------------------------------------------------------------

def test_expand_geometric():
    v = expr_expand("(1-t)^(-1)", ("t",), None, 6)
    assert v.gs.body.coefficient_list() == [1] * 7


@pytest.mark.parametrize("a, b, c", [(F(1, 2), F(1, 3), F(1, 5)), (F(-2, 7), F(5, 3), F(3, 11))])
def test_expand_bailey(a, b, c):
    env = dict(a=a, b=b, c=c)
    lhs = expr_expand("F4(a; b; c, a+b-c+1; x*(1-y), y*(1-x))", ("x", "y"), env, 8)
    rhs = expr_expand("pFq([a, b], [c]; x) * pFq([a, b], [a+b-c+1]; y)", ("x", "y"), env, 8)
    assert compare_vals(lhs, rhs, 8) == (True, None)


def test_expand_dihedral_substitution():
    env = dict(a=F(3, 7))
    lhs = expr_expand("pFq([a/2, (a+1)/2], [1/2]; z) subst z = w^2", ("w",), env, 10)
    rhs = expr_expand("((1-w)^(-a) + (1+w)^(-a))/2", ("w",), env, 10)
    assert compare_vals(lhs, rhs, 10)[0]


def test_expand_detects_mismatch():
    lhs = expr_expand("(1-t)^(-2)", ("t",), None, 5)
    rhs = expr_expand("1 + 2*t + 3*t^2 + 4*t^3 + 6*t^4", ("t",), None, 5)
    ok, detail = compare_vals(lhs, rhs, 5)
    assert not ok and "(4,)" in detail


def test_expand_unbound_name():
    with pytest.raises(ExprError, match="unbound"):
        expr_expand("pFq([a], [2]; t)", ("t",), None, 3)


def test_expand_non_unit_power_base():
    with pytest.raises(ExprError):
        expr_expand("t^(1/2) + (t+t^2)^(1/3)", ("t",), None, 3)


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        expr_expand("F2(1; 2, 3; 4; t, t)", ("t",), None, 3)
    assert info.value.pos == 0


# --- properties -------------------------------------------------------------

@settings(max_examples=25, deadline=None)
@given(nonint, nonint, nonint, nonint, nonint)
def test_f2_at_y_zero_is_gauss(a, b1, b2, c1, c2):
    S = appell_series(AppellSpec("F2", [a, b1, b2, c1, c2]), 8)
    G = pfq_series(PfqSpec([a, b1], [c1]), 8)
    assert all(S[(n, 0)] == G[n] for n in range(9))


@settings(max_examples=25, deadline=None)
@given(nonint, nonint, nonint, nonint, nonint)
def test_f3_upper_swaps(a1, a2, b1, b2, c):
    base = appell_series(AppellSpec("F3", [a1, a2, b1, b2, c]), 6).coeffs
    assert appell_series(AppellSpec("F3", [b1, a2, a1, b2, c]), 6).coeffs == base
    assert appell_series(AppellSpec("F3", [a1, b2, b1, a2, c]), 6).coeffs == base


@settings(max_examples=25, deadline=None)
@given(nonint, st.integers(0, 4), st.integers(0, 4), nonint, nonint,
       st.fractions(-3, 3, max_denominator=5), st.fractions(-3, 3, max_denominator=5))
def test_terminating_support_and_value(a, k, l, c1, c2, x, y):
    spec = AppellSpec("F2", [a, -k, -l, c1, c2])
    S = appell_series(spec, k + l + 2)
    assert {key for key in S.coeffs} <= {(n, m) for n in range(k + 1) for m in range(l + 1)}
    value, terms = appell_terminating_eval(spec, x, y)
    assert terms == (k + 1) * (l + 1)
    assert value == sum(c * x ** n * y ** m for (n, m), c in S.coeffs.items())


@settings(max_examples=25, deadline=None)
@given(nonint, nonint, nonint)
def test_pfq_satisfies_recurrence(a, b, c):
    assume(c.denominator > 1)
    S = pfq_series(PfqSpec([a, b], [c]), 8)
    for n in range(8):
        assert S[n + 1] * (n + 1) * (c + n) == S[n] * (a + n) * (b + n)
