from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from appellode.exactnum import (INF, BiPoly, GenSeries, RatFunc, TruncSeries, UniPoly, gen_series_partial,
                                poly_gcd, ratfunc_normalize, series_compose, series_pow_rational)

T = RatFunc.t()

small_q = st.fractions(min_value=-5, max_value=5, max_denominator=7)
polys = st.lists(small_q, min_size=1, max_size=4).map(UniPoly)
nonzero_polys = polys.filter(lambda p: not p.is_zero())
ratfuncs = st.tuples(polys, nonzero_polys).map(lambda pq: RatFunc(*pq))
nonzero_ratfuncs = ratfuncs.filter(lambda f: not f.is_zero())


def uni(cs, N=None):
    return TruncSeries.from_list([F(c) for c in cs], N)


def regular_at_zero(f: RatFunc):
    return f.den(0) != 0


# --- ratfunc_normalize ------------------------------------------------------

def test_normalize_common_factor():
    f = ratfunc_normalize(UniPoly([-1, 0, 1]), UniPoly([-1, 1]))
    assert f == T + 1 and f.den == UniPoly([1])


def test_normalize_zero():
    f = ratfunc_normalize(UniPoly(), UniPoly([3, 1, 2]))
    assert f.is_zero() and f.den == UniPoly([1])


def test_normalize_gcd_and_monic():
    f = ratfunc_normalize(UniPoly([0, 6, 2]), UniPoly([0, 2]))
    assert f.num == UniPoly([3, 1]) and f.den == UniPoly([1])


def test_normalize_denominator_monic():
    f = RatFunc(UniPoly([1]), UniPoly([4, 2]))
    assert f.den.lc() == 1 and f.num == UniPoly([F(1, 2)])


def test_zero_denominator_rejected():
    with pytest.raises(ZeroDivisionError):
        RatFunc(1) / RatFunc(0)


def test_poly_gcd_monic():
    g = poly_gcd(UniPoly([-2, 0, 2]), UniPoly([3, 3]))
    assert g == UniPoly([1, 1])


# --- series_pow_rational ----------------------------------------------------

def test_pow_geometric():
    S = series_pow_rational(uni([1, -1], INF), -1, 6)
    assert S.coefficient_list() == [1] * 7


def test_pow_half_binomial():
    # choose(1/2, 2) = -1/8, from the product formula (1/2)(-1/2)/2
    S = series_pow_rational(uni([1, 1], INF), F(1, 2), 4)
    assert S[2] == F(-1, 8)


def test_pow_of_one():
    S = series_pow_rational(uni([1], INF), F(3, 7), 5)
    assert S.coefficient_list() == [1, 0, 0, 0, 0, 0]


def test_pow_product_of_radicals():
    # sqrt(1+z)*(1-z)^(-1/3), frozen from an independent CAS expansion
    S = series_pow_rational(uni([1, 1], INF), F(1, 2), 4) * series_pow_rational(uni([1, -1], INF), F(-1, 3), 4)
    assert S.coefficient_list() == [1, F(5, 6), F(19, 72), F(395, 1296), F(5737, 31104)]


def test_pow_non_unit_base():
    with pytest.raises(ValueError, match="non-unit base"):
        series_pow_rational(uni([0, 1], INF), F(1, 2), 4)


# --- series_compose ---------------------------------------------------------

def test_compose_geometric_in_2t():
    outer = uni([1] * 6)
    inner = uni([0, 2], INF)
    assert series_compose(outer, inner).coefficient_list() == [2 ** k for k in range(6)]


def test_compose_identity_outer():
    inner = uni([0, 3, F(1, 2), -1], 3)
    assert series_compose(uni([0, 1], 3), inner).coefficient_list() == inner.coefficient_list()


def test_compose_geometric_with_t_plus_t2():
    # sum_k (t+t^2)^k expanded independently: 1, 1, 2, 3, 5
    out = series_compose(uni([1] * 5), uni([0, 1, 1], INF))
    assert out.coefficient_list() == [1, 1, 2, 3, 5]


def test_compose_point_mismatch():
    with pytest.raises(ValueError, match="composition point mismatch"):
        series_compose(uni([1] * 4), uni([1, 1], INF))


# --- gen_series_partial -----------------------------------------------------

def test_partial_constant():
    G = GenSeries.of(TruncSeries.const(2, 1))
    assert gen_series_partial(G, "x").is_zero()


def test_partial_power_rule():
    G = GenSeries((F(1, 2), 0), TruncSeries.const(2, 1))
    D = gen_series_partial(G, "x")
    assert D.exps == (F(-1, 2), 0) and D.body.coeffs == {(0, 0): F(1, 2)}


def test_partial_product_rule():
    a = F(2, 3)
    G = GenSeries((a, 0), TruncSeries(2, INF, {(0, 0): 1, (1, 0): 1}))
    D = gen_series_partial(G, "x")
    assert D.exps == (a - 1, 0)
    assert D.body.coeffs == {(0, 0): a, (1, 0): a + 1}


# --- BiPoly -----------------------------------------------------------------

def test_bipoly_at_curve():
    p = BiPoly.x() * (1 - BiPoly.x()) + BiPoly.y()
    got = p.at_curve(T, 2 - T)
    assert got == T * (1 - T) + 2 - T


# --- properties -------------------------------------------------------------

@given(ratfuncs, nonzero_ratfuncs)
def test_ratfunc_field(f, g):
    assert (f / g) * g == f
    assert f + (-f) == RatFunc(0)
    assert (f * g) / g == f


@settings(max_examples=40)
@given(ratfuncs.filter(regular_at_zero), ratfuncs.filter(regular_at_zero))
def test_taylor_homomorphism(f, g):
    N = 6
    lhs = (f * g).taylor(N)
    rhs = f.taylor(N) * g.taylor(N)
    assert lhs.truncate(N).coeffs == rhs.truncate(N).coeffs


@settings(max_examples=40)
@given(st.fractions(min_value=F(1, 5), max_value=3, max_denominator=5),
       st.lists(small_q, max_size=3), st.integers(-3, 3), st.integers(1, 4))
def test_pow_rational_round_trip(root, tail, p, q):
    # the constant term is a q-th power so that its q-th root stays rational
    S = uni([root ** q] + tail, INF)
    N = 6
    R = series_pow_rational(S, F(p, q), N)
    lhs = R ** q if q > 1 else R
    if p >= 0:
        rhs = (S ** p).truncate(N)
    else:
        rhs = S.inverse(N) ** (-p)
    assert lhs.truncate(N).coeffs == rhs.truncate(N).coeffs


body2 = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), small_q, max_size=6)


@settings(max_examples=40)
@given(small_q, small_q, body2)
def test_partials_commute(alpha, beta, terms):
    G = GenSeries((alpha, beta), TruncSeries(2, 6, terms))
    xy = gen_series_partial(gen_series_partial(G, "y"), "x")
    yx = gen_series_partial(gen_series_partial(G, "x"), "y")
    assert xy.exps == yx.exps
    top = min(xy.body.order, yx.body.order)
    assert xy.body.truncate(top).coeffs == yx.body.truncate(top).coeffs


@settings(max_examples=30)
@given(st.lists(small_q, min_size=2, max_size=4), st.lists(small_q, min_size=2, max_size=4))
def test_compose_agrees_with_polynomial_substitution(outer, inner):
    inner = [F(0)] + inner[1:]
    P, I = UniPoly(outer), UniPoly(inner)
    N = 5
    lhs = series_compose(uni(outer, INF), uni(inner, INF), N)
    rhs = P.compose(I)
    assert lhs.coefficient_list() == [rhs.c[k] if k < len(rhs.c) else 0 for k in range(N + 1)]
