import math

import pytest
from hypothesis import given, settings, strategies as st

from rrcong.qseries import (InsufficientPrecision, LaurentSeries, NonUnitLeadingCoefficient,
                            euler_product, pentagonal_euler, theta_full, theta_onesided, u5, v5)


def S(terms, prec):
    return LaurentSeries.from_dict(terms, prec)


def naive_euler(r, delta, prec):
    # direct product of (1 - q^{delta n}) factors, then powered by repeated multiplication
    f = [0] * prec
    f[0] = 1
    n = 1
    while delta * n < prec:
        step = delta * n
        g = f[:]
        for e in range(step, prec):
            g[e] -= f[e - step]
        f = g
        n += 1
    base = LaurentSeries(f, 0, prec)
    out = LaurentSeries.one(prec)
    for _ in range(abs(r)):
        out = out * base
    return out.invert() if r < 0 else out


def colored_partitions(colors, prec):
    # number of partitions into parts of `colors` colours, by the standard sigma recurrence
    sigma = [0] + [sum(d for d in range(1, n + 1) if n % d == 0) for n in range(1, prec)]
    c = [1] + [0] * (prec - 1)
    for n in range(1, prec):
        c[n] = colors * sum(sigma[k] * c[n - k] for k in range(1, n + 1)) // n
    return c


@st.composite
def series(draw, min_lo=-6, max_lo=6, unit=False):
    lo = draw(st.integers(min_lo, max_lo))
    length = draw(st.integers(1, 25))
    cs = draw(st.lists(st.integers(-50, 50), min_size=length, max_size=length))
    if unit:
        cs[0] = draw(st.sampled_from([1, -1]))
    extra = draw(st.integers(0, 10))
    return LaurentSeries(cs, lo, lo + length + extra)


# -- construction and invariants ----------------------------------------

def test_window_invariants():
    f = LaurentSeries([0, 0, 3, 0, 1, 7], -2, 3)
    assert f.min_exp == 0
    assert f.coeffs == {0: 3, 2: 1}
    assert all(f.min_exp <= e < f.prec for e in f.coeffs)


def test_reading_beyond_precision_is_an_error():
    f = S({0: 1}, 5)
    assert f.coeff(4) == 0
    with pytest.raises(InsufficientPrecision):
        f.coeff(5)
    with pytest.raises(InsufficientPrecision):
        f.truncate(6)


def test_zero_series_window():
    z = LaurentSeries.zero(10)
    assert z.is_zero() and z.min_exp < z.prec
    assert z.valuation5() == math.inf


# -- add -----------------------------------------------------------------

def test_add_cancellation():
    assert S({1: 1, 2: 1}, 10) + S({1: -1}, 10) == S({2: 1}, 10)


def test_add_identity():
    f = S({-3: 2, 4: 5}, 12)
    assert f + LaurentSeries.zero(12) == f


def test_add_strips_leading_zero():
    g = S({0: 1, 1: 6}, 10) + S({0: -1}, 10)
    assert g.min_exp == 1 and g.coeffs == {1: 6}


def test_add_takes_smaller_precision():
    assert (S({0: 1}, 10) + S({0: 1}, 4)).prec == 4


# -- mul -----------------------------------------------------------------

def test_mul_geometric_inverse():
    geo = LaurentSeries([1] * 20, 0, 20)
    assert (S({0: 1, 1: -1}, 20) * geo) == LaurentSeries.one(20)


def test_mul_laurent_exponents():
    assert (S({-5: 1}, 5) * S({5: 1}, 15)) == LaurentSeries.one(10)


def test_mul_square():
    one_q = S({0: 1, 1: 1}, 10)
    assert one_q * one_q == S({0: 1, 1: 2, 2: 1}, 10)


def test_mul_precision_rule():
    f = S({-5: 1, 0: 2}, 10)
    g = S({2: 1}, 20)
    # min(f.prec + g.val, g.prec + f.val)
    assert (f * g).prec == min(10 + 2, 20 - 5)


# -- invert / pow ----------------------------------------------------------

def test_invert_geometric():
    assert S({0: 1, 1: -1}, 15).invert() == LaurentSeries([1] * 15, 0, 15)


def test_invert_negates_exponent():
    f = S({-5: 1, -4: 3}, 10)
    inv = f.invert()
    assert inv.min_exp == 5 and inv.coeff(5) == 1 and inv.coeff(6) == -3
    assert (f * inv).truncate(5) == LaurentSeries.one(5)


def test_invert_non_unit():
    with pytest.raises(NonUnitLeadingCoefficient):
        S({0: 2, 1: 1}, 10).invert()


def test_pow_examples():
    one_q = S({0: 1, 1: 1}, 10)
    assert one_q ** 2 == S({0: 1, 1: 2, 2: 1}, 10)
    assert (S({0: 1, 3: 7}, 10) ** 0) == LaurentSeries.one(10)
    assert S({0: 1, 1: -1}, 12) ** -1 == LaurentSeries([1] * 12, 0, 12)


# -- substitute / theta / euler ----------------------------------------------

def test_substitute_qk():
    f = S({1: 1, 3: 1}, 4)
    assert f.substitute_qk(5) == S({5: 1, 15: 1}, 20)
    assert f.substitute_qk(1) == f
    assert S({-1: 1}, 3).substitute_qk(4).coeffs == {-4: 1}


def test_euler_product_matches_naive_product():
    prec = 80
    assert pentagonal_euler(prec) == naive_euler(1, 1, prec)
    assert euler_product(1, 1, prec).coeffs.keys() >= {0, 1, 2, 5, 7, 12}
    assert [euler_product(1, 1, prec).coeff(e) for e in (0, 1, 2, 5, 7, 12)] == [1, -1, -1, 1, 1, -1]
    for r, delta in [(3, 2), (-2, 4), (5, 5), (-1, 10), (2, 20)]:
        assert euler_product(r, delta, prec) == naive_euler(r, delta, prec)


def test_euler_product_colored_partitions():
    prec = 60
    f = euler_product(-6, 1, prec)
    assert f.dense(0, 5) == [1, 6, 27, 98, 315]
    assert f.dense(0) == colored_partitions(6, prec)


def test_euler_product_trivial():
    for delta in (1, 3, 7):
        assert euler_product(0, delta, 30) == LaurentSeries.one(30)


def test_theta():
    th = theta_onesided(40)
    assert th.coeffs == {1: 1, 4: 1, 9: 1, 16: 1, 25: 1, 36: 1}
    full = theta_full(40)
    assert full.coeffs == {0: 1, 1: 2, 4: 2, 9: 2, 16: 2, 25: 2, 36: 2}
    assert full - th.scale(2) == LaurentSeries.one(40)


# -- u5 / v5 ---------------------------------------------------------------

def test_u5_examples():
    assert u5(S({5: 1, 6: 1, 10: 1}, 15)) == S({1: 1, 2: 1}, 3)
    assert u5(LaurentSeries.one(10)) == LaurentSeries.one(2)
    assert u5(S({-10: 1, -1: 1}, 0)).coeffs == {-2: 1}


def test_u5_precision_rounds_up():
    assert u5(S({0: 1}, 11)).prec == 3
    assert u5(S({0: 1}, 10)).prec == 2


def test_valuation5():
    assert S({1: 25, 2: 125}, 5).valuation5() == 2
    assert LaurentSeries.zero(5).valuation5() == math.inf
    assert S({1: 5, 2: 3}, 5).valuation5() == 0
    assert v5(0) == math.inf and v5(-250) == 3


def test_json_roundtrip_large_coefficients():
    f = S({-3: 10 ** 6000 + 1, 2: -7}, 9)
    assert LaurentSeries.from_json(f.to_json()) == f


# -- properties ------------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(series(), series(), series())
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    left = f * (g + h)
    right = f * g + f * h
    p = min(left.prec, right.prec)
    assert left.truncate(p) == right.truncate(p)


@settings(max_examples=150, deadline=None)
@given(series(unit=True))
def test_invert_roundtrip(f):
    prod = f * f.invert()
    assert prod == LaurentSeries.one(prod.prec)


@settings(max_examples=150, deadline=None)
@given(series(), series(), st.integers(-20, 20))
def test_u5_linear(f, g, alpha):
    lhs = u5(f.scale(alpha) + g)
    rhs = u5(f).scale(alpha) + u5(g)
    assert lhs == rhs


@settings(max_examples=150, deadline=None)
@given(series(min_lo=-2, max_lo=3), series())
def test_u5_extracts_q5_factor(f, g):
    lhs = u5(f.substitute_qk(5) * g)
    rhs = f * u5(g)
    p = min(lhs.prec, rhs.prec)
    assert lhs.truncate(p) == rhs.truncate(p)


@settings(max_examples=60, deadline=None)
@given(st.integers(-6, 6), st.integers(1, 5), st.integers(20, 60), st.integers(1, 40))
def test_precision_soundness(r, delta, prec, extra):
    low = euler_product(r, delta, prec) * theta_onesided(prec)
    high = euler_product(r, delta, prec + extra) * theta_onesided(prec + extra)
    assert high.truncate(low.prec) == low
