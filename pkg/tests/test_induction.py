import json
import random

import pytest

from rrcong import operators as ops
from rrcong.induction import (EVEN_PREFACTOR, ODD_PREFACTOR, SKELETON_KINDS, LnValue,
                              NoRepresentation,
                              NonIntegralCoefficients, apply_u, claimed_power, decompose,
                              image_table, lambda_of, ln_algebraic, ln_direct, ln_iterate,
                              random_x_element, required_valuation, series_window,
                              skeleton_arrays, skeleton_extend, skeleton_image, skeleton_init,
                              theorem7_random, theorem8_check, x_membership)
from rrcong.partition import a_series, p_of
from rrcong.qseries import InsufficientPrecision, LaurentSeries
from rrcong.tpoly import TPolynomial, TPolyPair

KINDS = [("U0", "1"), ("U0", "p0"), ("U1", "1"), ("U1", "p1")]


@pytest.fixture(scope="module")
def pairs():
    return ln_algebraic(4)


# -- lambda ---------------------------------------------------------------

def test_lambda_examples():
    assert [lambda_of(n).value for n in (1, 2, 3, 4)] == [4, 24, 99, 599]
    with pytest.raises(ValueError):
        lambda_of(0)


def test_lambda_recurrences():
    lam = {n: lambda_of(n).value for n in range(1, 22)}
    for n in range(1, 11):
        assert 5 ** (2 * n) - 5 ** (2 * n - 1) + lam[2 * n - 1] == lam[2 * n]
        assert 5 ** (2 * n + 1) - 2 * 5 ** (2 * n) + lam[2 * n] == lam[2 * n + 1]
        assert (24 * lam[n]) % 5 ** n == 1 and 0 < lam[n] < 5 ** n


# -- L_n ------------------------------------------------------------------

def test_prefactor_tables():
    # the odd prefactor is the even one at q^5
    assert ODD_PREFACTOR == {5 * d: r for d, r in EVEN_PREFACTOR.items()}


def test_ln_direct_examples():
    assert ln_direct(0, 10).series == LaurentSeries.one(10)
    l1 = ln_direct(1, 20)
    assert l1.series.valuation == 1 and l1.series.coeff(1) == a_series(5).coeff(4) == 13
    assert 13 == 2 * 4 + p_of(4)
    l2 = ln_direct(2, 20)
    assert l2.series.valuation5() >= 1
    assert l2.quotient().prec == 20


def test_ln_iterate_examples():
    assert ln_iterate(1, 40).series == ops.named("p1", 40)
    assert ln_iterate(2, 30).series == ln_direct(2, 30).series
    assert ln_iterate(4, 12).quotient().prec == 12


def test_theorem4_cross_module():
    l1 = ops.U0(LaurentSeries.one(5 * 5 * 30))
    assert ops.U1(l1, 30) == ln_direct(2, 30).series


@pytest.mark.parametrize("n", [1, 2, 3])
def test_direct_equals_iterate(n):
    assert ln_direct(n, 25).series == ln_iterate(n, 25).series


def test_ln_iterate_precision():
    with pytest.raises(InsufficientPrecision):
        ln_iterate(2, 30, start_prec=100)


def test_quotient_rejects_non_divisible():
    with pytest.raises(NonIntegralCoefficients):
        LnValue(1, ln_direct(1, 10).series, 1).quotient()


# -- decompose ------------------------------------------------------------

def test_decompose_group_relation():
    rhs = TPolyPair(TPolynomial({0: -6, 1: -25}), parity=0)
    f = ops.U1(ops.t_power(-1, 200), 40)
    assert decompose(f, 0, 3) == rhs


def test_decompose_basis_element():
    got = decompose(ops.named("p1", 30), 1, 4)
    assert got.alpha.is_zero() and got.beta == TPolynomial({0: 1})


def test_decompose_l2(pairs):
    w = 2 * max(pairs[2].alpha.degree, pairs[2].beta.degree) + 8
    f = ln_iterate(2, w).series
    got = decompose(f, 0)
    assert got == pairs[2]
    assert ops.pair_series(got, w) == f
    assert x_membership(got.exact_div(5)).member


def test_decompose_no_representation():
    with pytest.raises(NoRepresentation):
        decompose(LaurentSeries.monomial(2, 1, 12), 0, 3)


def test_decompose_non_integral():
    # p0 + t vanishes mod 2
    half = (ops.named("p0", 20) + ops.named("t", 20))
    f = LaurentSeries.from_dict({e: c // 2 for e, c in half.coeffs.items()}, 20)
    with pytest.raises(NonIntegralCoefficients):
        decompose(f, 0, 3)


def test_decompose_window_checks():
    with pytest.raises(ValueError):
        decompose(LaurentSeries.monomial(-1, 1, 10), 0, 2)
    with pytest.raises(InsufficientPrecision):
        decompose(LaurentSeries.one(6), 0, 5)


# -- membership -----------------------------------------------------------

def test_membership_examples():
    cert = x_membership(TPolyPair(beta=TPolynomial({0: 1}), parity=1))
    assert cert.member and cert.r() == {0: 1} and cert.s() == {}
    cert = x_membership(TPolyPair(TPolynomial({1: 1}), parity=0))
    assert not cert.member and cert.min_margin == -1
    assert not x_membership(TPolyPair(TPolynomial({0: 5}), parity=0)).member


def test_required_valuations():
    assert [required_valuation("p", n, 0) for n in range(5)] == [0, 2, 5, 7, 10]
    assert [required_valuation("t", n, 0) for n in range(1, 5)] == [1, 3, 6, 8]
    assert [required_valuation("t", n, 1) for n in range(1, 5)] == [2, 4, 7, 9]


# -- algebraic operator and certificates ---------------------------------

def test_image_table_matches_relations():
    rels = {(r.op, r.factor, r.n): r.rhs for r in ops.load_relations()}
    for op, factor in KINDS:
        table = image_table(op, factor)
        assert all(table[n] == rels[(op, factor, n)] for n in range(-4, 1))


def test_algebraic_sequence(pairs):
    assert pairs[0] == TPolyPair(TPolynomial.constant(1), parity=0)
    assert pairs[1] == TPolyPair(beta=TPolynomial({0: 1}), parity=1)
    for n in range(1, 5):
        w = series_window(n, 30)
        assert ops.pair_series(pairs[n], w) == ln_iterate(n, w).series


def test_theorem8_small():
    rep = theorem8_check(4, window=20, series_check_max=3, decompose_max=2)
    assert rep.passed
    assert [e.claimed_power for e in rep.entries] == [claimed_power(n) for n in range(1, 5)]
    assert [e.parity for e in rep.entries] == [1, 0, 1, 0]
    assert all(e.certificate.min_margin >= 0 for e in rep.entries)


def test_theorem7_along_trajectory(pairs):
    for n in range(1, 4):
        g = pairs[n].exact_div(5 ** claimed_power(n))
        img = apply_u(g)
        if g.parity == 1:
            img = img.exact_div(5)
        assert x_membership(img).member


def test_theorem7_random():
    cases = theorem7_random(20, seed=3)
    assert len(cases) == 40 and all(c.passed for c in cases)


def test_random_elements_are_members():
    rng = random.Random(1)
    for j in (0, 1):
        for _ in range(20):
            assert x_membership(random_x_element(rng, j)).member


# -- skeleton -------------------------------------------------------------

def test_skeleton_examples():
    arr = skeleton_init()
    assert arr["a0"].entries[(0, -1)] == 1 and arr["a0"].entries[(1, -1)] == 1
    assert arr["a0"].coefficient(1, -1) == 25
    assert arr["c"].column(0) == {0: 1}
    assert arr["c"].negative_power == [(0, 0)]
    assert all(not a.support_violations for a in arr.values())
    assert {k.name for k in SKELETON_KINDS} == set(arr)


@pytest.mark.parametrize("op, factor", KINDS)
def test_skeleton_matches_direct(op, factor):
    arrays = skeleton_arrays(10)
    window = 30
    for n in range(1, 11):
        got = ops.pair_series(skeleton_image(arrays, op, factor, n), window)
        want = ops.OPERATORS[op](ops.basis_series(factor, n, ops.input_precision(window)), window)
        assert got == want


def test_skeleton_needs_columns():
    with pytest.raises(ValueError):
        skeleton_extend(skeleton_init(), 7)


def test_skeleton_non_integral(monkeypatch):
    real = ops.load_relations()
    broken = []
    for r in real:
        if (r.op, r.factor, r.n) == ("U0", "1", -1):
            alpha = TPolynomial({0: 1, 1: 26})
            r = ops.Relation(r.group, r.n, r.op, r.factor, TPolyPair(alpha, r.rhs.beta, 1))
        broken.append(r)
    monkeypatch.setattr(ops, "load_relations", lambda path=None: broken)
    with pytest.raises(ops.NonIntegralSkeleton):
        skeleton_init()


def test_skeleton_json():
    arrays = skeleton_arrays(3)
    body = json.dumps({k: a.to_json() for k, a in arrays.items()}, sort_keys=True)
    assert json.loads(body)["c"]["negative_power"] == [[0, 0]]
