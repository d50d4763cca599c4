"""The named modular functions, U^(0), U^(1), the modular equation and the
twenty fundamental relations, checked as truncated q-series identities."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import etaquot
from .qseries import InsufficientPrecision, LaurentSeries, u5
from .tpoly import TPolynomial, TPolyPair

NAMES = ("t", "rho", "sigma", "mu", "A", "p0", "p1")
LEADING_EXPONENT = {"t": 1, "rho": -5, "sigma": -2, "mu": -3, "A": 1}
DEFAULT_WINDOW = 150


class VerificationFailed(AssertionError):
    """A series identity failed; the message names the first bad exponent."""


class NonIntegralSkeleton(ArithmeticError):
    """A modular-equation coefficient is not divisible by its prescribed power of 5."""


# p_j as sums of coeff * rho^a * sigma^b * mu^c, listed as (coeff, a, b, c)
P_MONOMIALS = {
    "p0": ((31, -1, 0, 0), (-22, -1, 1, 0), (-9, -1, 2, 0), (-208, -2, 0, 0),
           (-96, -2, 1, 0), (304, -2, 2, 0), (-32, -1, 0, 1), (416, -2, 0, 1),
           (416, -2, 1, 1), (-208, -2, 0, 2)),
    "p1": ((261, -1, 0, 0), (126, -1, 1, 0), (13, -1, 2, 0), (-960, -2, 0, 0),
           (-5120, -2, 1, 0), (-320, -2, 2, 0), (64, -1, 0, 1), (320, -2, 0, 1),
           (-1280, -2, 1, 1), (640, -2, 0, 2)),
}

_cache: dict[str, LaurentSeries] = {}


def _build(name: str, prec: int) -> LaurentSeries:
    if name in etaquot.NAMED_ETA:
        return etaquot.expand(etaquot.NAMED_ETA[name], prec)
    # every monomial has order >= 1 and the bases lose at most 3 orders
    # through products, so bases computed to prec + 3 are plenty
    base = prec + 3
    rho_inv = named("rho", base).invert()
    sigma, mu = named("sigma", base), named("mu", base)
    rho_pows = {-1: rho_inv, -2: rho_inv * rho_inv}
    sig_pows = {0: None, 1: sigma, 2: sigma * sigma}
    mu_pows = {0: None, 1: mu, 2: mu * mu}
    total = LaurentSeries.zero(prec)
    for c, a, b, m in P_MONOMIALS[name]:
        term = rho_pows[a]
        for extra in (sig_pows[b], mu_pows[m]):
            if extra is not None:
                term = term * extra
        total = total + term.scale(c)
    if total.prec < prec:
        raise InsufficientPrecision(f"{name} reached only q^{total.prec}")
    return total.truncate(prec)


def named(name: str, prec: int) -> LaurentSeries:
    """q-expansion of one of t, rho, sigma, mu, A, p0, p1, exact below q^prec."""
    if name not in NAMES:
        raise KeyError(f"unknown function {name!r}; choose from {', '.join(NAMES)}")
    hit = _cache.get(name)
    if hit is None or hit.prec < prec:
        hit = _build(name, prec)
        _cache[name] = hit
    return hit.truncate(prec)


def t_power(n: int, prec: int) -> LaurentSeries:
    """t^n below q^prec (n may be negative)."""
    if n >= 0:
        return (named("t", prec) ** n).truncate(prec) if n else LaurentSeries.one(prec)
    # t^-1 = q^-1 (...) loses two orders on inversion and one per extra factor
    inv = named("t", prec - n + 2).invert()
    return (inv ** (-n)).truncate(prec)


def basis_series(factor: str, n: int, prec: int) -> LaurentSeries:
    """factor * t^n below q^prec, where factor is "1", "p0" or "p1"."""
    if factor == "1":
        return t_power(n, prec)
    # p_j has order >= 1 and t^n has order n
    return (named(factor, prec - n) * t_power(n, prec - 1)).truncate(prec)


def _finish(out: LaurentSeries, prec: int | None) -> LaurentSeries:
    if prec is None:
        return out
    if out.prec < prec:
        raise InsufficientPrecision(f"operator output known below q^{out.prec}, need q^{prec}")
    return out.truncate(prec)


def U1(f: LaurentSeries, prec: int | None = None) -> LaurentSeries:
    """U_5 f; the result is exact below q^ceil(f.prec / 5)."""
    return _finish(u5(f), prec)


def U0(f: LaurentSeries, prec: int | None = None) -> LaurentSeries:
    """U_5 (A f)."""
    a = named("A", max(f.prec - f.valuation + 1, 1))
    return _finish(u5(a * f), prec)


OPERATORS = {"U0": U0, "U1": U1}


def input_precision(prec: int) -> int:
    """Input depth that makes either operator exact below q^prec."""
    return 5 * prec


# modular equation t^5 + sum_j a_j(5 tau) t^j = 0

@dataclass(frozen=True)
class ModEqCoefficients:
    a: tuple[TPolynomial, ...]

    def __getitem__(self, j: int) -> TPolynomial:
        return self.a[j]


def modeq_coeffs() -> ModEqCoefficients:
    return ModEqCoefficients((
        TPolynomial({1: -1}),
        TPolynomial({1: -6 * 5, 2: -5**3}),
        TPolynomial({1: -63 * 5, 2: -6 * 5**4, 3: -5**6}),
        TPolynomial({1: -52 * 5**2, 2: -63 * 5**4, 3: -6 * 5**7, 4: -5**9}),
        TPolynomial({1: -63 * 5**2, 2: -52 * 5**5, 3: -63 * 5**7, 4: -6 * 5**10, 5: -5**12}),
    ))


@dataclass
class CheckResult:
    name: str
    passed: bool
    window: int
    compared: int
    detail: str = ""
    data: dict = field(default_factory=dict)

    def require(self) -> "CheckResult":
        if not self.passed:
            raise VerificationFailed(f"{self.name}: {self.detail}")
        return self

    def to_json(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "window": self.window,
               "coefficients_compared": self.compared}
        if self.detail:
            out["detail"] = self.detail
        if self.data:
            out["data"] = self.data
        return out


def _compare(name: str, lhs: LaurentSeries, rhs: LaurentSeries, window: int) -> CheckResult:
    if lhs.prec < window or rhs.prec < window:
        raise InsufficientPrecision(f"{name}: sides known below q^{min(lhs.prec, rhs.prec)}")
    lhs, rhs = lhs.truncate(window), rhs.truncate(window)
    low = min(lhs.min_exp, rhs.min_exp, 0)
    bad = lhs.first_difference(rhs)
    if bad is None:
        return CheckResult(name, True, window, window - low)
    return CheckResult(name, False, window, bad - low,
                       f"coefficients of q^{bad} differ: {lhs[bad]} vs {rhs[bad]}",
                       {"exponent": bad})


def verify_modeq(prec: int = 100) -> CheckResult:
    """t^5 + sum_j a_j(t(q^5)) t^j vanishes below q^prec."""
    t = named("t", prec)
    t5 = named("t", -(-prec // 5)).substitute_qk(5)
    coeffs = modeq_coeffs()
    total = (t ** 5).truncate(prec)
    tj = LaurentSeries.one(prec)
    for j in range(5):
        total = total + (coeffs[j].evaluate(t5, prec) * tj).truncate(prec)
        tj = (tj * t).truncate(prec)
    return _compare("modular equation", total, LaurentSeries.zero(prec), prec)


def s_coeffs() -> dict[tuple[int, int], int]:
    """s(j, l) with a_j = sum_l s(j, l) 5^floor((5l + j - 4)/2) t^l."""
    coeffs = modeq_coeffs()
    out = {}
    for j in range(5):
        for l in range(1, 6):
            c = coeffs[j][l]
            power = 5 ** ((5 * l + j - 4) // 2)
            q, r = divmod(c, power)
            if r:
                raise NonIntegralSkeleton(f"a_{j}: coefficient {c} of t^{l} not divisible by {power}")
            out[(j, l)] = q
    return out


# the twenty relations

@dataclass(frozen=True)
class Relation:
    group: str
    n: int
    op: str
    factor: str
    rhs: TPolyPair

    @property
    def label(self) -> str:
        inner = "t^%d" % self.n if self.n else "1"
        if self.factor != "1":
            inner = f"{self.factor}*{inner}" if self.n else self.factor
        return f"{self.group}: {self.op}{{{inner}}}"

    def to_json(self) -> dict:
        return {"group": self.group, "n": self.n,
                "lhs": {"op": self.op, "factor": self.factor, "power": self.n},
                "rhs": {"const_poly": self.rhs.alpha.to_json(),
                        "p_poly": self.rhs.beta.to_json()}}


def output_parity(op: str) -> int:
    """U0 lands in S_1 (second generator p1), U1 lands in S_0 (p0)."""
    return 1 if op == "U0" else 0


def load_relations(path: str | Path | None = None) -> list[Relation]:
    if path is None:
        text = resources.files("rrcong").joinpath("data/relations.json").read_text()
    else:
        text = Path(path).read_text()
    out = []
    for item in json.loads(text)["relations"]:
        op = item["lhs"]["op"]
        rhs = TPolyPair(TPolynomial.from_json(item["rhs"]["const_poly"]),
                        TPolynomial.from_json(item["rhs"]["p_poly"]), output_parity(op))
        out.append(Relation(item["group"], int(item["lhs"]["power"]), op,
                            item["lhs"].get("factor", "1"), rhs))
    return out


def pair_series(pair: TPolyPair, prec: int) -> LaurentSeries:
    """g_alpha(t) + p_j g_beta(t) below q^prec."""
    low = min([n for n, _ in pair.alpha.items()] + [n for n, _ in pair.beta.items()] + [0])
    # t^-k below q^prec needs t to prec + k + 1
    t = named("t", prec - low + 2)
    t_inv = t.invert() if low < 0 else None
    out = pair.alpha.evaluate(t, prec, t_inv)
    if not pair.beta.is_zero():
        # p_j has order >= 1
        b = pair.beta.evaluate(t, prec - 1, t_inv)
        p = named(f"p{pair.parity}", prec - min(pair.beta.low, 0))
        out = out + (p * b).truncate(prec)
    return out


def relation_lhs(rel: Relation, window: int) -> LaurentSeries:
    f = basis_series(rel.factor, rel.n, input_precision(window))
    return OPERATORS[rel.op](f, window)


def check_relation(rel: Relation, window: int = DEFAULT_WINDOW) -> CheckResult:
    return _compare(rel.label, relation_lhs(rel, window), pair_series(rel.rhs, window), window)


def _check_indexed(args: tuple[int, int]) -> CheckResult:
    i, window = args
    return check_relation(load_relations()[i], window)


def verify_group_relations(window: int = DEFAULT_WINDOW, parallel: int = 1,
                           relations: Sequence[Relation] | None = None) -> list[CheckResult]:
    """Check every relation as an identity of q-series below q^window."""
    if relations is not None or parallel <= 1:
        return [check_relation(r, window) for r in (relations or load_relations())]
    jobs = [(i, window) for i in range(len(load_relations()))]
    with ProcessPoolExecutor(max_workers=parallel) as pool:
        return list(pool.map(_check_indexed, jobs))


PRINCIPAL_PART = (1, -44, -138, -372, -989, -1584, -2814, -4356, -5897, -9508, -12696)


def verify_principal_part_example(prec: int = 30) -> CheckResult:
    """rho^2 U0{t^-1} and rho^2 (1 + 25t - 5 p1) share the displayed principal part."""
    if prec < 1:
        raise ValueError("prec must be positive")
    # rho^2 has order -10, so both factors are needed to prec + 10
    inner = prec + 10
    rho2 = named("rho", inner) ** 2
    lhs = (rho2 * U0(t_power(-1, input_precision(inner)), inner)).truncate(prec)
    rhs_pair = TPolyPair(TPolynomial({0: 1, 1: 25}), TPolynomial({0: -5}), 1)
    rhs = (rho2 * pair_series(rhs_pair, inner)).truncate(prec)
    expected = LaurentSeries(PRINCIPAL_PART, -10, 1)
    for label, side in (("lhs", lhs), ("rhs", rhs)):
        bad = side.truncate(1).first_difference(expected)
        if bad is not None:
            return CheckResult("principal part", False, prec, bad + 10,
                               f"{label} coefficient of q^{bad} is {side[bad]}, expected {expected[bad]}",
                               {"exponent": bad})
    res = _compare("principal part", lhs, rhs, prec)
    res.data["principal_part"] = [str(c) for c in PRINCIPAL_PART]
    return res


def u5_t_recursion(window: Sequence[LaurentSeries], t: LaurentSeries | None = None) -> LaurentSeries:
    """U{g t^k} = -sum_j a_j(t) U{g t^(k+j-5)} from the five images for k-5 .. k-1."""
    if len(window) != 5:
        raise ValueError("the recursion needs exactly five consecutive images")
    prec = min(s.prec for s in window)
    low = min(s.min_exp for s in window)
    # a_j(t) has order >= 1, so t is needed a little past the window
    depth = prec - low + 1
    if t is None:
        t = named("t", depth)
    elif t.prec < depth:
        raise InsufficientPrecision(f"t known below q^{t.prec}, need q^{depth}")
    coeffs = modeq_coeffs()
    total = None
    for j, s in enumerate(window):
        term = coeffs[j].evaluate(t, depth) * s
        total = term if total is None else total + term
    return -total.truncate(prec)


def pair_t_recursion(window: Sequence[TPolyPair]) -> TPolyPair:
    """The same recursion on exact representations in Z[t] + p_j Z[t]."""
    if len(window) != 5:
        raise ValueError("the recursion needs exactly five consecutive images")
    coeffs = modeq_coeffs()
    total = TPolyPair(parity=window[0].parity)
    for j, w in enumerate(window):
        total = total + w * coeffs[j]
    return -total
