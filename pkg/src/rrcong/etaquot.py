"""Eta quotients on Gamma_0(N): modularity test, cusps, orders, expansion."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .qseries import LaurentSeries, default_depth, euler_product


class FractionalLeadingPower(ValueError):
    """sum(delta * r_delta) is not divisible by 24, so the q-prefactor is fractional."""


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


@dataclass(frozen=True)
class EtaQuotient:
    """prod_{delta | N} eta(delta tau)^{r_delta}."""

    level: int
    exponents: tuple[tuple[int, int], ...]

    def __init__(self, level: int, exponents: dict[int, int] | None = None):
        exponents = dict(exponents or {})
        bad = [d for d in exponents if level % d]
        if bad:
            raise ValueError(f"exponent keys {bad} do not divide the level {level}")
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "exponents",
                           tuple(sorted((d, r) for d, r in exponents.items() if r)))

    @property
    def r(self) -> dict[int, int]:
        return dict(self.exponents)

    def vector(self) -> list[int]:
        """Exponents listed over all divisors of the level, in increasing order."""
        r = self.r
        return [r.get(d, 0) for d in divisors(self.level)]

    def __mul__(self, other: "EtaQuotient") -> "EtaQuotient":
        level = math.lcm(self.level, other.level)
        r = self.r
        for d, e in other.exponents:
            r[d] = r.get(d, 0) + e
        return EtaQuotient(level, r)

    def __pow__(self, k: int) -> "EtaQuotient":
        return EtaQuotient(self.level, {d: k * e for d, e in self.exponents})

    def at_level(self, level: int) -> "EtaQuotient":
        if level % self.level:
            raise ValueError(f"{level} is not a multiple of {self.level}")
        return EtaQuotient(level, self.r)

    def q_shift(self) -> Fraction:
        """Exponent of the q-prefactor, sum(delta r_delta) / 24."""
        return Fraction(sum(d * r for d, r in self.exponents), 24)

    def spec_string(self) -> str:
        body = " ".join(f"{d}:{e}" for d, e in zip(divisors(self.level), self.vector()))
        return f"N={self.level}; {body}"


def parse_eta(text: str) -> EtaQuotient:
    """Parse ``"N=20; 1:0 2:-2 4:4 5:0 10:2 20:-4"``."""
    m = re.fullmatch(r"\s*N\s*=\s*(\d+)\s*;?(.*)", text)
    if not m:
        raise ValueError(f"cannot parse eta quotient {text!r}")
    level = int(m.group(1))
    exps: dict[int, int] = {}
    for tok in m.group(2).split():
        d, _, e = tok.partition(":")
        if not _:
            raise ValueError(f"bad exponent token {tok!r}")
        exps[int(d)] = exps.get(int(d), 0) + int(e)
    return EtaQuotient(level, exps)


@dataclass
class NewmanVerdict:
    weight_zero: bool
    sum_delta_r: int
    sum_cofactor_r: int
    product_square: bool
    product: int

    @property
    def delta_condition(self) -> bool:
        return self.sum_delta_r % 24 == 0

    @property
    def cofactor_condition(self) -> bool:
        return self.sum_cofactor_r % 24 == 0

    @property
    def passed(self) -> bool:
        return (self.weight_zero and self.delta_condition
                and self.cofactor_condition and self.product_square)


def newman_check(e: EtaQuotient) -> NewmanVerdict:
    """The four conditions for an eta quotient to be a modular function on Gamma_0(N)."""
    N = e.level
    # |r| so the product stays an integer
    prod = 1
    for d, r in e.exponents:
        prod *= d ** abs(r)
    return NewmanVerdict(
        weight_zero=sum(r for _, r in e.exponents) == 0,
        sum_delta_r=sum(d * r for d, r in e.exponents),
        sum_cofactor_r=sum((N // d) * r for d, r in e.exponents),
        product_square=math.isqrt(prod) ** 2 == prod,
        product=prod,
    )


@dataclass(frozen=True, order=True)
class Cusp:
    c: int
    a: int
    level: int = field(compare=False)

    def __str__(self) -> str:
        return f"{self.a}/{self.c}"

    @property
    def is_infinity(self) -> bool:
        return self.c % self.level == 0


def cusp_representatives(N: int) -> list[Cusp]:
    """One a/c per cusp of Gamma_0(N), ordered as 1/N first, then by decreasing c."""
    out = []
    for c in sorted(divisors(N), reverse=True):
        g = math.gcd(c, N // c)
        for a0 in range(1, g + 1):
            if math.gcd(a0, g) != 1:
                continue
            a = a0
            while math.gcd(a, c) != 1:
                a += g
            out.append(Cusp(c=c, a=a, level=N))
    return out


def cusps_equivalent(a1: int, c1: int, a2: int, c2: int, N: int) -> bool:
    """Gamma_0(N)-equivalence of a1/c1 and a2/c2 (fractions in lowest terms).

    The pair (gcd(c, N), a * c/d mod gcd(d, N/d)) is invariant under the
    action and separates the cusps.
    """
    d1, d2 = math.gcd(c1, N), math.gcd(c2, N)
    if d1 != d2:
        return False
    g = math.gcd(d1, N // d1)
    return (a1 * (c1 // d1) - a2 * (c2 // d2)) % g == 0


def cusp_width(cusp: Cusp) -> int:
    N = cusp.level
    return N // math.gcd(cusp.c * cusp.c, N)


def ligozat_order(e: EtaQuotient, cusp: Cusp) -> Fraction:
    """Order of the eta quotient at the cusp a/c, in the local parameter there."""
    N = e.level
    if cusp.level != N:
        raise ValueError(f"cusp of level {cusp.level} used with an eta quotient of level {N}")
    c = cusp.c
    s = sum(Fraction(r * math.gcd(c, d) ** 2, d) for d, r in e.exponents)
    return Fraction(N, 24 * math.gcd(c * c, N)) * s


def cusp_orders(e: EtaQuotient) -> dict[Cusp, Fraction]:
    return {cusp: ligozat_order(e, cusp) for cusp in cusp_representatives(e.level)}


def valence_sum(e: EtaQuotient) -> Fraction:
    """Sum of orders over all cusps; zero for a modular eta quotient, which
    has neither zeros nor poles in the upper half plane."""
    return sum(cusp_orders(e).values(), Fraction(0))


@dataclass
class KInfVerdict:
    newman: NewmanVerdict
    orders: dict[Cusp, Fraction]
    offending: list[Cusp]

    @property
    def passed(self) -> bool:
        return self.newman.passed and not self.offending


def kinf_check(e: EtaQuotient) -> KInfVerdict:
    """Modular on Gamma_0(N) with poles only at the cusp at infinity."""
    orders = cusp_orders(e)
    offending = [c for c, o in orders.items() if not c.is_infinity and o < 0]
    return KInfVerdict(newman_check(e), orders, offending)


def expand(e: EtaQuotient, prec: int | None = None) -> LaurentSeries:
    """q-expansion, exact below q^prec."""
    prec = default_depth() if prec is None else prec
    shift = e.q_shift()
    if shift.denominator != 1:
        raise FractionalLeadingPower(f"q-prefactor exponent {shift} is not an integer")
    shift = int(shift)
    # the product part starts at q^0; compute it far enough for q^prec after the shift
    depth = max(prec - shift, 1)
    series = LaurentSeries.one(depth)
    for d, r in e.exponents:
        series = series * euler_product(r, d, depth)
    return series.shift(shift)


# the eta quotients that appear in the proof
T_ETA = EtaQuotient(5, {1: -6, 5: 6})
RHO_ETA = EtaQuotient(20, {1: 2, 4: 2, 5: -2, 10: 8, 20: -10})
SIGMA_ETA = EtaQuotient(20, {2: -2, 4: 4, 10: 2, 20: -4})
MU_ETA = EtaQuotient(20, {1: -1, 4: 1, 5: 5, 20: -5})
A_ETA = EtaQuotient(100, {1: -3, 2: 5, 4: -2, 25: 3, 50: -5, 100: 2})

NAMED_ETA = {"t": T_ETA, "rho": RHO_ETA, "sigma": SIGMA_ETA, "mu": MU_ETA, "A": A_ETA}
