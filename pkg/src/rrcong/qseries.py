"""Exact truncated Laurent series in q with integer coefficients.

A :class:`LaurentSeries` knows its coefficients for every exponent below
``prec``; anything at or above ``prec`` is unknown and reading it raises
:class:`InsufficientPrecision`.  Precision is propagated pessimistically
through every operation, so a coefficient that is reported is exact.

Storage is dense over ``[min_exp, prec)`` in a flint ``fmpz_poly`` (used
purely as a fast integer convolution kernel).
"""

from __future__ import annotations

import math
import os
from typing import Iterable, Mapping

import gmpy2
from flint import fmpz_poly

DEFAULT_DEPTH = 250


class InsufficientPrecision(ValueError):
    """A coefficient or result was requested beyond the known window."""


class NonUnitLeadingCoefficient(ValueError):
    """Series inversion needs a leading coefficient of +1 or -1."""


def default_depth() -> int:
    """Working truncation depth; ``RRC_PRECISION`` overrides the default."""
    raw = os.environ.get("RRC_PRECISION")
    if raw is None:
        return DEFAULT_DEPTH
    depth = int(raw)
    if depth < 1:
        raise ValueError(f"RRC_PRECISION must be >= 1, got {depth}")
    return depth


def v5(n: int) -> float | int:
    """Exponent of 5 in ``n``; ``math.inf`` for zero."""
    if n == 0:
        return math.inf
    return int(gmpy2.remove(gmpy2.mpz(n), 5)[1])


def parse_int(text: str) -> int:
    """Decimal string to int without the interpreter's digit-count limit."""
    return int(gmpy2.mpz(text))


def dec(n) -> str:
    """Decimal string for an arbitrarily large integer."""
    return gmpy2.mpz(int(n)).digits(10)


class LaurentSeries:
    """Immutable ``sum_{e >= min_exp} c_e q^e + O(q^prec)``."""

    __slots__ = ("_lo", "_poly", "_prec")

    def __init__(self, coeffs: Iterable[int] | fmpz_poly = (), min_exp: int = 0,
                 prec: int | None = None):
        poly = coeffs if isinstance(coeffs, fmpz_poly) else fmpz_poly(list(coeffs))
        if prec is None:
            prec = min_exp + max(poly.length(), 1)
        if poly.length() > prec - min_exp:
            poly = poly.truncate(max(prec - min_exp, 0))
        self._prec = prec
        if poly.is_zero():
            self._lo, self._poly = prec, poly
            return
        # strip leading zeros so min_exp is the true order
        cs = poly.coeffs()
        k = 0
        while cs[k] == 0:
            k += 1
        if k:
            poly = poly.right_shift(k)
        self._lo, self._poly = min_exp + k, poly

    # -- construction -----------------------------------------------------

    @classmethod
    def from_dict(cls, terms: Mapping[int, int], prec: int) -> "LaurentSeries":
        terms = {e: c for e, c in terms.items() if c and e < prec}
        if not terms:
            return cls((), prec - 1, prec)
        lo = min(terms)
        dense = [0] * (max(terms) - lo + 1)
        for e, c in terms.items():
            dense[e - lo] = c
        return cls(dense, lo, prec)

    @classmethod
    def zero(cls, prec: int) -> "LaurentSeries":
        return cls((), prec - 1, prec)

    @classmethod
    def one(cls, prec: int) -> "LaurentSeries":
        return cls.monomial(0, 1, prec)

    @classmethod
    def monomial(cls, exp: int, coeff: int, prec: int) -> "LaurentSeries":
        return cls.from_dict({exp: coeff}, prec)

    # -- inspection -------------------------------------------------------

    @property
    def prec(self) -> int:
        return self._prec

    @property
    def valuation(self) -> int:
        """Order of the series; ``prec`` when the window is all zeros."""
        return self._lo

    @property
    def min_exp(self) -> int:
        # the zero window keeps min_exp < prec
        return self._lo if self._lo < self._prec else self._prec - 1

    def is_zero(self) -> bool:
        return self._poly.is_zero()

    @property
    def coeffs(self) -> dict[int, int]:
        return {self._lo + i: int(c) for i, c in enumerate(self._poly.coeffs()) if c}

    def coeff(self, e: int) -> int:
        if e >= self._prec:
            raise InsufficientPrecision(f"coefficient of q^{e} requested, series known below q^{self._prec}")
        i = e - self._lo
        if i < 0 or i >= self._poly.length():
            return 0
        return int(self._poly[i])

    def __getitem__(self, e: int) -> int:
        return self.coeff(e)

    def dense(self, start: int, stop: int | None = None) -> list[int]:
        """Coefficients for exponents ``start <= e < stop`` (default ``prec``)."""
        stop = self._prec if stop is None else stop
        if stop > self._prec:
            raise InsufficientPrecision(f"window up to q^{stop - 1} requested, known below q^{self._prec}")
        return [self.coeff(e) if e >= self._lo else 0 for e in range(start, stop)]

    def leading_coefficient(self) -> int:
        if self.is_zero():
            raise InsufficientPrecision("series vanishes on its whole window")
        return int(self._poly[0])

    def valuation5(self) -> float | int:
        """Minimum 5-adic valuation over the stored coefficients."""
        return min((v5(int(c)) for c in self._poly.coeffs() if c), default=math.inf)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (self._prec == other._prec and self._lo == other._lo
                and self._poly == other._poly)

    def __hash__(self) -> int:
        return hash((self._prec, self._lo, tuple(int(c) for c in self._poly.coeffs())))

    def __repr__(self) -> str:
        terms = []
        for e, c in sorted(self.coeffs.items())[:8]:
            terms.append(f"{c}*q^{e}")
        body = " + ".join(terms) if terms else "0"
        return f"LaurentSeries({body} + O(q^{self._prec}))"

    # -- window manipulation ----------------------------------------------

    def truncate(self, prec: int) -> "LaurentSeries":
        if prec > self._prec:
            raise InsufficientPrecision(f"cannot raise precision from {self._prec} to {prec}")
        if prec == self._prec:
            return self
        return LaurentSeries(self._poly, self._lo, prec)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by the exact monomial q^k."""
        return LaurentSeries(self._poly, self._lo + k, self._prec + k)

    def first_difference(self, other: "LaurentSeries") -> int | None:
        """Lowest exponent where the two series differ on their common window."""
        p = min(self._prec, other._prec)
        diff = self.truncate(p) - other.truncate(p)
        return None if diff.is_zero() else diff.valuation

    # -- ring operations --------------------------------------------------

    def _coerce(self, other) -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            return other
        if isinstance(other, int):
            return LaurentSeries.monomial(0, other, max(self._prec, 1))
        return NotImplemented

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(-self._poly, self._lo, self._prec)

    def __add__(self, other) -> "LaurentSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self._prec, other._prec)
        lo = min(self._lo, other._lo, prec - 1)
        a = self._poly.left_shift(self._lo - lo) if self._lo < prec else fmpz_poly([])
        b = other._poly.left_shift(other._lo - lo) if other._lo < prec else fmpz_poly([])
        return LaurentSeries(a + b, lo, prec)

    __radd__ = __add__

    def __sub__(self, other) -> "LaurentSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LaurentSeries":
        return (-self) + other

    def scale(self, k: int) -> "LaurentSeries":
        return LaurentSeries(self._poly * k, self._lo, self._prec)

    def __mul__(self, other) -> "LaurentSeries":
        if isinstance(other, int):
            return self.scale(other)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        prec = min(self._prec + other._lo, other._prec + self._lo)
        lo = self._lo + other._lo
        n = prec - lo
        if n <= 0 or self.is_zero() or other.is_zero():
            return LaurentSeries.zero(prec)
        return LaurentSeries(self._poly.mul_low(other._poly, n), lo, prec)

    __rmul__ = __mul__

    def invert(self) -> "LaurentSeries":
        """Multiplicative inverse; the leading coefficient must be a unit."""
        if self.is_zero():
            raise NonUnitLeadingCoefficient("cannot invert a series that vanishes on its window")
        lead = int(self._poly[0])
        if lead not in (1, -1):
            raise NonUnitLeadingCoefficient(f"leading coefficient {lead} is not +-1")
        n = self._prec - self._lo
        unit = self._poly
        # Newton iteration g <- g (2 - u g), doubling the correct length
        g = fmpz_poly([lead])
        k = 1
        while k < n:
            k = min(2 * k, n)
            e = unit.mul_low(g, k)
            g = g.mul_low(fmpz_poly([2]) - e, k)
        return LaurentSeries(g, -self._lo, self._prec - 2 * self._lo)

    def __pow__(self, k: int) -> "LaurentSeries":
        if not isinstance(k, int):
            return NotImplemented
        base = self
        if k < 0:
            base, k = self.invert(), -k
        result = LaurentSeries.one(base._prec - base._lo) if k == 0 else None
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def substitute_qk(self, k: int) -> "LaurentSeries":
        """f(q) -> f(q^k)."""
        if k < 1:
            raise ValueError("substitution exponent must be positive")
        if k == 1:
            return self
        cs = self._poly.coeffs()
        dense = [0] * (k * (len(cs) - 1) + 1) if cs else []
        for i, c in enumerate(cs):
            dense[k * i] = c
        return LaurentSeries(fmpz_poly(dense), k * self._lo, k * self._prec)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "prec": self._prec,
            "terms": [[e, dec(c)] for e, c in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "LaurentSeries":
        return cls.from_dict({int(e): parse_int(c) for e, c in data["terms"]}, int(data["prec"]))


# -- module-level operations ---------------------------------------------


def add(f: LaurentSeries, g: LaurentSeries) -> LaurentSeries:
    return f + g


def neg(f: LaurentSeries) -> LaurentSeries:
    return -f


def scale(f: LaurentSeries, k: int) -> LaurentSeries:
    return f.scale(k)


def mul(f: LaurentSeries, g: LaurentSeries) -> LaurentSeries:
    return f * g


def invert(f: LaurentSeries) -> LaurentSeries:
    return f.invert()


def pow(f: LaurentSeries, k: int) -> LaurentSeries:  # noqa: A001 - mirrors the series API
    return f ** k


def substitute_qk(f: LaurentSeries, k: int) -> LaurentSeries:
    return f.substitute_qk(k)


def coeff(f: LaurentSeries, e: int) -> int:
    return f.coeff(e)


def valuation5(f: LaurentSeries) -> float | int:
    return f.valuation5()


def u5(f: LaurentSeries) -> LaurentSeries:
    """U_5: keep every fifth coefficient, q^{5m} -> q^m."""
    prec = -((-f.prec) // 5)
    terms = {e // 5: c for e, c in f.coeffs.items() if e % 5 == 0}
    return LaurentSeries.from_dict(terms, prec) if terms else LaurentSeries.zero(prec)


def pentagonal_euler(prec: int) -> LaurentSeries:
    """(q;q)_inf = sum_k (-1)^k q^{k(3k-1)/2}, exact below q^prec."""
    dense = [0] * max(prec, 1)
    k = 0
    while True:
        e1 = k * (3 * k - 1) // 2
        if e1 >= prec:
            break
        sign = -1 if k % 2 else 1
        dense[e1] += sign
        e2 = k * (3 * k + 1) // 2
        if k and e2 < prec:
            dense[e2] += sign
        k += 1
    return LaurentSeries(dense, 0, prec)


def euler_product(r: int, delta: int, prec: int | None = None) -> LaurentSeries:
    """(q^delta; q^delta)_inf ** r below q^prec."""
    prec = default_depth() if prec is None else prec
    if delta < 1:
        raise ValueError("delta must be a positive integer")
    if r == 0:
        return LaurentSeries.one(prec)
    base = pentagonal_euler(-(-prec // delta))
    return (base ** r).substitute_qk(delta).truncate(prec)


def theta_onesided(prec: int | None = None) -> LaurentSeries:
    """sum_{r >= 1} q^{r^2}."""
    prec = default_depth() if prec is None else prec
    return LaurentSeries.from_dict({r * r: 1 for r in range(1, math.isqrt(max(prec - 1, 0)) + 1)}, prec)


def theta_full(prec: int | None = None) -> LaurentSeries:
    """sum_{r in Z} q^{r^2}."""
    prec = default_depth() if prec is None else prec
    return theta_onesided(prec).scale(2) + 1
