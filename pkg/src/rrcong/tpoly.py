"""Laurent polynomials in t and pairs g_alpha(t) + p_j g_beta(t)."""

from __future__ import annotations

from typing import Iterable, Mapping

from flint import fmpz_poly

from .qseries import InsufficientPrecision, LaurentSeries, dec, parse_int, v5


class TPolynomial:
    """Finitely supported integer combination of powers of t (negative powers allowed)."""

    __slots__ = ("_poly", "_low")

    def __init__(self, coeffs: Mapping[int, int] | fmpz_poly | None = None, low: int = 0):
        if coeffs is None:
            poly = fmpz_poly([])
        elif isinstance(coeffs, fmpz_poly):
            poly = coeffs
        else:
            items = {e: c for e, c in coeffs.items() if c}
            if items:
                low = min(items)
                dense = [0] * (max(items) - low + 1)
                for e, c in items.items():
                    dense[e - low] = c
                poly = fmpz_poly(dense)
            else:
                poly = fmpz_poly([])
        if poly.is_zero():
            self._poly, self._low = poly, 0
            return
        cs = poly.coeffs()
        k = 0
        while cs[k] == 0:
            k += 1
        self._poly = poly.right_shift(k) if k else poly
        self._low = low + k

    @classmethod
    def monomial(cls, n: int, c: int = 1) -> "TPolynomial":
        return cls({n: c})

    @classmethod
    def constant(cls, c: int) -> "TPolynomial":
        return cls({0: c})

    @property
    def poly(self) -> fmpz_poly:
        """Underlying polynomial; the t-exponent of its constant term is ``low``."""
        return self._poly

    @property
    def low(self) -> int:
        return self._low

    @property
    def degree(self) -> int:
        return self._low + self._poly.degree() if not self.is_zero() else -1

    def is_zero(self) -> bool:
        return self._poly.is_zero()

    def items(self) -> Iterable[tuple[int, int]]:
        for i, c in enumerate(self._poly.coeffs()):
            if c:
                yield self._low + i, int(c)

    def to_dict(self) -> dict[int, int]:
        return dict(self.items())

    def __getitem__(self, n: int) -> int:
        i = n - self._low
        if i < 0 or i >= self._poly.length():
            return 0
        return int(self._poly[i])

    def __len__(self) -> int:
        return sum(1 for c in self._poly.coeffs() if c)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = TPolynomial.constant(other)
        if not isinstance(other, TPolynomial):
            return NotImplemented
        return self._low == other._low and self._poly == other._poly

    def __hash__(self) -> int:
        return hash((self._low, str(self._poly)))

    def __repr__(self) -> str:
        if self.is_zero():
            return "TPolynomial(0)"
        terms = list(self.items())
        shown = " + ".join(f"{c}*t^{n}" for n, c in terms[:6])
        if len(terms) > 6:
            shown += f" + ... ({len(terms)} terms, degree {self.degree})"
        return f"TPolynomial({shown})"

    def _aligned(self, other: "TPolynomial") -> tuple[fmpz_poly, fmpz_poly, int]:
        if self.is_zero():
            return fmpz_poly([]), other._poly, other._low
        if other.is_zero():
            return self._poly, fmpz_poly([]), self._low
        low = min(self._low, other._low)
        return (self._poly.left_shift(self._low - low),
                other._poly.left_shift(other._low - low), low)

    def __add__(self, other) -> "TPolynomial":
        if isinstance(other, int):
            other = TPolynomial.constant(other)
        a, b, low = self._aligned(other)
        return TPolynomial(a + b, low)

    __radd__ = __add__

    def __neg__(self) -> "TPolynomial":
        return TPolynomial(-self._poly, self._low)

    def __sub__(self, other) -> "TPolynomial":
        if isinstance(other, int):
            other = TPolynomial.constant(other)
        a, b, low = self._aligned(other)
        return TPolynomial(a - b, low)

    def __rsub__(self, other) -> "TPolynomial":
        return (-self) + other

    def __mul__(self, other) -> "TPolynomial":
        if isinstance(other, int):
            return TPolynomial(self._poly * other, self._low)
        if not isinstance(other, TPolynomial):
            return NotImplemented
        return TPolynomial(self._poly * other._poly, self._low + other._low)

    __rmul__ = __mul__

    def shift(self, k: int) -> "TPolynomial":
        """Multiply by t^k."""
        return TPolynomial(self._poly, self._low + k)

    def exact_div(self, k: int) -> "TPolynomial":
        """Divide every coefficient by ``k``; raises if any division is inexact."""
        out = {}
        for n, c in self.items():
            quo, rem = divmod(c, k)
            if rem:
                raise ArithmeticError(f"coefficient of t^{n} is not divisible by {k}")
            out[n] = quo
        return TPolynomial(out)

    def valuation5(self):
        return min((v5(c) for _, c in self.items()), default=float("inf"))

    def evaluate(self, t: LaurentSeries, prec: int, t_inv: LaurentSeries | None = None) -> LaurentSeries:
        """Substitute the series ``t`` (positive order) and return the result below q^prec."""
        if not self.is_zero() and t.valuation < 1:
            raise ValueError("evaluate expects a series of positive order")
        result = LaurentSeries.zero(prec)
        pos = {n: c for n, c in self.items() if 0 <= n < prec}
        neg = {n: c for n, c in self.items() if n < 0}
        if pos:
            if t.prec < prec:
                raise InsufficientPrecision(f"t known below q^{t.prec}, need q^{prec}")
            acc = LaurentSeries.zero(prec)
            for n in range(max(pos), -1, -1):
                acc = (acc * t).truncate(prec) + pos.get(n, 0)
            result = result + acc
        if neg:
            if t_inv is None:
                t_inv = t.invert()
            depth = -min(neg)
            acc = LaurentSeries.zero(prec + depth * t.valuation)
            for k in range(depth, 0, -1):
                acc = acc + neg.get(-k, 0)
                acc = acc * t_inv
            if acc.prec < prec:
                raise InsufficientPrecision(f"t^-1 too short to reach q^{prec}")
            result = result + acc.truncate(prec)
        return result

    def to_json(self) -> list:
        return [[n, dec(c)] for n, c in self.items()]

    @classmethod
    def from_json(cls, data: Iterable) -> "TPolynomial":
        return cls({int(n): parse_int(c) for n, c in data})


class TPolyPair:
    """The element ``g_alpha(t) + p_j * g_beta(t)`` of S_j."""

    __slots__ = ("alpha", "beta", "parity")

    def __init__(self, alpha: TPolynomial | None = None, beta: TPolynomial | None = None,
                 parity: int = 0):
        if parity not in (0, 1):
            raise ValueError("parity must be 0 or 1")
        self.alpha = alpha if alpha is not None else TPolynomial()
        self.beta = beta if beta is not None else TPolynomial()
        self.parity = parity

    def __repr__(self) -> str:
        return f"TPolyPair(j={self.parity}, alpha={self.alpha!r}, beta={self.beta!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, TPolyPair):
            return NotImplemented
        return (self.parity == other.parity and self.alpha == other.alpha
                and self.beta == other.beta)

    def _check(self, other: "TPolyPair") -> None:
        if other.parity != self.parity:
            raise ValueError("cannot combine elements of S_0 and S_1")

    def __add__(self, other: "TPolyPair") -> "TPolyPair":
        self._check(other)
        return TPolyPair(self.alpha + other.alpha, self.beta + other.beta, self.parity)

    def __sub__(self, other: "TPolyPair") -> "TPolyPair":
        self._check(other)
        return TPolyPair(self.alpha - other.alpha, self.beta - other.beta, self.parity)

    def __neg__(self) -> "TPolyPair":
        return TPolyPair(-self.alpha, -self.beta, self.parity)

    def __mul__(self, k) -> "TPolyPair":
        """Scale by an integer or multiply by an element of Z[t, 1/t]."""
        return TPolyPair(self.alpha * k, self.beta * k, self.parity)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.alpha.is_zero() and self.beta.is_zero()

    def exact_div(self, k: int) -> "TPolyPair":
        return TPolyPair(self.alpha.exact_div(k), self.beta.exact_div(k), self.parity)

    def valuation5(self):
        return min(self.alpha.valuation5(), self.beta.valuation5())

    def to_json(self) -> dict:
        return {"parity": self.parity, "const_poly": self.alpha.to_json(),
                "p_poly": self.beta.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> "TPolyPair":
        return cls(TPolynomial.from_json(data["const_poly"]),
                   TPolynomial.from_json(data["p_poly"]), int(data["parity"]))
