"""Rogers-Ramanujan subpartitions, A_1(m), p(m), a(m) and congruence checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

from .qseries import (InsufficientPrecision, LaurentSeries, default_depth, euler_product,
                      pentagonal_euler, theta_onesided)

BRUTE_FORCE_BOUND = 60


class BoundExceeded(ValueError):
    """Brute-force enumeration was asked for m above BRUTE_FORCE_BOUND."""


def rr_subpartition(parts: Sequence[int]) -> int:
    """Length of the Rogers-Ramanujan subpartition of a nonincreasing partition.

    That is the longest prefix a_1 > a_2 > ... > a_l with consecutive gaps of
    at least 2 which also satisfies a_l > a_{l+1} (a_{k+1} = 0 at the end).
    """
    k = len(parts)
    best = 0
    for l in range(1, k + 1):
        if l > 1 and parts[l - 2] - parts[l - 1] < 2:
            break
        nxt = parts[l] if l < k else 0
        if parts[l - 1] > nxt:
            best = l
    return best


def partitions(m: int) -> Iterator[tuple[int, ...]]:
    """All partitions of m as nonincreasing tuples, in reverse lexicographic order."""
    if m == 0:
        yield ()
        return
    # ZS1: a[0..k] holds the current partition, h points at the last part > 1
    a = [1] * (m + 1)
    a[0] = m
    k, h = 0, 0
    yield (m,)
    while a[0] != 1:
        if a[h] == 2:
            a[h] = 1
            h -= 1
            k += 1
        else:
            r = a[h] - 1
            t = k - h + 1
            a[h] = r
            while t >= r:
                h += 1
                a[h] = r
                t -= r
            if t == 0:
                k = h
            else:
                k = h + 1
                if t > 1:
                    h += 1
                    a[h] = t
        yield tuple(a[:k + 1])


@dataclass
class RRProfile:
    m: int
    counts: dict[int, int] = field(default_factory=dict)

    @property
    def a1(self) -> int:
        return sum(l * c for l, c in self.counts.items())

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def a1_bruteforce(m: int) -> RRProfile:
    if m > BRUTE_FORCE_BOUND:
        raise BoundExceeded(f"m={m} is above the enumeration bound {BRUTE_FORCE_BOUND}")
    if m < 0:
        raise ValueError("m must be nonnegative")
    prof = RRProfile(m)
    for lam in partitions(m):
        l = rr_subpartition(lam)
        prof.counts[l] = prof.counts.get(l, 0) + 1
    return prof


@lru_cache(maxsize=None)
def _p_table(n: int) -> tuple[int, ...]:
    p = [1] + [0] * n
    for m in range(1, n + 1):
        total, k = 0, 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[m - g1]
            g2 = g1 + k
            if g2 <= m:
                total += sign * p[m - g2]
            k += 1
        p[m] = total
    return tuple(p)


def p_of(m: int) -> int:
    """p(m) through Euler's pentagonal recurrence."""
    if m < 0:
        return 0
    # grow the cached table in blocks so repeated calls stay cheap
    size = 64
    while size < m:
        size *= 2
    return _p_table(size)[m]


def partition_series(prec: int | None = None) -> LaurentSeries:
    """1/(q;q)_inf."""
    prec = default_depth() if prec is None else prec
    return pentagonal_euler(prec).invert()


def a1_series(prec: int | None = None) -> LaurentSeries:
    """sum_m A_1(m) q^m = (sum_{r>=1} q^{r^2}) / (q;q)_inf."""
    prec = default_depth() if prec is None else prec
    return partition_series(prec) * theta_onesided(prec)


def a_series(prec: int | None = None) -> LaurentSeries:
    """sum_m a(m) q^m = (q^2;q^2)^5 / ((q;q)^3 (q^4;q^4)^2)."""
    prec = default_depth() if prec is None else prec
    return euler_product(5, 2, prec) * euler_product(-3, 1, prec) * euler_product(-2, 4, prec)


@dataclass
class CongruenceCase:
    m: int
    value: int
    passed: bool
    quotient: int | None


@dataclass
class CongruenceReport:
    target: str
    n: int
    modulus: int
    step: int
    cases: list[CongruenceCase]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def to_json(self) -> dict:
        return {
            "target": self.target, "n": self.n, "modulus": str(self.modulus),
            "step": str(self.step), "passed": self.passed,
            "cases": [{"m": c.m, "value": str(c.value), "passed": c.passed,
                       "quotient": None if c.quotient is None else str(c.quotient)}
                      for c in self.cases],
        }


def congruence_arguments(target: str, n: int, count: int) -> tuple[int, list[int]]:
    """The step 5^k and the first ``count`` m >= 0 with 24 m = 1 mod 5^k.

    A_1 needs 5^{2n}, p needs 5^n.
    """
    if target not in ("A1", "p"):
        raise ValueError(f"unknown target {target!r}")
    if n < 1 or count < 1:
        raise ValueError("n and count must be positive")
    step = 5 ** (2 * n if target == "A1" else n)
    m0 = pow(24, -1, step)
    return step, [m0 + i * step for i in range(count)]


def check_congruence(target: str, n: int, count: int, prec: int | None = None) -> CongruenceReport:
    """Check 5^n | A_1(m) (or p(m)) along the arithmetic progression 24m = 1 mod 5^{2n} (5^n for p)."""
    step, args = congruence_arguments(target, n, count)
    need = args[-1] + 1
    if prec is None:
        prec = need
    if prec < need:
        raise InsufficientPrecision(f"largest argument m={args[-1]} needs depth {need}, have {prec}")
    if target == "A1":
        series = a1_series(prec)
        value = series.coeff
    else:
        value = p_of
    modulus = 5 ** n
    cases = []
    for m in args:
        v = value(m)
        q, r = divmod(v, modulus)
        cases.append(CongruenceCase(m, v, r == 0, q if r == 0 else None))
    return CongruenceReport(target, n, modulus, step, cases)
