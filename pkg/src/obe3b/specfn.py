"""Special functions used by the coefficient and integral code.

Gamma ratios go through ``log_gamma`` with explicit sign bookkeeping so that
large arguments do not overflow. The alternating polynomial sums cancel badly
for high degree, so they are accumulated with extra working precision and
rounded once at the end.
"""
from __future__ import annotations

import math
from functools import lru_cache

import mpmath

__all__ = [
    "log_gamma",
    "binomial",
    "laguerre",
    "jacobi",
    "clebsch_gordan",
]


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if x <= 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _is_pole(z: float) -> bool:
    return z <= 0 and float(z).is_integer()


def _signed_log_gamma(z: float) -> tuple[float, int]:
    # Gamma(z) for real non-pole z, returned as (ln|Gamma|, sign)
    if z > 0:
        return math.lgamma(z), 1
    # reflection keeps the sign right for negative non-integers
    sign = 1 if math.floor(z) % 2 == 0 else -1
    return math.lgamma(z), sign


def binomial(x: float, y: float) -> float:
    """Gamma(x+1) / (Gamma(y+1) Gamma(x-y+1)) for real arguments.

    Poles in the denominator make the coefficient vanish (the usual integer
    convention, e.g. C(n, k) = 0 for k > n). A pole in the numerator is a
    domain error.
    """
    num = x + 1.0
    d1 = y + 1.0
    d2 = x - y + 1.0
    if _is_pole(num):
        raise ValueError(f"binomial({x}, {y}): numerator Gamma({num}) has a pole")
    if _is_pole(d1) or _is_pole(d2):
        return 0.0
    ln, s = _signed_log_gamma(num)
    l1, s1 = _signed_log_gamma(d1)
    l2, s2 = _signed_log_gamma(d2)
    return s * s1 * s2 * math.exp(ln - l1 - l2)


_WORK_DPS = 60


def laguerre(n: int, a: float, x: float) -> float:
    """Generalized Laguerre polynomial L_n^a(x) from its explicit power sum."""
    if n < 0:
        raise ValueError("laguerre degree must be non-negative")
    with mpmath.workdps(_WORK_DPS):
        x = mpmath.mpf(x)
        a = mpmath.mpf(a)
        total = mpmath.mpf(0)
        for i in range(n + 1):
            total += (-1) ** i * mpmath.binomial(n + a, n - i) * x**i / mpmath.factorial(i)
        return float(total)


def jacobi(n: int, a: float, b: float, x: float) -> float:
    """Jacobi polynomial P_n^(a,b)(x) from its explicit two-binomial sum."""
    if n < 0:
        raise ValueError("jacobi degree must be non-negative")
    with mpmath.workdps(_WORK_DPS):
        x, a, b = mpmath.mpf(x), mpmath.mpf(a), mpmath.mpf(b)
        up = (x + 1) / 2
        dn = (x - 1) / 2
        total = mpmath.mpf(0)
        for i in range(n + 1):
            total += mpmath.binomial(n + b, n - i) * mpmath.binomial(n + a, i) * up**i * dn ** (n - i)
        return float(total)


@lru_cache(maxsize=None)
def _log_fact(n: int) -> float:
    return math.lgamma(n + 1)


@lru_cache(maxsize=None)
def _cg(l1: int, m1: int, l2: int, m2: int, L: int, M: int) -> float:
    # Racah closed sum
    if m1 + m2 != M:
        return 0.0
    if not abs(l1 - l2) <= L <= l1 + l2:
        return 0.0
    if abs(m1) > l1 or abs(m2) > l2 or abs(M) > L:
        return 0.0
    lf = _log_fact
    pref = 0.5 * (
        math.log(2 * L + 1)
        + lf(L + l1 - l2)
        + lf(L - l1 + l2)
        + lf(l1 + l2 - L)
        - lf(l1 + l2 + L + 1)
        + lf(L + M)
        + lf(L - M)
        + lf(l1 - m1)
        + lf(l1 + m1)
        + lf(l2 - m2)
        + lf(l2 + m2)
    )
    kmin = max(0, l2 - L - m1, l1 + m2 - L)
    kmax = min(l1 + l2 - L, l1 - m1, l2 + m2)
    total = 0.0
    for k in range(kmin, kmax + 1):
        ln = (
            lf(k)
            + lf(l1 + l2 - L - k)
            + lf(l1 - m1 - k)
            + lf(l2 + m2 - k)
            + lf(L - l2 + m1 + k)
            + lf(L - l1 - m2 + k)
        )
        total += (-1) ** k * math.exp(pref - ln)
    return total


def clebsch_gordan(l1: int, m1: int, l2: int, m2: int, L: int, M: int) -> float:
    """Condon-Shortley coefficient <l1 m1 l2 m2 | L M>.

    Selection-rule violations give 0 rather than raising.
    """
    if min(l1, l2, L) < 0:
        return 0.0
    return _cg(int(l1), int(m1), int(l2), int(m2), int(L), int(M))
