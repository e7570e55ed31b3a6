"""Radial oscillator matrix elements by Talmi's integral technique.

A radial matrix element of a one-body oscillator function is written as a
finite sum ``sum_p B(n1 l1, n2 l2, p) * I_p(O, a)``. The B coefficients only
depend on quantum numbers and are obtained here by expanding the product of
the two Laguerre polynomials exactly (rational arithmetic), which also covers
the half-integer "l" needed for hyperradial functions. The Talmi integrals
``I_p`` carry the kernel and the scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence, Union

import gmpy2
import mpmath
import numpy as np
from scipy import integrate

__all__ = [
    "Power",
    "Gaussian",
    "SqrtShifted",
    "Tabulated",
    "RadialKernel",
    "b_coefficients",
    "b_coefficient",
    "b_coefficients_mp",
    "mp_sum",
    "talmi_integral",
    "sqrt_kernel_integral",
    "radial_me",
    "radial_matrix",
    "hyperradial_me",
    "hyperradial_matrix",
    "evaluate_kernel",
]


@dataclass(frozen=True)
class Power:
    """alpha * x**beta"""

    alpha: float
    beta: float


@dataclass(frozen=True)
class Gaussian:
    """alpha * exp(-beta * x**2)"""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("Gaussian kernel needs beta >= 0")


@dataclass(frozen=True)
class SqrtShifted:
    """sqrt(x**2 + alpha), the relativistic kinetic kernel."""

    alpha: float

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("SqrtShifted kernel needs alpha >= 0")


@dataclass(frozen=True)
class Tabulated:
    """Generic O(x); integrated numerically."""

    func: Callable[[float], float]
    name: str = "tabulated"


RadialKernel = Union[Power, Gaussian, SqrtShifted, Tabulated]
KernelLike = Union[RadialKernel, Sequence[RadialKernel]]


def _as_terms(kernel: KernelLike) -> tuple:
    if isinstance(kernel, (Power, Gaussian, SqrtShifted, Tabulated)):
        return (kernel,)
    return tuple(kernel)


def evaluate_kernel(kernel: KernelLike, x):
    """Pointwise value of a kernel (or a sum of kernels) at x >= 0."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for k in _as_terms(kernel):
        if isinstance(k, Power):
            with np.errstate(divide="ignore"):
                out = out + k.alpha * x**k.beta
        elif isinstance(k, Gaussian):
            out = out + k.alpha * np.exp(-k.beta * x * x)
        elif isinstance(k, SqrtShifted):
            out = out + np.sqrt(x * x + k.alpha)
        else:
            out = out + np.vectorize(k.func, otypes=[float])(x)
    return out


# ---------------------------------------------------------------------------
# B coefficients


def _laguerre_coeffs(n: int, a: Fraction) -> list[Fraction]:
    # L_n^a(x) = sum_i (-1)^i C(n+a, n-i) x^i / i!
    coeffs = []
    for i in range(n + 1):
        k = n - i
        c = Fraction(1)
        for j in range(k):
            c *= (n + a - j)
        c /= math.factorial(k)
        c /= math.factorial(i)
        coeffs.append(c if i % 2 == 0 else -c)
    return coeffs


@lru_cache(maxsize=None)
def _product_coeffs(n1: int, a1: Fraction, n2: int, a2: Fraction) -> tuple[Fraction, ...]:
    c1 = _laguerre_coeffs(n1, a1)
    c2 = _laguerre_coeffs(n2, a2)
    out = [Fraction(0)] * (n1 + n2 + 1)
    for i, x in enumerate(c1):
        for j, y in enumerate(c2):
            out[i + j] += x * y
    return tuple(out)


# 256-bit working precision: the B coefficients alternate in sign and grow
# past 1e19 for the largest blocks, so the contraction with I_p cannot be done
# in double precision.
_PREC = 256


def _mp(x) -> gmpy2.mpfr:
    return gmpy2.mpfr(x, _PREC)


def _hp():
    return gmpy2.context(gmpy2.get_context(), precision=_PREC)


def mp_sum(values) -> gmpy2.mpfr:
    """Sum at the working precision (the default gmpy2 context is 53 bits)."""
    with _hp():
        return sum(values, _mp(0))


@lru_cache(maxsize=None)
def _b_table_mp(n1: int, l1: Fraction, n2: int, l2: Fraction) -> tuple[tuple, tuple]:
    coeffs = _product_coeffs(n1, l1 + Fraction(1, 2), n2, l2 + Fraction(1, 2))
    p0 = (l1 + l2) / 2
    with _hp():
        norm = gmpy2.sqrt(
            gmpy2.factorial(n1)
            * gmpy2.factorial(n2)
            / (gmpy2.gamma(_mp(gmpy2.mpq(n1 + l1)) + 1.5) * gmpy2.gamma(_mp(gmpy2.mpq(n2 + l2)) + 1.5))
        )
        ps = tuple(p0 + k for k in range(len(coeffs)))
        bs = tuple(
            _mp(gmpy2.mpq(c.numerator, c.denominator)) * gmpy2.gamma(_mp(gmpy2.mpq(p)) + 1.5) * norm
            for c, p in zip(coeffs, ps)
        )
    return ps, bs


@lru_cache(maxsize=None)
def _b_table(n1: int, l1: Fraction, n2: int, l2: Fraction) -> tuple[np.ndarray, np.ndarray]:
    ps, bs = _b_table_mp(n1, l1, n2, l2)
    ps = np.array([float(p) for p in ps])
    bs = np.array([float(b) for b in bs])
    ps.setflags(write=False)
    bs.setflags(write=False)
    return ps, bs


def _frac(l) -> Fraction:
    return l if isinstance(l, Fraction) else Fraction(l).limit_denominator(2)


def b_coefficients(n1: int, l1, n2: int, l2) -> tuple[np.ndarray, np.ndarray]:
    """All Talmi B coefficients of a product of two radial functions.

    Returns ``(p, B)`` with p running from (l1+l2)/2 to n1+n2+(l1+l2)/2,
    rounded to double. ``l1``/``l2`` may be half-integers (hyperradial
    functions use K + 3/2).
    """
    return _b_table(n1, _frac(l1), n2, _frac(l2))


def b_coefficients_mp(n1: int, l1, n2: int, l2) -> tuple[tuple, tuple]:
    """Same as :func:`b_coefficients` with p as Fractions and B as 256-bit mpfr."""
    return _b_table_mp(n1, _frac(l1), n2, _frac(l2))


def b_coefficient(n1: int, l1, n2: int, l2, p) -> float:
    ps, bs = b_coefficients(n1, l1, n2, l2)
    k = float(p) - ps[0]
    if k < 0 or k > len(ps) - 1 or not float(k).is_integer():
        return 0.0
    return float(bs[int(k)])


# ---------------------------------------------------------------------------
# Talmi integrals


@lru_cache(maxsize=8192)
def _sqrt_kernel_mp(p: Fraction, alpha: float, a: float) -> gmpy2.mpfr:
    with mpmath.workdps(80):
        z = mpmath.mpf(alpha) / mpmath.mpf(a) ** 2
        pp = mpmath.mpf(p.numerator) / p.denominator
        val = mpmath.mpf(a) * z ** (pp + 2) * mpmath.hyperu(pp + 1.5, pp + 3, z)
        return _mp(mpmath.nstr(val, 75))


def sqrt_kernel_integral(p: float, alpha: float, a: float) -> float:
    """I_p for sqrt(x^2 + alpha): a (alpha/a^2)^(p+2) U(p+3/2, p+3, alpha/a^2)."""
    if alpha <= 0:
        raise ValueError("sqrt_kernel_integral needs alpha > 0")
    return float(_sqrt_kernel_mp(_frac(p), float(alpha), float(a)))


def _quad_talmi(p: float, func: Callable[[float], float], a: float) -> float:
    lg = math.lgamma(p + 1.5)

    def integrand(r):
        if r == 0.0:
            return 0.0
        w = math.exp(math.log(2.0) + (2 * p + 2) * math.log(r) - r * r - lg)
        return w * func(a * r)

    peak = math.sqrt(p + 1.0)
    tail = peak + 12.0
    v1, _ = integrate.quad(integrand, 0.0, peak, epsabs=0.0, epsrel=1e-12, limit=200)
    v2, _ = integrate.quad(integrand, peak, tail, epsabs=0.0, epsrel=1e-12, limit=200)
    v3, _ = integrate.quad(integrand, tail, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    return v1 + v2 + v3


def _talmi_single_mp(p: Fraction, k: RadialKernel, a: float) -> gmpy2.mpfr:
    with _hp():
        pp = _mp(gmpy2.mpq(p.numerator, p.denominator))
        if isinstance(k, Power):
            arg = pp + 1.5 + _mp(k.beta) / 2
            if arg <= 0:
                raise ValueError(f"Talmi integral diverges for power {k.beta} at p={p}")
            if k.beta == 0:
                return _mp(k.alpha)
            return _mp(k.alpha) * _mp(a) ** _mp(k.beta) * gmpy2.exp(gmpy2.lngamma(arg) - gmpy2.lngamma(pp + 1.5))
        if isinstance(k, Gaussian):
            return _mp(k.alpha) * (1 + _mp(a) ** 2 * _mp(k.beta)) ** (-pp - 1.5)
        if isinstance(k, SqrtShifted):
            if k.alpha == 0:
                return _mp(a) * gmpy2.exp(gmpy2.lngamma(pp + 2) - gmpy2.lngamma(pp + 1.5))
            return _sqrt_kernel_mp(p, float(k.alpha), float(a))
        if isinstance(k, Tabulated):
            return _mp(_quad_talmi(float(p), k.func, a))
    raise TypeError(f"unknown kernel {k!r}")


def talmi_integral(p: float, kernel: KernelLike, a: float) -> float:
    """(2/Gamma(p+3/2)) int_0^inf r^(2p+2) exp(-r^2) O(a r) dr."""
    pf = _frac(p)
    return float(sum(_talmi_single_mp(pf, k, float(a)) for k in _as_terms(kernel)))


def _analytic_terms(kernel: KernelLike) -> tuple[tuple, tuple]:
    terms = _as_terms(kernel)
    return (
        tuple(k for k in terms if not isinstance(k, Tabulated)),
        tuple(k for k in terms if isinstance(k, Tabulated)),
    )


def _talmi_vector_mp(ps, terms, a: float) -> np.ndarray:
    out = np.empty(len(ps), dtype=object)
    for i, p in enumerate(ps):
        out[i] = sum((_talmi_single_mp(p, k, a) for k in terms), _mp(0))
    return out


# ---------------------------------------------------------------------------
# Matrix elements


def _gauss_radial(n1: int, l1, n2: int, l2, funcs, a: float) -> float:
    # direct quadrature fallback for tabulated kernels
    from .quadrature import radial_function, semi_infinite_rule

    r, w = semi_infinite_rule(400)
    f = sum(np.vectorize(k.func, otypes=[float])(a * r) for k in funcs)
    return float(np.sum(w * r * r * radial_function(n1, l1, r) * f * radial_function(n2, l2, r)))


def radial_me(n1: int, l1, n2: int, l2, kernel: KernelLike, a: float) -> float:
    """int r^2 dr R_{n1 l1}(r) O(a r) R_{n2 l2}(r)."""
    analytic, tabulated = _analytic_terms(kernel)
    total = 0.0
    if analytic:
        ps, bs = b_coefficients_mp(n1, l1, n2, l2)
        with _hp():
            iv = _talmi_vector_mp(ps, analytic, float(a))
            total += float(sum((b * i for b, i in zip(bs, iv)), _mp(0)))
    if tabulated:
        total += _gauss_radial(n1, l1, n2, l2, tabulated, a)
    return total


@lru_cache(maxsize=None)
def _b_tensor(nmax: int, l: Fraction) -> np.ndarray:
    # T[n1, n2, k] = B(n1 l, n2 l, p = l + k), k <= 2 nmax
    T = np.full((nmax + 1, nmax + 1, 2 * nmax + 1), _mp(0), dtype=object)
    for n1 in range(nmax + 1):
        for n2 in range(n1 + 1):
            _, bs = _b_table_mp(n1, l, n2, l)
            for k, b in enumerate(bs):
                T[n1, n2, k] = b
                T[n2, n1, k] = b
    T.setflags(write=False)
    return T


def radial_matrix(nmax: int, l, kernel: KernelLike, a: float) -> np.ndarray:
    """Matrix of radial_me(n1, l, n2, l) for n1, n2 in 0..nmax."""
    lf = _frac(l)
    analytic, tabulated = _analytic_terms(kernel)
    out = np.zeros((nmax + 1, nmax + 1))
    if analytic:
        T = _b_tensor(nmax, lf)
        ps = [lf + k for k in range(2 * nmax + 1)]
        with _hp():
            iv = _talmi_vector_mp(ps, analytic, float(a))
            out += np.vectorize(float, otypes=[float])(T @ iv)
    if tabulated:
        for n1 in range(nmax + 1):
            for n2 in range(n1 + 1):
                out[n1, n2] = out[n2, n1] = out[n1, n2] + _gauss_radial(n1, lf, n2, lf, tabulated, a)
    return out


def hyperradial_me(N1: int, N2: int, K: int, kernel: KernelLike, c: float) -> float:
    """int d rho rho^5 R_{N1 K}(rho) O(c rho) R_{N2 K}(rho) via half-integer Talmi."""
    l = Fraction(2 * K + 3, 2)
    return radial_me(N1, l, N2, l, kernel, c)


def hyperradial_matrix(Nmax: int, K: int, kernel: KernelLike, c: float) -> np.ndarray:
    return radial_matrix(Nmax, Fraction(2 * K + 3, 2), kernel, c)
