"""Pointwise oscillator functions and a semi-infinite Gauss rule.

Used by the naive three-body route, the tabulated-kernel fallback and the
test oracles; the analytic routes never touch this module.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import special

__all__ = ["radial_function", "hyperradial_function", "semi_infinite_rule"]


def radial_function(n: int, l, r):
    """R_nl(r) = sqrt(2 n!/Gamma(n+l+3/2)) r^l exp(-r^2/2) L_n^(l+1/2)(r^2).

    ``l`` may be a half-integer; hyperradial functions are R with l = K + 3/2.
    """
    l = float(l)
    r = np.asarray(r, dtype=float)
    lognorm = 0.5 * (math.log(2.0) + math.lgamma(n + 1) - math.lgamma(n + l + 1.5))
    with np.errstate(divide="ignore"):
        logpow = np.where(r > 0, l * np.log(np.where(r > 0, r, 1.0)), 0.0 if l == 0 else -np.inf)
    env = np.exp(lognorm + logpow - 0.5 * r * r)
    return env * special.eval_genlaguerre(n, l + 0.5, r * r)


def hyperradial_function(N: int, K: int, rho):
    """rho^(3/2) times the hyperradial function of the 6-D oscillator.

    Normalised with the measure rho^2 d rho, like :func:`radial_function`.
    """
    return radial_function(N, K + 1.5, rho)


@lru_cache(maxsize=32)
def semi_infinite_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre on [0, inf) through r = tan(pi u / 2), u in (0, 1)."""
    u, w = np.polynomial.legendre.leggauss(n)
    u = 0.5 * (u + 1.0)
    w = 0.5 * w
    r = np.tan(0.5 * np.pi * u)
    jac = 0.5 * np.pi / np.cos(0.5 * np.pi * u) ** 2
    r.setflags(write=False)
    wr = w * jac
    wr.setflags(write=False)
    return r, wr
