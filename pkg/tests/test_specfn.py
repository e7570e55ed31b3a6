import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special
from sympy.physics.quantum.cg import CG

from obe3b.specfn import binomial, clebsch_gordan, jacobi, laguerre, log_gamma


@pytest.mark.parametrize("x, expected", [(1.0, 0.0), (0.5, 0.5723649429247001), (11.0, math.log(math.factorial(10)))])
def test_log_gamma_values(x, expected):
    assert log_gamma(x) == pytest.approx(expected, rel=1e-13, abs=1e-15)


@pytest.mark.parametrize("x", [0.0, -1.0, -2.5])
def test_log_gamma_domain(x):
    with pytest.raises(ValueError):
        log_gamma(x)


@given(st.floats(1e-3, 500.0))
def test_log_gamma_against_scipy(x):
    assert log_gamma(x) == pytest.approx(special.gammaln(x), rel=1e-13, abs=1e-13)


def test_binomial_examples():
    assert binomial(4, 2) == pytest.approx(6.0, rel=1e-14)
    assert binomial(3.7, 0) == pytest.approx(1.0, rel=1e-14)
    assert binomial(2.5, 1) == pytest.approx(2.5, rel=1e-14)
    assert binomial(3, 5) == 0.0  # denominator pole
    with pytest.raises(ValueError):
        binomial(-1, 0.5)


@given(st.floats(-0.9, 30.0), st.integers(0, 20))
def test_binomial_against_scipy(x, k):
    assert binomial(x, k) == pytest.approx(special.binom(x, k), rel=1e-11, abs=1e-12)


def test_laguerre_examples():
    assert laguerre(0, 3.3, 7.1) == 1.0
    for x in (0.0, 0.4, 2.0):
        assert laguerre(1, 0.5, x) == pytest.approx(1.5 - x, abs=1e-14)
    assert laguerre(2, 2, 0) == pytest.approx(6.0, rel=1e-14)


@settings(max_examples=60)
@given(st.integers(0, 30), st.floats(-0.9, 10.0), st.floats(0.0, 50.0))
def test_laguerre_against_scipy(n, a, x):
    # mpmath at high precision is the reference; scipy's recurrence is not exact enough
    with mpmath.workdps(80):
        ref = float(mpmath.laguerre(n, a, x))
    assert laguerre(n, a, x) == pytest.approx(ref, rel=1e-10, abs=1e-300)


@settings(max_examples=60)
@given(st.integers(1, 25), st.floats(-0.9, 8.0), st.floats(0.0, 20.0))
def test_laguerre_recurrence(n, a, x):
    lhs = (n + 1) * laguerre(n + 1, a, x)
    rhs = (2 * n + a + 1 - x) * laguerre(n, a, x) - (n + a) * laguerre(n - 1, a, x)
    size = max(abs(lhs), abs((2 * n + a + 1 - x) * laguerre(n, a, x)), 1.0)
    assert abs(lhs - rhs) <= 1e-9 * size


def test_jacobi_examples():
    assert jacobi(0, 1.3, -0.4, 0.2) == 1.0
    for n in range(6):
        assert jacobi(n, 1.5, 0.5, 1.0) == pytest.approx(binomial(n + 1.5, n), rel=1e-13)
    assert jacobi(1, 0.5, 0.5, 0.0) == pytest.approx(0.0, abs=1e-15)


@given(st.integers(0, 15), st.floats(-0.5, 6.0), st.floats(-0.5, 6.0), st.floats(-1.0, 1.0))
def test_jacobi_symmetry_and_scipy(n, a, b, x):
    v = jacobi(n, a, b, x)
    assert jacobi(n, b, a, -x) * (-1) ** n == pytest.approx(v, rel=1e-12, abs=1e-12)
    assert v == pytest.approx(special.eval_jacobi(n, a, b, x), rel=1e-10, abs=1e-10)


def test_cg_examples():
    assert clebsch_gordan(0, 0, 0, 0, 0, 0) == pytest.approx(1.0)
    assert clebsch_gordan(1, 0, 1, 0, 0, 0) == pytest.approx(-1 / math.sqrt(3), rel=1e-14)
    assert clebsch_gordan(1, 1, 1, -1, 0, 0) == pytest.approx(1 / math.sqrt(3), rel=1e-14)
    assert clebsch_gordan(1, 0, 1, 0, 3, 0) == 0.0
    assert clebsch_gordan(1, 1, 1, 0, 2, 0) == 0.0


@pytest.mark.parametrize("l1, l2", [(0, 3), (1, 1), (2, 3), (4, 2), (3, 3)])
def test_cg_against_sympy(l1, l2):
    for L in range(abs(l1 - l2), l1 + l2 + 1):
        for m1 in range(-l1, l1 + 1):
            for m2 in range(-l2, l2 + 1):
                M = m1 + m2
                if abs(M) > L:
                    continue
                ref = float(CG(l1, m1, l2, m2, L, M).doit())
                assert clebsch_gordan(l1, m1, l2, m2, L, M) == pytest.approx(ref, abs=1e-13)


@pytest.mark.parametrize("l1", range(7))
def test_cg_orthogonality(l1):
    for l2 in range(7):
        Ls = range(abs(l1 - l2), l1 + l2 + 1)
        for M in range(-(l1 + l2), l1 + l2 + 1):
            rows = [(m1, M - m1) for m1 in range(-l1, l1 + 1) if abs(M - m1) <= l2]
            keep = [L for L in Ls if abs(M) <= L]
            C = np.array([[clebsch_gordan(l1, m1, l2, m2, L, M) for L in keep] for m1, m2 in rows])
            assert np.allclose(C.T @ C, np.eye(len(keep)), atol=1e-12)
