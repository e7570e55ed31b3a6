import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from obe3b.basis import SectorSpec, enumerate_channels, full_channels, symmetrize
from obe3b.coeffs import BracketProvider
from obe3b.matel import (
    ConfigError,
    RotationChannel,
    ScaleParams,
    SystemConfig,
    kinetic_nr,
    kinetic_nr_matrix,
    kinetic_sr,
    kinetic_sr_matrix,
    observable_r12,
    r12_matrix,
    three_body_matrix,
    three_body_matrix_naive,
    three_body_me_hyper,
    three_body_me_naive,
    two_body_matrix,
    two_body_me,
)
from obe3b.states import ChannelState
from obe3b.talmi import Gaussian, Power, radial_matrix

from oracles import channel_function, hermite_grid_6d

G0 = ChannelState(0, 0, 0, 0, 0)
UNIT = SystemConfig(1.0, 1.0, 1.0)
UNEQUAL = SystemConfig(1.0, 2.5, 0.7)


def test_kinetic_nr_examples():
    assert kinetic_nr(G0, G0, UNIT, ScaleParams(1.0)) == pytest.approx(3.0, rel=1e-14)
    cfg, s = SystemConfig(1.3, 0.8, 2.0), ScaleParams(0.9, 1.7, locked=False)
    bra, ket = ChannelState(2, 1, 0, 1, 1), ChannelState(1, 1, 0, 1, 1)
    expected = cfg.m12 / (2 * cfg.m1 * cfg.m2 * s.a**2) * math.sqrt(2 * (2 + 1 + 0.5))
    assert kinetic_nr(bra, ket, cfg, s) == pytest.approx(expected, rel=1e-14)
    assert kinetic_nr(ChannelState(0, 1, 0, 1, 1), ChannelState(0, 1, 0, 1, 0), cfg, s) == 0.0
    assert kinetic_nr(ChannelState(1, 0, 0, 2, 2), ChannelState(0, 2, 0, 2, 2), cfg, s) == 0.0


def test_kinetic_matrix_vs_momentum_radial():
    # p^2 and r^2 share a tridiagonal pattern; the off-diagonal sign flips with (-1)^(n - n')
    cfg, s = SystemConfig(1.3, 0.8, 2.0), ScaleParams(0.9, 1.7, locked=False)
    ch = full_channels(2, 1, 8)
    K = kinetic_nr_matrix(ch, cfg, s)
    for i, b in enumerate(ch):
        for j, k in enumerate(ch):
            ref = 0.0
            if (b.L, b.lx, b.ly) == (k.L, k.lx, k.ly):
                sign = (-1) ** (b.nx + k.nx + b.ny + k.ny)
                if b.ny == k.ny:
                    ref += cfg.m12 / (2 * cfg.m1 * cfg.m2 * s.a**2) * radial_matrix(4, b.lx, Power(1, 2), 1.0)[b.nx, k.nx]
                if b.nx == k.nx:
                    ref += cfg.M / (2 * cfg.m12 * cfg.m3 * s.b**2) * radial_matrix(4, b.ly, Power(1, 2), 1.0)[b.ny, k.ny]
                ref *= sign
            assert K[i, j] == pytest.approx(ref, abs=1e-12)
            assert K[i, j] == pytest.approx(kinetic_nr(b, k, cfg, s), abs=1e-13)


def test_rotation_channel():
    for cfg, s in [(UNIT, ScaleParams(1.3)), (UNEQUAL, ScaleParams(0.8, 2.1, locked=False))]:
        r = RotationChannel.from_scales(cfg, s)
        for beta, g, m in [(r.beta1, r.gamma1, cfg.m1), (r.beta2, r.gamma2, cfg.m2)]:
            assert math.cos(beta) == pytest.approx(s.b * cfg.m12 / g, rel=1e-14)
            assert math.sin(beta) == pytest.approx(s.a * m / g, rel=1e-14)
        assert r.eta1 > 0 and r.eta2 > 0
    # equal masses with locked scales give the pi/6 rotation
    assert RotationChannel.from_scales(UNIT, ScaleParams(2.0)).beta1 == pytest.approx(math.pi / 6, abs=1e-15)


def test_scale_params():
    s = ScaleParams(1.6)
    assert s.b == math.sqrt(3) * 1.6 / 2
    with pytest.raises(ConfigError):
        ScaleParams(1.0, 2.0)
    with pytest.raises(ConfigError):
        ScaleParams(-1.0)
    with pytest.raises(ConfigError):
        ScaleParams(1.0, locked=False)


def test_system_config_validation():
    with pytest.raises(ConfigError):
        SystemConfig(1.0, 2.0, 1.0, three_body=Power(1, 1))
    with pytest.raises(ConfigError):
        SystemConfig(1.0, 0.0, 1.0)
    with pytest.raises(ConfigError):
        SystemConfig(1.0, 1.0, 1.0, kinematics="ultrarelativistic")
    cfg = SystemConfig(1, 1, 1, v12=Power(1, 1))
    assert cfg.v12 == (Power(1, 1),) and cfg.v13 == () and not cfg.all_identical


def test_two_body_examples():
    a = 1.6365
    g = Gaussian(-(3 ** (4 / 3)), 1 / 27)
    assert two_body_me("12", G0, G0, g, UNIT, ScaleParams(a)) == pytest.approx(-(3 ** (4 / 3)) * (1 + a * a / 27) ** -1.5, rel=1e-14)
    assert two_body_me("12", G0, G0, Power(1, 1), UNIT, ScaleParams(a)) == pytest.approx(2 * a / math.sqrt(math.pi), rel=1e-14)
    assert observable_r12(G0, G0, ScaleParams(a)) == pytest.approx(2 * a / math.sqrt(math.pi), rel=1e-14)
    assert two_body_me("12", G0, ChannelState(0, 0, 1, 0, 0), Power(1, 1), UNIT, ScaleParams(a)) == 0.0


# --- independent 6-D oracle for rotated pairs, unequal masses


@pytest.fixture(scope="module")
def grid6():
    # exact to degree 11 per coordinate
    return hermite_grid_6d(6)


@pytest.mark.parametrize("kernel, power", [(Power(1, 2), 2), (Power(0.3, 4), 4)])
def test_rotated_pairs_vs_6d_oracle(kernel, power, grid6):
    x, y, w = grid6
    cfg, s = UNEQUAL, ScaleParams(0.9, 1.4, locked=False)
    # r3 - r1 = b y + (m2/m12) a x,  r3 - r2 = b y - (m1/m12) a x
    d13 = np.linalg.norm(s.b * y + cfg.m2 / cfg.m12 * s.a * x, axis=1)
    d23 = np.linalg.norm(s.b * y - cfg.m1 / cfg.m12 * s.a * x, axis=1)
    ch = [c for c in full_channels(1, -1, 3)] + [c for c in full_channels(1, 1, 2)]
    mats = {p: two_body_matrix(p, ch, kernel, cfg, s) for p in ("13", "23")}
    phis = [channel_function(c, x, y) for c in ch]
    for i in range(len(ch)):
        for j in range(len(ch)):
            for pair, d in (("13", d13), ("23", d23)):
                ref = np.sum(np.conj(phis[i]) * kernel.alpha * d**power * phis[j] * w).real
                assert mats[pair][i, j] == pytest.approx(ref, abs=1e-10)


def test_elements_match_matrices_unequal_masses():
    cfg, s = UNEQUAL, ScaleParams(1.1, 0.9, locked=False)
    ch = enumerate_channels(SectorSpec(2, 1, "none", 1, 5))
    bm = BracketProvider()
    k = (Gaussian(-1.2, 0.3), Power(0.4, 1.0))
    for pair in ("12", "13", "23"):
        M = two_body_matrix(pair, ch, k, cfg, s, bm)
        assert np.abs(M - M.T).max() <= 1e-12
        for i in range(0, len(ch), 3):
            for j in range(0, len(ch), 2):
                assert M[i, j] == pytest.approx(two_body_me(pair, ch[i], ch[j], k, cfg, s, bm), abs=1e-12)
    cfg = SystemConfig(1.0, 2.5, 0.7, kinematics="semirelativistic")
    T = kinetic_sr_matrix(ch, cfg, s, bm)
    assert np.abs(T - T.T).max() <= 1e-10 * np.abs(T).max()
    for i in range(0, len(ch), 4):
        for j in range(0, len(ch), 3):
            assert T[i, j] == pytest.approx(kinetic_sr(ch[i], ch[j], cfg, s, bm), abs=1e-11)


def test_pair_permutation_symmetry(bm_pi6):
    cfg = SystemConfig(1, 1, 1)
    s = ScaleParams(1.4)
    basis = symmetrize(SectorSpec(0, 1, "three_identical", 1, 10), bm=bm_pi6)
    T = basis.transform
    k = Gaussian(-2.0, 0.15)
    V = {p: T.T @ two_body_matrix(p, basis.channels, k, cfg, s) @ T for p in ("12", "13", "23")}
    assert np.abs(V["12"] - V["13"]).max() <= 1e-10
    assert np.abs(V["12"] - V["23"]).max() <= 1e-10


def test_sr_heavy_mass_unequal():
    # heavy masses: sum_i sqrt(k_i^2 + m_i^2) ~ M + p^2 / (2 m) terms
    m = (1000.0, 2000.0, 1500.0)
    s = ScaleParams(1.0, 0.8, locked=False)
    ch = enumerate_channels(SectorSpec(1, -1, "none", 1, 5))
    Tsr = kinetic_sr_matrix(ch, SystemConfig(*m, kinematics="semirelativistic"), s)
    Tnr = kinetic_nr_matrix(ch, SystemConfig(*m), s)
    diff = Tsr - sum(m) * np.eye(len(ch)) - Tnr
    assert np.abs(diff).max() <= 1e-4 * np.abs(Tnr).max()


def test_sr_particle_three_heavy_limit():
    # m3 term on the ground state: m3 + 3 / (4 b^2 m3) + O(m3^-3)
    m3 = 200.0
    s = ScaleParams(1.0)
    cfg = SystemConfig(1.0, 1.0, m3, kinematics="semirelativistic")
    t1 = kinetic_sr_matrix([G0], cfg, s, terms=(1,))[0, 0]
    assert t1 == pytest.approx(m3 + 3 / (4 * s.b**2 * m3), abs=5.0 / m3**3)


def test_sr_terms_equal_masses(bm_pi6):
    cfg = SystemConfig(1.0, 1.0, 2.0, kinematics="semirelativistic")
    s = ScaleParams(1.2)
    ch = enumerate_channels(SectorSpec(0, 1, "two_identical", 1, 8))
    t2 = kinetic_sr_matrix(ch, cfg, s, terms=(2,))
    t3 = kinetic_sr_matrix(ch, cfg, s, terms=(3,))
    assert np.abs(t2 - t3).max() <= 1e-12
    cfg = SystemConfig(1.0, 1.0, 1.0, kinematics="semirelativistic")
    basis = symmetrize(SectorSpec(0, 1, "three_identical", 1, 8), bm=bm_pi6)
    T = basis.transform
    parts = [T.T @ kinetic_sr_matrix(basis.channels, cfg, s, terms=(t,)) @ T for t in (1, 2, 3)]
    assert np.abs(parts[0] - parts[1]).max() <= 1e-10
    assert np.abs(parts[0] - parts[2]).max() <= 1e-10


# --- three-body force


def test_three_body_hyper_examples(hyper_small):
    a = 1.3
    s = ScaleParams(a)
    assert three_body_me_hyper(G0, G0, Power(1, 2), s, hyper_small) == pytest.approx(4.5 * a * a, rel=1e-14)
    for beta in (0.05, 0.4):
        ref = (1 + 1.5 * a * a * beta) ** -3
        assert three_body_me_hyper(G0, G0, Gaussian(1, beta), s, hyper_small) == pytest.approx(ref, rel=1e-14)
    assert three_body_me_hyper(ChannelState(0, 1, 0, 1, 0), ChannelState(0, 0, 1, 0, 0), Power(1, 1), s, hyper_small) == 0.0
    with pytest.raises(ConfigError):
        three_body_me_hyper(G0, G0, Power(1, 1), ScaleParams(1.0, 1.0, locked=False), hyper_small)


def test_three_body_naive_examples():
    a = 1.6365
    s = ScaleParams(a)
    assert three_body_me_naive(G0, G0, Power(1, 2), s) == pytest.approx(4.5 * a * a, rel=1e-9)
    b, k = ChannelState(2, 1, 1, 1, 0), ChannelState(1, 1, 1, 1, 0)
    assert three_body_me_naive(b, b, Power(1, 0), s) == pytest.approx(1.0, rel=1e-9)
    assert abs(three_body_me_naive(b, k, Power(1, 0), s)) <= 1e-9
    g = Gaussian(-(3 ** (4 / 3)), 1 / 27)
    ref = -(3 ** (4 / 3)) * (1 + 1.5 * a * a / 27) ** -3
    assert three_body_me_naive(G0, G0, g, s) == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("kernel", [Gaussian(-2.0, 0.1), Power(0.5, 1.0), Power(-3.0, -1.0)])
def test_hyper_vs_naive_matrix(kernel, hyper_small):
    s = ScaleParams(1.1)
    ch = enumerate_channels(SectorSpec(0, 1, "none", 1, 6))
    Wh = three_body_matrix(ch, kernel, s, hyper_small)
    Wn = three_body_matrix_naive(ch, kernel, s)
    assert np.abs(Wh - Wn).max() <= 1e-8 * np.abs(Wh).max()
    for i in range(0, len(ch), 2):
        assert Wh[i, i] == pytest.approx(three_body_me_hyper(ch[i], ch[i], kernel, s, hyper_small), rel=1e-13)


def test_three_body_is_permutation_invariant(hyper_small):
    # W depends on the hyperradius only, so it commutes with P23 on the full space
    from obe3b.basis import p23_matrix
    from obe3b.coeffs import BMTable
    from obe3b.states import QLBlock

    bm = BMTable(math.pi / 6)
    s = ScaleParams(0.9)
    for Q, L in [(4, 0), (5, 1), (6, 2)]:
        blk = QLBlock(Q, L)
        ch = list(blk.states)
        W = three_body_matrix(ch, Power(1, 1), s, hyper_small)
        P = p23_matrix(blk, bm)
        assert np.abs(P @ W - W @ P).max() <= 1e-10


@settings(max_examples=20, deadline=None)
@given(st.floats(0.3, 3.0), st.integers(0, 3))
def test_r12_matrix_is_r12_observable(a, L):
    s = ScaleParams(a)
    ch = enumerate_channels(SectorSpec(L, 1, "none", 1, 6))
    R = r12_matrix(ch, s)
    for i in range(0, len(ch), 3):
        for j in range(len(ch)):
            assert R[i, j] == pytest.approx(observable_r12(ch[i], ch[j], s), abs=1e-13)
