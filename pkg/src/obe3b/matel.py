"""Hamiltonian matrix elements between coupled oscillator channel states.

Coordinates are the scaled Jacobi vectors ``r12 = a x`` and ``r3 - R12 = b y``
(``x`` points from particle 1 to particle 2). Their conjugate momenta carry
``1/a`` and ``1/b``. Two-body potentials of the pairs 13 and 23 and the
relativistic kinetic terms of particles 1 and 2 depend on a rotated
coordinate; they are reduced to one-dimensional radial elements with
Brody-Moshinsky brackets.

Each operator comes twice:

* ``kinetic_nr``, ``two_body_me``, ... evaluate one element by the explicit
  bracket sums;
* ``*_matrix`` builders assemble whole matrices over a channel list with
  dense linear algebra. These are what the solver uses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
import scipy.linalg

from .basis import full_channels
from .coeffs import BracketProvider, HyperTable
from .quadrature import radial_function, semi_infinite_rule
from .states import ChannelState, block_states
from .talmi import (
    Gaussian,
    Power,
    SqrtShifted,
    Tabulated,
    evaluate_kernel,
    hyperradial_matrix,
    radial_matrix,
    radial_me,
)

__all__ = [
    "SystemConfig",
    "ScaleParams",
    "RotationChannel",
    "ConfigError",
    "kinetic_nr",
    "kinetic_sr",
    "two_body_me",
    "three_body_me_hyper",
    "three_body_me_naive",
    "observable_r12",
    "kinetic_nr_matrix",
    "kinetic_sr_matrix",
    "two_body_matrix",
    "three_body_matrix",
    "three_body_matrix_naive",
    "r12_matrix",
    "QuadratureError",
]

Kinematics = Literal["nonrelativistic", "semirelativistic"]
Pair = Literal["12", "13", "23"]
SQRT32 = math.sqrt(1.5)


class ConfigError(ValueError):
    """Inconsistent system, scale or sector settings."""


class QuadratureError(RuntimeError):
    pass


def _kernel_sum(k) -> tuple:
    if k is None:
        return ()
    if isinstance(k, (Power, Gaussian, SqrtShifted, Tabulated)):
        return (k,)
    return tuple(k)


@dataclass(frozen=True)
class SystemConfig:
    m1: float
    m2: float
    m3: float
    kinematics: Kinematics = "nonrelativistic"
    v12: tuple = ()
    v13: tuple = ()
    v23: tuple = ()
    three_body: tuple | None = None

    def __post_init__(self):
        for name in ("v12", "v13", "v23"):
            object.__setattr__(self, name, _kernel_sum(getattr(self, name)))
        if self.three_body is not None:
            object.__setattr__(self, "three_body", _kernel_sum(self.three_body) or None)
        if min(self.m1, self.m2, self.m3) <= 0:
            raise ConfigError("masses must be positive")
        if self.kinematics not in ("nonrelativistic", "semirelativistic"):
            raise ConfigError(f"unknown kinematics {self.kinematics!r}")
        if self.three_body and self.m1 != self.m2:
            raise ConfigError("a three-body force needs m1 == m2 (hyperradial form)")

    @property
    def m12(self) -> float:
        return self.m1 + self.m2

    @property
    def M(self) -> float:
        return self.m1 + self.m2 + self.m3

    @property
    def all_identical(self) -> bool:
        return self.m1 == self.m2 == self.m3 and self.v12 == self.v13 == self.v23

    def pair_kernel(self, pair: Pair) -> tuple:
        return {"12": self.v12, "13": self.v13, "23": self.v23}[pair]


@dataclass(frozen=True)
class ScaleParams:
    """Oscillator lengths of the two Jacobi coordinates."""

    a: float
    b: float = field(default=None)
    locked: bool = True

    def __post_init__(self):
        if self.a <= 0:
            raise ConfigError("scale a must be positive")
        if self.locked:
            b = math.sqrt(3.0) * self.a / 2
            if self.b is not None and self.b != b:
                raise ConfigError("locked scales require b = sqrt(3) a / 2")
            object.__setattr__(self, "b", b)
        elif self.b is None or self.b <= 0:
            raise ConfigError("unlocked scales need a positive b")


@dataclass(frozen=True)
class RotationChannel:
    beta1: float
    beta2: float
    gamma1: float
    gamma2: float
    eta1: float
    eta2: float

    @classmethod
    def from_scales(cls, cfg: SystemConfig, s: ScaleParams) -> "RotationChannel":
        g1 = math.hypot(s.b * cfg.m12, s.a * cfg.m1)
        g2 = math.hypot(s.b * cfg.m12, s.a * cfg.m2)
        return cls(
            beta1=math.atan2(s.a * cfg.m1, s.b * cfg.m12),
            beta2=math.atan2(s.a * cfg.m2, s.b * cfg.m12),
            gamma1=g1,
            gamma2=g2,
            eta1=s.a * s.b * cfg.m12 / g1,
            eta2=s.a * s.b * cfg.m12 / g2,
        )


def _quanta_phase(bra: ChannelState, ket: ChannelState) -> int:
    # i^{Q'} (-i)^{Q}; parity conservation makes Q' - Q even
    d = bra.Q - ket.Q
    if d % 2:
        raise ArithmeticError(f"non-real momentum phase between {bra} and {ket}")
    return -1 if (d // 2) % 2 else 1


def _kp_element(n1: int, n2: int, l: int) -> float:
    # <n1 l| p^2 |n2 l> for the unit oscillator
    if n1 == n2:
        return 2 * n1 + l + 1.5
    if n1 == n2 + 1:
        return math.sqrt(n1 * (n1 + l + 0.5))
    if n2 == n1 + 1:
        return math.sqrt(n2 * (n2 + l + 0.5))
    return 0.0


# ---------------------------------------------------------------------------
# Element by element


def kinetic_nr(bra: ChannelState, ket: ChannelState, cfg: SystemConfig, s: ScaleParams) -> float:
    if bra.L != ket.L or bra.lx != ket.lx or bra.ly != ket.ly:
        return 0.0
    out = 0.0
    if bra.ny == ket.ny:
        out += cfg.m12 / (2 * cfg.m1 * cfg.m2) * _kp_element(bra.nx, ket.nx, ket.lx) / s.a**2
    if bra.nx == ket.nx:
        out += cfg.M / (2 * cfg.m12 * cfg.m3) * _kp_element(bra.ny, ket.ny, ket.ly) / s.b**2
    return out


def _rotated_sum(bra, ket, M_bra, M_ket, axis: str, kernel, scale: float) -> float:
    # sum over nu, nu' of M[nu', bra] M[nu, ket] <nu'| O(scale * axis) |nu>
    sb, sk = block_states(bra.Q, bra.L), block_states(ket.Q, ket.L)
    cb = M_bra[:, sb.index(bra)]
    ck = M_ket[:, sk.index(ket)]
    out = 0.0
    for i, nu_b in enumerate(sb):
        if cb[i] == 0.0:
            continue
        for j, nu_k in enumerate(sk):
            if ck[j] == 0.0:
                continue
            if axis == "y":
                if (nu_b.nx, nu_b.lx, nu_b.ly) != (nu_k.nx, nu_k.lx, nu_k.ly):
                    continue
                r = radial_me(nu_b.ny, nu_b.ly, nu_k.ny, nu_k.ly, kernel, scale)
            else:
                if (nu_b.ny, nu_b.ly, nu_b.lx) != (nu_k.ny, nu_k.ly, nu_k.lx):
                    continue
                r = radial_me(nu_b.nx, nu_b.lx, nu_k.nx, nu_k.lx, kernel, scale)
            out += cb[i] * ck[j] * r
    return out


def two_body_me(pair: Pair, bra: ChannelState, ket: ChannelState, kernel, cfg: SystemConfig,
                s: ScaleParams, bm: BracketProvider | None = None) -> float:
    """<bra| V_pair |ket> for a radial kernel of the pair distance."""
    if bra.L != ket.L or bra.parity != ket.parity:
        return 0.0
    if pair == "12":
        if bra.ny != ket.ny or bra.ly != ket.ly or bra.lx != ket.lx:
            return 0.0
        return radial_me(bra.nx, bra.lx, ket.nx, ket.lx, kernel, s.a)
    bm = bm or BracketProvider()
    rot = RotationChannel.from_scales(cfg, s)
    if pair == "23":
        t = bm.table(rot.beta1)
        phase = -1 if (bra.ly + ket.ly) % 2 else 1
        scale = rot.gamma1 / cfg.m12
    elif pair == "13":
        t = bm.table(rot.beta2)
        phase = 1
        scale = rot.gamma2 / cfg.m12
    else:
        raise ValueError(f"unknown pair {pair!r}")
    val = _rotated_sum(bra, ket, t.block(bra.Q, bra.L), t.block(ket.Q, ket.L), "y", kernel, scale)
    return phase * val


def kinetic_sr(bra: ChannelState, ket: ChannelState, cfg: SystemConfig, s: ScaleParams,
               bm: BracketProvider | None = None) -> float:
    """Sum of sqrt(k_i^2 + m_i^2) over the three particles, in the CM frame."""
    if bra.L != ket.L or bra.parity != ket.parity:
        return 0.0
    phase = _quanta_phase(bra, ket)
    bm = bm or BracketProvider()
    rot = RotationChannel.from_scales(cfg, s)
    out = 0.0
    if bra.nx == ket.nx and bra.lx == ket.lx and bra.ly == ket.ly:
        out += radial_me(bra.ny, bra.ly, ket.ny, ket.ly, SqrtShifted(cfg.m3**2), 1 / s.b)
    t1 = bm.table(rot.beta1)
    sign = -1 if (bra.ly + ket.ly) % 2 else 1
    out += sign * _rotated_sum(bra, ket, t1.block(bra.Q, bra.L), t1.block(ket.Q, ket.L), "x",
                               SqrtShifted(cfg.m1**2), 1 / rot.eta1)
    t2 = bm.table(rot.beta2)
    out += _rotated_sum(bra, ket, t2.block(bra.Q, bra.L), t2.block(ket.Q, ket.L), "x",
                        SqrtShifted(cfg.m2**2), 1 / rot.eta2)
    return phase * out


def _check_hyper_scales(s: ScaleParams):
    if not s.locked:
        raise ConfigError("the hyperspherical route needs locked scales b = sqrt(3) a / 2")


def three_body_me_hyper(bra: ChannelState, ket: ChannelState, kernel, s: ScaleParams, hyper: HyperTable) -> float:
    """<bra| W(sqrt(3/2) a rho) |ket> through hyperspherical coefficients."""
    _check_hyper_scales(s)
    if bra.L != ket.L or bra.lx != ket.lx or bra.ly != ket.ly:
        return 0.0
    cb = hyper.coefficients(bra.nx, bra.lx, bra.ny, bra.ly)
    ck = {K: (N, c) for N, K, c in hyper.coefficients(ket.nx, ket.lx, ket.ny, ket.ly)}
    out = 0.0
    for N1, K, c1 in cb:
        if K not in ck:
            continue
        N2, c2 = ck[K]
        out += c1 * c2 * radial_me(N1, K + 1.5, N2, K + 1.5, kernel, SQRT32 * s.a)
    return out


def _naive_value(fx1, fx2, fy1, fy2, W):
    gx = fx1 * fx2
    gy = fy1 * fy2
    return gx @ W @ gy, np.abs(gx) @ np.abs(W) @ np.abs(gy)


def three_body_me_naive(bra: ChannelState, ket: ChannelState, kernel, s: ScaleParams,
                        nodes: int = 96, rtol: float = 1e-9, max_nodes: int = 1536) -> float:
    """Direct 2-D quadrature of the three-body element (m1 = m2 only)."""
    if bra.L != ket.L or bra.lx != ket.lx or bra.ly != ket.ly:
        return 0.0
    prev = None
    n = nodes
    while n <= max_nodes:
        r, w = semi_infinite_rule(n)
        wx = w * r * r
        X, Y = np.meshgrid(r, r, indexing="ij")
        W = evaluate_kernel(kernel, np.sqrt(1.5 * s.a**2 * X**2 + 2 * s.b**2 * Y**2))
        val, mag = _naive_value(
            wx * radial_function(bra.nx, bra.lx, r), radial_function(ket.nx, ket.lx, r),
            wx * radial_function(bra.ny, bra.ly, r), radial_function(ket.ny, ket.ly, r), W)
        if prev is not None and abs(val - prev) <= rtol * max(abs(val), 1e-3 * mag):
            return float(val)
        prev = val
        n *= 2
    raise QuadratureError(f"naive three-body quadrature did not converge for {bra}, {ket}")


def observable_r12(bra: ChannelState, ket: ChannelState, s: ScaleParams) -> float:
    """Matrix element of the 1-2 distance a|x|."""
    if bra.L != ket.L or bra.ny != ket.ny or bra.ly != ket.ly or bra.lx != ket.lx:
        return 0.0
    return radial_me(bra.nx, bra.lx, ket.nx, ket.lx, Power(1.0, 1.0), s.a)


# ---------------------------------------------------------------------------
# Whole matrices


def _index_groups(channels: Sequence[ChannelState], key):
    groups: dict = {}
    for i, c in enumerate(channels):
        groups.setdefault(key(c), []).append(i)
    return {k: np.asarray(v) for k, v in groups.items()}


def _one_axis_matrix(channels: Sequence[ChannelState], axis: str, radial) -> np.ndarray:
    """Operator acting on one oscillator only; ``radial(l, nmax)`` gives its matrix."""
    if axis == "x":
        key = lambda c: (c.L, c.lx, c.ny, c.ly)
        n_of = lambda c: c.nx
        l_of = lambda c: c.lx
    else:
        key = lambda c: (c.L, c.ly, c.nx, c.lx)
        n_of = lambda c: c.ny
        l_of = lambda c: c.ly
    out = np.zeros((len(channels), len(channels)))
    cache = {}
    for k, idx in _index_groups(channels, key).items():
        ns = np.array([n_of(channels[i]) for i in idx])
        l = l_of(channels[idx[0]])
        R = cache.get(l)
        if R is None:
            R = cache[l] = radial(l, _group_nmax(channels, l_of, n_of, l))
        out[np.ix_(idx, idx)] = R[np.ix_(ns, ns)]
    return out


def _group_nmax(channels, l_of, n_of, l) -> int:
    return max(n_of(c) for c in channels if l_of(c) == l)


def kinetic_nr_matrix(channels: Sequence[ChannelState], cfg: SystemConfig, s: ScaleParams) -> np.ndarray:
    def p2(l, nmax):
        return np.array([[_kp_element(i, j, l) for j in range(nmax + 1)] for i in range(nmax + 1)])

    fp = cfg.m12 / (2 * cfg.m1 * cfg.m2) / s.a**2
    fq = cfg.M / (2 * cfg.m12 * cfg.m3) / s.b**2
    return fp * _one_axis_matrix(channels, "x", p2) + fq * _one_axis_matrix(channels, "y", p2)


def _momentum_sign(channels: Sequence[ChannelState]) -> np.ndarray:
    q = np.array([c.Q for c in channels])
    d = q[:, None] - q[None, :]
    if np.any(d % 2):
        raise ArithmeticError("non-real momentum phase: channels of mixed parity")
    return np.where((d // 2) % 2, -1.0, 1.0)


def _sectors(channels: Sequence[ChannelState]):
    return _index_groups(channels, lambda c: (c.L, c.parity))


def _rotated_matrix(channels: Sequence[ChannelState], beta: float, bm: BracketProvider,
                    axis: str, kernel, scale: float, reflect: str | None) -> np.ndarray:
    """M^T O_axis M restricted to ``channels``, built on the Q-complete space.

    ``reflect`` multiplies by (-1)^{l_x} or (-1)^{l_y} on both sides.
    """
    out = np.zeros((len(channels), len(channels)))
    table = bm.table(beta)
    for (L, parity), idx in _sectors(channels).items():
        qmax = max(channels[i].Q for i in idx)
        full = full_channels(L, parity, qmax)
        pos = {c: i for i, c in enumerate(full)}
        blocks = [table.block(Q, L) for Q in range(qmax + 1) if (-1) ** Q == parity and block_states(Q, L)]
        Mf = scipy.linalg.block_diag(*blocks)
        O = _one_axis_matrix(full, axis, lambda l, nmax: radial_matrix(nmax, l, kernel, scale))
        sel = np.array([pos[channels[i]] for i in idx])
        Ms = Mf[:, sel]
        if reflect:
            Ms = Ms * np.array([(-1.0) ** getattr(channels[i], "l" + reflect) for i in idx])
        out[np.ix_(idx, idx)] = Ms.T @ O @ Ms
    return out


def two_body_matrix(pair: Pair, channels: Sequence[ChannelState], kernel, cfg: SystemConfig,
                    s: ScaleParams, bm: BracketProvider | None = None) -> np.ndarray:
    if not kernel:
        return np.zeros((len(channels), len(channels)))
    if pair == "12":
        return _one_axis_matrix(channels, "x", lambda l, nmax: radial_matrix(nmax, l, kernel, s.a))
    bm = bm or BracketProvider()
    rot = RotationChannel.from_scales(cfg, s)
    if pair == "23":
        return _rotated_matrix(channels, rot.beta1, bm, "y", kernel, rot.gamma1 / cfg.m12, "y")
    if pair == "13":
        return _rotated_matrix(channels, rot.beta2, bm, "y", kernel, rot.gamma2 / cfg.m12, None)
    raise ValueError(f"unknown pair {pair!r}")


def kinetic_sr_matrix(channels: Sequence[ChannelState], cfg: SystemConfig, s: ScaleParams,
                      bm: BracketProvider | None = None, terms: Sequence[int] = (1, 2, 3)) -> np.ndarray:
    """Relativistic kinetic energy; ``terms`` picks particles 3 (1), 1 (2) and 2 (3)."""
    bm = bm or BracketProvider()
    rot = RotationChannel.from_scales(cfg, s)
    out = np.zeros((len(channels), len(channels)))
    if 1 in terms:
        k = SqrtShifted(cfg.m3**2)
        out += _one_axis_matrix(channels, "y", lambda l, nmax: radial_matrix(nmax, l, k, 1 / s.b))
    if 2 in terms:
        out += _rotated_matrix(channels, rot.beta1, bm, "x", SqrtShifted(cfg.m1**2), 1 / rot.eta1, "y")
    if 3 in terms:
        out += _rotated_matrix(channels, rot.beta2, bm, "x", SqrtShifted(cfg.m2**2), 1 / rot.eta2, None)
    return _momentum_sign(channels) * out


def three_body_matrix(channels: Sequence[ChannelState], kernel, s: ScaleParams, hyper: HyperTable) -> np.ndarray:
    """Hyperspherical route: W = sum_K C_K H_K C_K^T within each (L, lx, ly) group."""
    _check_hyper_scales(s)
    out = np.zeros((len(channels), len(channels)))
    c = SQRT32 * s.a
    hcache = {}
    for (L, lx, ly), idx in _index_groups(channels, lambda ch: (ch.L, ch.lx, ch.ly)).items():
        per_k: dict[int, list] = {}
        for row, i in enumerate(idx):
            ch = channels[i]
            for N, K, coef in hyper.coefficients(ch.nx, lx, ch.ny, ly):
                per_k.setdefault(K, []).append((row, N, coef))
        W = np.zeros((len(idx), len(idx)))
        for K, items in per_k.items():
            rows = np.array([t[0] for t in items])
            Ns = np.array([t[1] for t in items])
            cs = np.array([t[2] for t in items])
            H = hcache.get(K)
            if H is None:
                H = hcache[K] = hyperradial_matrix(_hyper_nmax(channels, K), K, kernel, c)
            W[np.ix_(rows, rows)] += np.outer(cs, cs) * H[np.ix_(Ns, Ns)]
        out[np.ix_(idx, idx)] = W
    return out


def _hyper_nmax(channels, K) -> int:
    return max(0, (max(ch.Q for ch in channels) - K) // 2)


def three_body_matrix_naive(channels: Sequence[ChannelState], kernel, s: ScaleParams, **kw) -> np.ndarray:
    """Element-by-element 2-D quadrature; the reference and benchmark route."""
    n = len(channels)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            v = three_body_me_naive(channels[i], channels[j], kernel, s, **kw)
            out[i, j] = out[j, i] = v
    return out


def r12_matrix(channels: Sequence[ChannelState], s: ScaleParams) -> np.ndarray:
    return two_body_matrix("12", channels, (Power(1.0, 1.0),), None, s)
