"""Hamiltonian assembly, diagonalisation and the scale optimisation."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.linalg

from .basis import SectorSpec, SymmetrizedBasis, enumerate_channels, symmetrize
from .coeffs import BracketProvider, HyperTable, build_hyper_table
from .matel import (
    ConfigError,
    ScaleParams,
    SystemConfig,
    kinetic_nr_matrix,
    kinetic_sr_matrix,
    r12_matrix,
    three_body_matrix,
    two_body_matrix,
)

__all__ = [
    "VariationalProtocol",
    "SpectrumResult",
    "Solver",
    "assemble",
    "lowest_eigenpairs",
    "optimize_scale",
    "expectation",
    "NotBracketedError",
]


class NotBracketedError(RuntimeError):
    pass


@dataclass(frozen=True)
class VariationalProtocol:
    mode: Literal["fixed_a", "scan", "golden_section"] = "golden_section"
    a_range: tuple[float, float] = (0.5, 4.0)
    optimize_at_Q: int | None = None
    target: int = 0
    tolerance: float = 1e-4
    a: float | None = None
    scan_points: int = 41

    def __post_init__(self):
        lo, hi = self.a_range
        if not 0 < lo < hi:
            raise ConfigError("a_range must satisfy 0 < low < high")
        if self.mode not in ("fixed_a", "scan", "golden_section"):
            raise ConfigError(f"unknown variational mode {self.mode!r}")
        if self.mode == "fixed_a" and (self.a is None or self.a <= 0):
            raise ConfigError("fixed_a mode needs a positive a")
        if self.target < 0 or self.tolerance <= 0:
            raise ConfigError("target must be >= 0 and tolerance > 0")


@dataclass
class SpectrumResult:
    sector: SectorSpec
    qmax: int
    a_star: float
    b_star: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    basis_size: int
    observables: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)


def lowest_eigenpairs(H: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """k smallest eigenvalues (ascending) and orthonormal eigenvectors."""
    n = H.shape[0]
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    if k == 0:
        return np.zeros(0), np.zeros((n, 0))
    w, V = scipy.linalg.eigh(H, subset_by_index=(0, k - 1))
    res = np.linalg.norm(H @ V - V * w, axis=0)
    if np.any(res > 1e-9 * max(1.0, np.linalg.norm(H, 2))):
        raise np.linalg.LinAlgError("eigensolver residual too large")
    return w, V


def _symmetric(H: np.ndarray) -> np.ndarray:
    return 0.5 * (H + H.T)


def _channel_hamiltonian(channels, cfg: SystemConfig, s: ScaleParams, hyper: HyperTable | None,
                         bm: BracketProvider, shortcut: bool) -> np.ndarray:
    if cfg.kinematics == "semirelativistic":
        if shortcut:
            H = 3.0 * kinetic_sr_matrix(channels, cfg, s, bm, terms=(1,))
        else:
            H = kinetic_sr_matrix(channels, cfg, s, bm)
    else:
        H = kinetic_nr_matrix(channels, cfg, s)
    if shortcut:
        H = H + 3.0 * two_body_matrix("12", channels, cfg.v12, cfg, s, bm)
    else:
        for pair in ("12", "13", "23"):
            H = H + two_body_matrix(pair, channels, cfg.pair_kernel(pair), cfg, s, bm)
    if cfg.three_body:
        if hyper is None:
            raise ConfigError("a three-body force needs hyperspherical coefficient tables")
        H = H + three_body_matrix(channels, cfg.three_body, s, hyper)
    return H


def assemble(basis: SymmetrizedBasis, cfg: SystemConfig, s: ScaleParams, tables: HyperTable | None = None,
             bm: BracketProvider | None = None, use_symmetry: bool = True) -> np.ndarray:
    """H in the symmetry-adapted basis, T^T H T symmetrised.

    With three identical particles on a symmetric basis the 13 and 23 pieces
    (and the relativistic terms of particles 1, 2) equal the 12 / particle-3
    ones, so only those are built when ``use_symmetry`` is set.
    """
    bm = bm or BracketProvider()
    if cfg.three_body and not s.locked:
        raise ConfigError("three-body forces are only evaluated with locked scales")
    shortcut = use_symmetry and basis.sector.exchange == "three_identical" and cfg.all_identical
    H = _channel_hamiltonian(basis.channels, cfg, s, tables, bm, shortcut)
    T = basis.transform
    return _symmetric(T.T @ H @ T)


def expectation(op: str, eigenvector: np.ndarray, basis: SymmetrizedBasis, s: ScaleParams,
                tables: HyperTable | None = None, kernel=None, cfg: SystemConfig | None = None,
                bm: BracketProvider | None = None) -> float:
    """v^T O v for ``op`` in {'identity', 'r12', 'pair12', 'pair13', 'pair23', 'three_body'}."""
    T = basis.transform
    ch = basis.channels
    if op == "identity":
        O = np.eye(len(ch))
    elif op == "r12":
        O = r12_matrix(ch, s)
    elif op.startswith("pair"):
        O = two_body_matrix(op[4:], ch, kernel, cfg, s, bm)
    elif op == "three_body":
        O = three_body_matrix(ch, kernel, s, tables)
    else:
        raise ValueError(f"unknown operator {op!r}")
    v = eigenvector
    return float(v @ (T.T @ O @ T) @ v)


class Solver:
    """Holds the bases and tables of one sector so scale scans reuse them."""

    def __init__(self, cfg: SystemConfig, sector: SectorSpec, tables: HyperTable | None = None,
                 locked: bool = True, b_ratio: float | None = None):
        self.cfg = cfg
        self.sector = sector
        self.locked = locked
        self.b_ratio = b_ratio
        if cfg.three_body and not locked:
            raise ConfigError("three-body forces are only evaluated with locked scales")
        if sector.exchange == "three_identical" and not locked:
            raise ConfigError("P23 symmetrisation needs locked scales b = sqrt(3) a / 2")
        if sector.exchange != "none" and cfg.m1 != cfg.m2:
            raise ConfigError("exchange symmetry of particles 1, 2 needs m1 == m2")
        if sector.exchange == "three_identical" and not cfg.m1 == cfg.m2 == cfg.m3:
            raise ConfigError("three identical particles need equal masses")
        if cfg.three_body and tables is None:
            tables = build_hyper_table(sector.qmax)
        if tables is not None and cfg.three_body and tables.qmax < sector.qmax:
            raise ConfigError(f"coefficient tables cover Q <= {tables.qmax}, sector needs {sector.qmax}")
        self.tables = tables
        self.bm = BracketProvider()
        self._bases: dict[int, SymmetrizedBasis] = {}

    def scales(self, a: float) -> ScaleParams:
        if self.locked:
            return ScaleParams(a)
        return ScaleParams(a, (self.b_ratio or math.sqrt(3) / 2) * a, locked=False)

    def basis(self, qmax: int) -> SymmetrizedBasis:
        if qmax not in self._bases:
            sec = self.sector.with_qmax(qmax)
            self._bases[qmax] = symmetrize(sec, enumerate_channels(sec), self.bm.table(math.pi / 6))
        return self._bases[qmax]

    def hamiltonian(self, a: float, qmax: int) -> np.ndarray:
        H = assemble(self.basis(qmax), self.cfg, self.scales(a), self.tables, self.bm)
        self.bm.clear()
        return H

    def energy(self, a: float, qmax: int, target: int = 0) -> float:
        H = self.hamiltonian(a, qmax)
        if H.shape[0] <= target:
            raise ConfigError(f"basis of size {H.shape[0]} has no eigenvalue #{target}")
        w, _ = lowest_eigenpairs(H, target + 1)
        return float(w[target])

    def solve(self, a: float, qmax: int | None = None, k: int | None = None) -> SpectrumResult:
        qmax = self.sector.qmax if qmax is None else qmax
        t0 = time.perf_counter()
        basis = self.basis(qmax)
        s = self.scales(a)
        H = assemble(basis, self.cfg, s, self.tables, self.bm)
        self.bm.clear()
        t1 = time.perf_counter()
        n = H.shape[0]
        w, V = lowest_eigenpairs(H, n if k is None else min(k, n))
        t2 = time.perf_counter()
        obs = {}
        if n:
            R = basis.transform.T @ r12_matrix(basis.channels, s) @ basis.transform
            obs["mean_r12"] = [float(v @ R @ v) for v in V.T]
        return SpectrumResult(self.sector.with_qmax(qmax), qmax, a, s.b, w, V, n, obs,
                              {"assemble": t1 - t0, "diagonalise": t2 - t1})

    def optimize(self, protocol: VariationalProtocol) -> tuple[float, SpectrumResult]:
        q = self.sector.qmax if protocol.optimize_at_Q is None else protocol.optimize_at_Q
        if q > self.sector.qmax:
            raise ConfigError("optimize_at_Q exceeds the sector Q_max")
        if protocol.mode == "fixed_a":
            a_star = protocol.a
        elif protocol.mode == "scan":
            a_star = _scan(lambda a: self.energy(a, q, protocol.target), protocol)
        else:
            a_star = golden_section(lambda a: self.energy(a, q, protocol.target), protocol)
        return a_star, self.solve(a_star)


def _scan(f, protocol: VariationalProtocol) -> float:
    lo, hi = protocol.a_range
    grid = np.geomspace(lo, hi, protocol.scan_points)
    vals = [f(a) for a in grid]
    i = int(np.argmin(vals))
    if i in (0, len(grid) - 1):
        raise NotBracketedError(f"minimum at the edge of a_range {protocol.a_range}; widen the range")
    return float(grid[i])


def golden_section(f, protocol: VariationalProtocol) -> float:
    """Minimise f(a) by golden-section search on ln a, to |delta a| <= tolerance.

    A coarse geometric scan locates a bracketing triple first so a minimum on
    the boundary of ``a_range`` is reported instead of silently returned.
    """
    lo, hi = protocol.a_range
    grid = np.geomspace(lo, hi, 9)
    vals = [f(a) for a in grid]
    i = int(np.argmin(vals))
    if i in (0, len(grid) - 1):
        raise NotBracketedError(f"minimum not bracketed in a_range {protocol.a_range}; widen the range")
    x0, x3 = math.log(grid[i - 1]), math.log(grid[i + 1])
    r = (math.sqrt(5) - 1) / 2
    x1, x2 = x3 - r * (x3 - x0), x0 + r * (x3 - x0)
    f1, f2 = f(math.exp(x1)), f(math.exp(x2))
    while math.exp(x3) - math.exp(x0) > protocol.tolerance:
        if f1 <= f2:
            x3, x2, f2 = x2, x1, f1
            x1 = x3 - r * (x3 - x0)
            f1 = f(math.exp(x1))
        else:
            x0, x1, f1 = x1, x2, f2
            x2 = x0 + r * (x3 - x0)
            f2 = f(math.exp(x2))
    return float(math.exp(0.5 * (x0 + x3)))


def optimize_scale(cfg: SystemConfig, sector: SectorSpec, protocol: VariationalProtocol,
                   tables: HyperTable | None = None) -> tuple[float, SpectrumResult]:
    return Solver(cfg, sector, tables).optimize(protocol)
