"""Channel enumeration and permutation-symmetry adaptation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .coeffs import BMTable
from .states import ChannelState, QLBlock, block_states

__all__ = [
    "ChannelState",
    "SectorSpec",
    "SymmetrizedBasis",
    "enumerate_channels",
    "full_channels",
    "p23_matrix",
    "symmetrize",
    "SymmetryError",
]

Exchange = Literal["none", "two_identical", "three_identical"]


class SymmetryError(RuntimeError):
    """P23 spectrum inconsistent with an involution (bracket phase bug)."""


@dataclass(frozen=True)
class SectorSpec:
    L: int
    parity: int
    exchange: Exchange = "three_identical"
    sigma: int = 1
    qmax: int = 0

    def __post_init__(self):
        if self.parity not in (1, -1) or self.sigma not in (1, -1):
            raise ValueError("parity and sigma must be +1 or -1")
        if self.L < 0 or self.qmax < 0:
            raise ValueError("L and qmax must be non-negative")
        if self.exchange not in ("none", "two_identical", "three_identical"):
            raise ValueError(f"unknown exchange symmetry {self.exchange!r}")

    def with_qmax(self, qmax: int) -> "SectorSpec":
        return SectorSpec(self.L, self.parity, self.exchange, self.sigma, qmax)

    @property
    def label(self) -> str:
        return f"L={self.L}{'+' if self.parity > 0 else '-'} {self.exchange} sigma={self.sigma:+d}"


def full_channels(L: int, parity: int, qmax: int) -> list[ChannelState]:
    """Every state of total L and given parity up to qmax, Q-complete."""
    out = []
    for Q in range(qmax + 1):
        if (-1) ** Q != parity:
            continue
        out.extend(block_states(Q, L))
    return out


def enumerate_channels(sector: SectorSpec) -> list[ChannelState]:
    """Channel states of the sector, ordered by Q then (lx, ly, nx)."""
    chans = full_channels(sector.L, sector.parity, sector.qmax)
    if sector.exchange == "none":
        return chans
    return [c for c in chans if (-1) ** c.lx == sector.sigma]


def p23_matrix(block: QLBlock, bm: BMTable) -> np.ndarray:
    """Matrix of the 2<->3 exchange on a full (Q, L) block; needs bm at pi/6."""
    if not math.isclose(bm.beta, math.pi / 6, rel_tol=0, abs_tol=1e-15):
        raise ValueError("P23 requires brackets at angle pi/6")
    states = block.states
    idx = {s: i for i, s in enumerate(states)}
    M = bm.block(block.Q, block.L)
    P = np.empty_like(M)
    for r, s in enumerate(states):
        phase = -1.0 if (s.lx + s.ly + block.L) % 2 else 1.0
        P[r, :] = phase * M[idx[s.swapped()], :]
    return P


@dataclass
class SymmetrizedBasis:
    sector: SectorSpec
    channels: list[ChannelState]
    transform: np.ndarray  # channels x symmetric states
    block_of_column: list[tuple[int, int]] = field(default_factory=list)

    @property
    def size(self) -> int:
        return self.transform.shape[1]


def _mgs_range(P: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    # canonical orthonormal basis of range(P): Gram-Schmidt over its columns in order
    cols = []
    for j in range(P.shape[1]):
        v = P[:, j].copy()
        for c in cols:
            v -= (c @ v) * c
        for c in cols:
            v -= (c @ v) * c
        nrm = np.linalg.norm(v)
        if nrm > tol:
            cols.append(v / nrm)
    if not cols:
        return np.zeros((P.shape[0], 0))
    return np.column_stack(cols)


def _symmetric_block(P: np.ndarray, keep: np.ndarray, sigma: int, label: str) -> np.ndarray:
    if P.size and np.max(np.abs(P @ P - np.eye(len(P)))) > 1e-8:
        raise SymmetryError(f"P23 block {label} is not an involution")
    A = P[np.ix_(keep, keep)]
    if A.size == 0:
        return np.zeros((len(keep), 0))
    w, V = np.linalg.eigh(0.5 * (A + A.T))
    if np.any(np.abs(w) > 1 + 1e-8):
        raise SymmetryError(f"P23 block {label}: eigenvalue outside [-1, 1]")
    near = np.abs(w - sigma) <= 1e-6
    ambiguous = (np.abs(w - sigma) > 1e-6) & (np.abs(w - sigma) < 1e-3)
    if np.any(ambiguous):
        raise SymmetryError(f"P23 block {label}: eigenvalues {w[ambiguous]} neither {sigma} nor separated from it")
    Vs = V[:, near]
    return _mgs_range(Vs @ Vs.T)


def symmetrize(sector: SectorSpec, channels: list[ChannelState] | None = None, bm: BMTable | None = None) -> SymmetrizedBasis:
    """Orthonormal symmetry-adapted basis of the sector.

    For three identical particles the columns are the sigma eigenvectors of
    P23 inside the P12-selected subspace of each (Q, L) block. Other exchange
    modes return the identity on the selected channels.
    """
    if channels is None:
        channels = enumerate_channels(sector)
    if sector.exchange != "three_identical":
        return SymmetrizedBasis(sector, list(channels), np.eye(len(channels)), [(c.Q, c.L) for c in channels])
    if bm is None:
        bm = BMTable(math.pi / 6)
    pos = {c: i for i, c in enumerate(channels)}
    cols = []
    blocks = []
    for Q in range(sector.qmax + 1):
        if (-1) ** Q != sector.parity:
            continue
        block = QLBlock(Q, sector.L)
        states = block.states
        keep = np.array([i for i, s in enumerate(states) if s in pos], dtype=int)
        if keep.size == 0:
            continue
        P = p23_matrix(block, bm)
        vecs = _symmetric_block(P, keep, sector.sigma, f"Q={Q} L={sector.L}")
        for k in range(vecs.shape[1]):
            col = np.zeros(len(channels))
            for i, v in zip(keep, vecs[:, k]):
                col[pos[states[i]]] = v
            cols.append(col)
            blocks.append((Q, sector.L))
    T = np.column_stack(cols) if cols else np.zeros((len(channels), 0))
    return SymmetrizedBasis(sector, list(channels), T, blocks)
