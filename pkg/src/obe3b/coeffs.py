"""Brody-Moshinsky brackets and hyperspherical coefficients.

Brackets
    ``M[nu, n] = <nu; L | n; L>_beta`` is the coefficient of the unrotated
    state ``Phi_nu(x, y)`` in the expansion of ``Phi_n(x~, y~)`` with
    ``x~ = cos(beta) x + sin(beta) y`` and ``y~ = -sin(beta) x + cos(beta) y``.
    Rotations in the (x, y) plane commute with the six-dimensional oscillator
    and with L, so each (Q, L) block is mapped onto itself. The block matrix is
    ``exp(beta K)`` where ``K`` is the generator ``y.grad_x - x.grad_y``
    restricted to the block. ``K`` is built from one-body position matrix
    elements (the gradient follows from ``[H, r] = -grad``) and diagonalised
    once per block, so a new angle costs one small matrix product.

Hyperspherical coefficients
    ``<nx ny | N K>_{lx ly}`` from the closed four-fold sum, evaluated in exact
    rational arithmetic (every Gamma of a half-integer contributes a sqrt(pi)
    that cancels against the normalisation), then rounded once.
"""
from __future__ import annotations

import hashlib
import io
import math
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import gmpy2
import numpy as np
from gmpy2 import mpq, mpz

from .specfn import clebsch_gordan
from .states import ChannelState, QLBlock, block_states

__all__ = [
    "BracketProvider",
    "BMTable",
    "brody_moshinsky",
    "hyperspherical_coefficient",
    "HyperTable",
    "build_hyper_table",
    "save_tables",
    "load_tables",
    "TableFormatError",
    "FORMAT_VERSION",
]


# ---------------------------------------------------------------------------
# Brody-Moshinsky brackets


def _r_radial(n1: int, l1: int, n2: int, l2: int) -> float:
    # <n1 l1 | r | n2 l2> for the oscillator radial functions, |l1 - l2| = 1
    if l1 == l2 + 1:
        if n1 == n2:
            return math.sqrt(n2 + l2 + 1.5)
        if n1 == n2 - 1:
            return -math.sqrt(n2)
        return 0.0
    if l2 == l1 + 1:
        return _r_radial(n2, l2, n1, l1)
    return 0.0


def _r_angular(l1: int, m1: int, l2: int, m2: int, q: int) -> float:
    # <l1 m1 | C_1q | l2 m2>, C = sqrt(4 pi / 3) Y_1
    return (
        math.sqrt((2 * l2 + 1) / (2 * l1 + 1))
        * clebsch_gordan(l2, 0, 1, 0, l1, 0)
        * clebsch_gordan(l2, m2, 1, q, l1, m1)
    )


def _xy_element(a: ChannelState, b: ChannelState) -> float:
    """<a | x.y | b> in the coupled basis (M = 0 projection)."""
    if abs(a.lx - b.lx) != 1 or abs(a.ly - b.ly) != 1:
        return 0.0
    rx = _r_radial(a.nx, a.lx, b.nx, b.lx)
    ry = _r_radial(a.ny, a.ly, b.ny, b.ly)
    if rx == 0.0 or ry == 0.0:
        return 0.0
    L = a.L
    total = 0.0
    for mbx in range(-b.lx, b.lx + 1):
        mby = -mbx
        if abs(mby) > b.ly:
            continue
        cb = clebsch_gordan(b.lx, mbx, b.ly, mby, L, 0)
        if cb == 0.0:
            continue
        for mu in (-1, 0, 1):
            # x.y = sum_mu (-1)^mu x_{-mu} y_mu
            max_ = mbx - mu
            may = mby + mu
            if abs(max_) > a.lx or abs(may) > a.ly:
                continue
            ca = clebsch_gordan(a.lx, max_, a.ly, may, L, 0)
            if ca == 0.0:
                continue
            total += (
                (-1) ** mu
                * ca
                * cb
                * _r_angular(a.lx, max_, b.lx, mbx, -mu)
                * _r_angular(a.ly, may, b.ly, mby, mu)
            )
    return total * rx * ry


def rotation_generator(Q: int, L: int) -> np.ndarray:
    """Antisymmetric matrix of y.grad_x - x.grad_y on the (Q, L) block."""
    states = block_states(Q, L)
    index = {s: i for i, s in enumerate(states)}
    K = np.zeros((len(states), len(states)))
    for j, b in enumerate(states):
        for dlx, dly in ((-1, -1), (-1, 1), (1, -1), (1, 1)):
            lx = b.lx + dlx
            ly = b.ly + dly
            if lx < 0 or ly < 0:
                continue
            for nx in (b.nx - 1, b.nx, b.nx + 1):
                if nx < 0:
                    continue
                rest = Q - lx - ly - 2 * nx
                if rest < 0 or rest % 2:
                    continue
                a = ChannelState(nx, lx, rest // 2, ly, L)
                i = index.get(a)
                if i is None or i <= j:
                    continue
                v = _xy_element(a, b)
                if v == 0.0:
                    continue
                ebx = 2 * b.nx + b.lx
                eax = 2 * a.nx + a.lx
                K[i, j] = 2.0 * (ebx - eax) * v
                K[j, i] = -K[i, j]
    return K


@dataclass(frozen=True)
class _BlockRotation:
    states: tuple[ChannelState, ...]
    eigvals: np.ndarray  # integer spectrum of i K
    vectors: np.ndarray

    def matrix(self, beta: float) -> np.ndarray:
        if not self.states:
            return np.zeros((0, 0))
        phase = np.exp(-1j * beta * self.eigvals)
        return ((self.vectors * phase) @ self.vectors.conj().T).real


@lru_cache(maxsize=None)
def _block_rotation(Q: int, L: int) -> _BlockRotation:
    states = block_states(Q, L)
    if not states:
        return _BlockRotation(states, np.zeros(0), np.zeros((0, 0)))
    K = rotation_generator(Q, L)
    lam, vec = np.linalg.eigh(1j * K)
    rounded = np.rint(lam)
    if np.max(np.abs(lam - rounded), initial=0.0) > 1e-8:
        raise RuntimeError(f"rotation generator spectrum not integral in block Q={Q}, L={L}")
    return _BlockRotation(states, rounded, vec)


def brody_moshinsky(block: QLBlock, beta: float) -> np.ndarray:
    """Orthogonal bracket matrix of one (Q, L) block, ordered as ``block.states``."""
    return _block_rotation(block.Q, block.L).matrix(beta)


@dataclass
class BMTable:
    """Per-(Q, L) bracket matrices at one angle."""

    beta: float
    blocks: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)

    def block(self, Q: int, L: int) -> np.ndarray:
        key = (Q, L)
        if key not in self.blocks:
            self.blocks[key] = brody_moshinsky(QLBlock(Q, L), self.beta)
        return self.blocks[key]

    def bracket(self, bra: ChannelState, ket: ChannelState) -> float:
        """<bra; L | ket; L>_beta (zero across blocks)."""
        if bra.L != ket.L or bra.Q != ket.Q:
            return 0.0
        idx = QLBlock(ket.Q, ket.L).index()
        return float(self.block(ket.Q, ket.L)[idx[bra], idx[ket]])


class BracketProvider:
    """Hands out BMTables, keeping one per angle.

    The pi/6 table lives for the whole run; the mass-dependent angles change
    with every variational step, so callers drop those via :meth:`clear`.
    """

    def __init__(self):
        self._tables: dict[float, BMTable] = {}

    def table(self, beta: float) -> BMTable:
        t = self._tables.get(beta)
        if t is None:
            t = self._tables[beta] = BMTable(beta)
        return t

    def clear(self, keep=(math.pi / 6,)) -> None:
        self._tables = {b: t for b, t in self._tables.items() if b in keep}


# ---------------------------------------------------------------------------
# Hyperspherical coefficients


@lru_cache(maxsize=None)
def _fact(n: int) -> mpz:
    return gmpy2.fac(n)


@lru_cache(maxsize=None)
def _gamma_r(x2: int) -> mpq:
    # Gamma(x2/2) with the sqrt(pi) of half-integer arguments dropped
    if x2 % 2 == 0:
        return mpq(_fact(x2 // 2 - 1))
    k = (x2 - 1) // 2
    return mpq(_fact(2 * k), 4**k * _fact(k))


@lru_cache(maxsize=None)
def _binom_r(x2: int, k: int) -> mpq:
    # C(x2/2, k) for integer k >= 0
    x = mpq(x2, 2)
    out = mpq(1)
    for j in range(k):
        out *= x - j
    return out / _fact(k)


def _hyper_exact(nx: int, lx: int, ny: int, ly: int, N: int, K: int) -> tuple[mpq, mpq]:
    # returns (S, C2) with coefficient = S * sqrt(C2)
    n = (K - lx - ly) // 2
    a = [(-1) ** s * _binom_r(2 * (N + K + 2), N - s) / _fact(s) for s in range(N + 1)]
    half = (lx + ly + K) // 2 + 3
    A = [sum(a[s] * _fact(half + t + s - 1) for s in range(N + 1)) for t in range(nx + ny + 1)]
    b = [
        (-1) ** (n - m) * _binom_r(2 * n + 2 * ly + 1, n - m) * _binom_r(2 * n + 2 * lx + 1, m)
        for m in range(n + 1)
    ]
    xs = [(-1) ** i * _binom_r(2 * nx + 2 * lx + 1, nx - i) / _fact(i) for i in range(nx + 1)]
    ys = [(-1) ** j * _binom_r(2 * ny + 2 * ly + 1, ny - j) / _fact(j) for j in range(ny + 1)]
    S = mpq(0)
    for i in range(nx + 1):
        for j in range(ny + 1):
            B = sum(
                b[m] * _gamma_r(2 * (lx + i + n - m) + 3) * _gamma_r(2 * (ly + j + m) + 3)
                for m in range(n + 1)
            )
            S += xs[i] * ys[j] * A[i + j] * B / (4 * _fact(lx + ly + n + i + j + 2))
    nk2 = 2 * _fact(n) * (K + 2) * _fact(n + lx + ly + 1) / (
        _gamma_r(2 * n + 2 * lx + 3) * _gamma_r(2 * n + 2 * ly + 3)
    )
    c2 = nk2 * 8 * _fact(nx) * _fact(ny) * _fact(N) / (
        _gamma_r(2 * nx + 2 * lx + 3) * _gamma_r(2 * ny + 2 * ly + 3) * _fact(K + N + 2)
    )
    return S, c2


def hyperspherical_coefficient(nx: int, lx: int, ny: int, ly: int, N: int, K: int) -> float:
    """<nx ny | N K>_{lx ly}; zero when quanta or K parity rules fail."""
    if min(nx, lx, ny, ly, N, K) < 0:
        return 0.0
    if 2 * N + K != 2 * nx + lx + 2 * ny + ly:
        return 0.0
    if K < lx + ly or (K - lx - ly) % 2:
        return 0.0
    S, c2 = _hyper_exact(nx, lx, ny, ly, N, K)
    if S == 0:
        return 0.0
    with gmpy2.context(gmpy2.get_context(), precision=128):
        v = gmpy2.sqrt(gmpy2.mpfr(S * S * c2))
    return math.copysign(float(v), S)


def hyper_channel_pairs(nx: int, lx: int, ny: int, ly: int) -> list[tuple[int, int]]:
    Q = 2 * nx + lx + 2 * ny + ly
    return [((Q - K) // 2, K) for K in range(lx + ly, Q + 1, 2)]


@dataclass
class HyperTable:
    """(nx, lx, ny, ly) -> [(N, K, coefficient)], complete up to ``qmax``."""

    qmax: int
    entries: dict[tuple[int, int, int, int], list[tuple[int, int, float]]]

    def coefficients(self, nx: int, lx: int, ny: int, ly: int) -> list[tuple[int, int, float]]:
        key = (nx, lx, ny, ly)
        if key not in self.entries:
            raise KeyError(f"hyperspherical coefficients missing for channel {key} (table qmax={self.qmax})")
        return self.entries[key]

    def normalization_residuals(self) -> dict[tuple[int, int, int, int], float]:
        return {k: abs(sum(c * c for _, _, c in v) - 1.0) for k, v in self.entries.items()}

    def __len__(self) -> int:
        return sum(len(v) for v in self.entries.values())


def channel_keys(qmax: int):
    for Q in range(qmax + 1):
        for lx in range(Q + 1):
            for ly in range(Q - lx + 1):
                rest = Q - lx - ly
                if rest % 2:
                    continue
                for nx in range(rest // 2 + 1):
                    yield (nx, lx, rest // 2 - nx, ly)


def build_hyper_table(qmax: int) -> HyperTable:
    entries = {}
    for key in channel_keys(qmax):
        entries[key] = [(N, K, hyperspherical_coefficient(*key, N, K)) for N, K in hyper_channel_pairs(*key)]
    return HyperTable(qmax, entries)


# ---------------------------------------------------------------------------
# On-disk cache

FORMAT_VERSION = 1
_MAGIC = "OBE3B-COEFFS"
_RECORD = struct.Struct("<hhhhhhd")


class TableFormatError(Exception):
    """Raised when a coefficient file is corrupt, truncated or of another version."""


def _payload(table: HyperTable) -> bytes:
    buf = io.BytesIO()
    for key in sorted(table.entries):
        for N, K, c in table.entries[key]:
            buf.write(_RECORD.pack(*key, N, K, c))
    return buf.getvalue()


def save_tables(table: HyperTable, path) -> str:
    """Write the table; returns the payload sha256."""
    payload = _payload(table)
    digest = hashlib.sha256(payload).hexdigest()
    header = (
        f"{_MAGIC}\n"
        f"version={FORMAT_VERSION}\n"
        f"kind=hyperspherical\n"
        f"qmax={table.qmax}\n"
        f"records={len(payload) // _RECORD.size}\n"
        f"record_format={_RECORD.format}\n"
        f"sha256={digest}\n"
        "end\n"
    )
    Path(path).write_bytes(header.encode("ascii") + payload)
    return digest


def read_header(path) -> dict[str, str]:
    raw = Path(path).read_bytes()
    return _split(raw)[0]


def _split(raw: bytes) -> tuple[dict[str, str], bytes]:
    marker = b"\nend\n"
    pos = raw.find(marker)
    if not raw.startswith(_MAGIC.encode()) or pos < 0:
        raise TableFormatError("not a coefficient file (bad magic or missing header)")
    lines = raw[:pos].decode("ascii").splitlines()[1:]
    header = dict(line.split("=", 1) for line in lines)
    return header, raw[pos + len(marker):]


def load_tables(path) -> HyperTable:
    raw = Path(path).read_bytes()
    header, payload = _split(raw)
    version = int(header.get("version", -1))
    if version != FORMAT_VERSION:
        raise TableFormatError(f"file format version {version} not supported (this build reads version {FORMAT_VERSION})")
    n = int(header["records"])
    if len(payload) != n * _RECORD.size:
        raise TableFormatError(f"truncated coefficient file: expected {n} records, found {len(payload) / _RECORD.size:g}")
    if hashlib.sha256(payload).hexdigest() != header["sha256"]:
        raise TableFormatError("checksum mismatch in coefficient file")
    entries: dict = {}
    for rec in _RECORD.iter_unpack(payload):
        entries.setdefault(rec[:4], []).append((rec[4], rec[5], rec[6]))
    return HyperTable(int(header["qmax"]), entries)
