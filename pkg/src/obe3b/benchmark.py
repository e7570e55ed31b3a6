"""Wall-clock comparison of the two three-body routes."""
from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass

import numpy as np

from .basis import SectorSpec, enumerate_channels, symmetrize
from .coeffs import HyperTable, build_hyper_table
from .matel import (
    ConfigError,
    ScaleParams,
    SystemConfig,
    kinetic_nr_matrix,
    three_body_matrix,
    three_body_matrix_naive,
)

__all__ = ["BenchRow", "run_benchmark", "loglog_slope", "to_csv"]


@dataclass(frozen=True)
class BenchRow:
    qmax: int
    channels: int
    basis_size: int
    t_hyper: float
    t_naive: float
    max_diff: float

    @property
    def speedup(self) -> float:
        return self.t_naive / self.t_hyper if self.t_hyper > 0 else float("inf")


def _assemble(route, ch, cfg, s, T):
    H = kinetic_nr_matrix(ch, cfg, s) + route()
    return T.T @ H @ T


def run_benchmark(cfg: SystemConfig, sector: SectorSpec, qmax_list, a: float = 1.0,
                  tables: HyperTable | None = None) -> list[BenchRow]:
    """Time ground-state Hamiltonian assembly with each route; no optimisation."""
    if not cfg.three_body:
        raise ConfigError("benchmark needs a system with a three-body force")
    if cfg.v12 or cfg.v13 or cfg.v23:
        raise ConfigError("benchmark expects a pure three-body system")
    qmax_list = sorted(set(qmax_list))
    if tables is None or tables.qmax < max(qmax_list):
        tables = build_hyper_table(max(qmax_list))
    s = ScaleParams(a)
    rows = []
    for q in qmax_list:
        sec = sector.with_qmax(q)
        ch = enumerate_channels(sec)
        basis = symmetrize(sec, ch)
        T = basis.transform
        t0 = time.perf_counter()
        Hh = _assemble(lambda: three_body_matrix(ch, cfg.three_body, s, tables), ch, cfg, s, T)
        t1 = time.perf_counter()
        Hn = _assemble(lambda: three_body_matrix_naive(ch, cfg.three_body, s), ch, cfg, s, T)
        t2 = time.perf_counter()
        diff = float(np.max(np.abs(Hh - Hn))) if Hh.size else 0.0
        rows.append(BenchRow(q, len(ch), basis.size, t1 - t0, t2 - t1, diff))
    return rows


def loglog_slope(sizes, times) -> float | None:
    """Exponent of a power-law fit t ~ N^k; None with fewer than two usable points."""
    x = np.asarray(sizes, dtype=float)
    y = np.asarray(times, dtype=float)
    ok = (x > 0) & (y > 0)
    if ok.sum() < 2 or np.unique(x[ok]).size < 2:
        return None
    return float(np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0])


def to_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["qmax", "channels", "basis_size", "t_hyper_s", "t_naive_s", "speedup", "max_abs_diff"])
    for r in rows:
        w.writerow([r.qmax, r.channels, r.basis_size, f"{r.t_hyper:.6g}", f"{r.t_naive:.6g}",
                    f"{r.speedup:.4g}", f"{r.max_diff:.3e}"])
    return buf.getvalue()
