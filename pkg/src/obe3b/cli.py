"""Command line front end: precompute, solve, reproduce, benchmark.

Exit codes: 0 success, 1 tolerance failure, 2 configuration error,
3 IO or cache integrity error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .basis import SymmetryError
from .benchmark import loglog_slope, run_benchmark, to_csv
from .coeffs import HyperTable, TableFormatError, build_hyper_table, load_tables, read_header, save_tables
from .config import RunConfig, config_hash, load_config
from .matel import ConfigError
from .reproduce import format_report, reproduce_table
from .solver import NotBracketedError, Solver

EXIT_OK, EXIT_TOLERANCE, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3
QMAX_GUARD = 40
RESIDUAL_LIMIT = 1e-8


class ToleranceError(RuntimeError):
    pass


def _g(x: float) -> float:
    # 12 significant digits in every result file
    return float(f"{x:.12g}")


def cmd_precompute(args) -> int:
    out = Path(args.out)
    if args.qmax < 0:
        raise ConfigError("--qmax must be >= 0")
    if args.qmax > QMAX_GUARD and not args.allow_large:
        raise ConfigError(f"--qmax {args.qmax} exceeds the guard {QMAX_GUARD}; pass --allow-large to override")
    if out.exists() and not args.force:
        raise FileExistsError(f"{out} exists; pass --force to overwrite")
    t0 = time.perf_counter()
    table = build_hyper_table(args.qmax)
    res = table.normalization_residuals()
    worst = max(res.values())
    if worst > RESIDUAL_LIMIT:
        key = max(res, key=res.get)
        raise ToleranceError(f"normalisation residual {worst:.2e} for channel {key} exceeds {RESIDUAL_LIMIT:g}")
    digest = save_tables(table, out)
    print(f"wrote {out}: qmax={args.qmax} channels={len(table.entries)} coefficients={len(table)}")
    print(f"normalisation residual: max {worst:.3e}, mean {sum(res.values()) / len(res):.3e}")
    print(f"sha256 {digest}  ({time.perf_counter() - t0:.2f} s)")
    return EXIT_OK


def _load_cache(path) -> tuple[HyperTable | None, str | None]:
    if path is None:
        return None, None
    table = load_tables(path)
    return table, read_header(path)["sha256"]


def _result_document(cfg: RunConfig, res, cache_sum) -> dict:
    doc = {
        "format": "obe3b-result",
        "version": __version__,
        "provenance": {"config_sha256": config_hash(cfg), "cache_sha256": cache_sum},
        "sector": {"L": cfg.sector.L, "parity": cfg.sector.parity, "exchange": cfg.sector.exchange,
                   "sigma": cfg.sector.sigma, "qmax": cfg.sector.qmax},
        "basis_size": res.basis_size if res else 0,
        "empty_sector": res is None or res.basis_size == 0,
    }
    if res is not None:
        doc["a_star"] = _g(res.a_star)
        doc["b_star"] = _g(res.b_star)
        doc["eigenvalues"] = [_g(x) for x in res.eigenvalues]
        if res.eigenvalues.size:
            doc["E_gs"] = doc["eigenvalues"][0]
        doc["observables"] = {"mean_r12": [_g(x) for x in res.observables.get("mean_r12", [])]}
        doc["timings"] = {k: round(v, 3) for k, v in res.timings.items()}
    return doc


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    tables_path = args.tables or cfg.tables_path
    if cfg.system.three_body and tables_path is None:
        raise FileNotFoundError("this system has a three-body force: pass --tables with a precomputed cache")
    tables, cache_sum = _load_cache(tables_path)
    if tables is not None and cfg.system.three_body and tables.qmax < cfg.sector.qmax:
        raise ConfigError(f"cache covers Q <= {tables.qmax} but basis.qmax is {cfg.sector.qmax}; rerun precompute")
    solver = Solver(cfg.system, cfg.sector, tables)
    if solver.basis(cfg.sector.qmax).size == 0:
        res = None
        print(f"empty sector: {cfg.sector.label} has no states up to Q={cfg.sector.qmax}")
    else:
        _, res = solver.optimize(cfg.protocol)
        res.eigenvalues = res.eigenvalues[: cfg.n_states]
        res.observables["mean_r12"] = res.observables.get("mean_r12", [])[: cfg.n_states]
        print(f"{cfg.sector.label}  Q_max={res.qmax}  N={res.basis_size}  a={res.a_star:.12g}")
        for i, (e, r) in enumerate(zip(res.eigenvalues, res.observables["mean_r12"])):
            print(f"  #{i + 1:<3d} E = {e:.12g}   <r12> = {r:.12g}")
    doc = _result_document(cfg, res, cache_sum)
    out = args.out or cfg.output_path
    if out is None:
        raise ConfigError("no output path: pass --out or set output.path")
    Path(out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    tables, _ = _load_cache(args.tables)
    rows = reproduce_table(args.table, tables)
    print(f"table {args.table}")
    print(format_report(rows))
    bad = [r for r in rows if not r.ok]
    if bad:
        print(f"{len(bad)} value(s) outside tolerance")
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_benchmark(args) -> int:
    cfg = load_config(args.config)
    a = cfg.protocol.a if cfg.protocol.a is not None else 1.0
    tables, _ = _load_cache(args.tables)
    rows = run_benchmark(cfg.system, cfg.sector, args.qmax_list, a, tables)
    text = to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    sizes = [r.basis_size for r in rows]
    sh, sn = loglog_slope(sizes, [r.t_hyper for r in rows]), loglog_slope(sizes, [r.t_naive for r in rows])
    fmt = lambda k: "n/a" if k is None else f"{k:.2f}"
    print(f"# log-log slope vs basis size: hyper {fmt(sh)}, naive {fmt(sn)}")
    last = rows[-1]
    print(f"# speedup at Q_max={last.qmax}: {last.speedup:.1f}x")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="obe3b", description="Oscillator-basis three-body solver")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("precompute", help="build and store hyperspherical coefficients")
    q.add_argument("--qmax", type=int, required=True)
    q.add_argument("--out", required=True)
    q.add_argument("--force", action="store_true", help="overwrite an existing file")
    q.add_argument("--allow-large", action="store_true", help=f"lift the Q_max <= {QMAX_GUARD} guard")
    q.set_defaults(func=cmd_precompute)

    s = sub.add_parser("solve", help="solve one sector from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--tables")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    r = sub.add_parser("reproduce", help="recompute a reference table and compare")
    r.add_argument("--table", type=int, choices=[1, 2, 3, 4, 5], required=True)
    r.add_argument("--tables", required=True)
    r.set_defaults(func=cmd_reproduce)

    b = sub.add_parser("benchmark", help="time hyperspherical vs direct-quadrature assembly")
    b.add_argument("--config", required=True)
    b.add_argument("--qmax-list", type=int, nargs="+", required=True)
    b.add_argument("--tables")
    b.add_argument("--out")
    b.set_defaults(func=cmd_benchmark)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ToleranceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (ConfigError, NotBracketedError, SymmetryError, KeyError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, TableFormatError) as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
