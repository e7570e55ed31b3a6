"""Build (or reuse) the coefficient cache and recompute tables 1 to 5."""
import argparse
import os
import time

from obe3b.coeffs import build_hyper_table, load_tables, save_tables
from obe3b.reproduce import format_report, reproduce_table, required_qmax


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cache", default="hyper28.bin")
    ap.add_argument("--tables", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    args = ap.parse_args()
    qmax = max(required_qmax(t) for t in args.tables)
    if os.path.exists(args.cache) and load_tables(args.cache).qmax >= qmax:
        tables = load_tables(args.cache)
    else:
        t0 = time.perf_counter()
        tables = build_hyper_table(qmax)
        save_tables(tables, args.cache)
        print(f"built Q_max={qmax} cache in {time.perf_counter() - t0:.1f} s -> {args.cache}")
    for t in args.tables:
        t0 = time.perf_counter()
        rows = reproduce_table(t, tables)
        print(f"\n=== table {t} ({time.perf_counter() - t0:.1f} s)")
        print(format_report(rows))


if __name__ == "__main__":
    main()
