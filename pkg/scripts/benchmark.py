"""Assembly timing, hyperspherical vs direct quadrature, written as CSV."""
import argparse

from obe3b.basis import SectorSpec
from obe3b.benchmark import loglog_slope, run_benchmark, to_csv
from obe3b.systems import builtin_system


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--qmax", type=int, nargs="+", default=[4, 8, 12, 16])
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--out", default="benchmark.csv")
    args = ap.parse_args()
    rows = run_benchmark(builtin_system("bench-linear3b"), SectorSpec(0, 1, "three_identical", 1, max(args.qmax)),
                         args.qmax, args.a)
    text = to_csv(rows)
    with open(args.out, "w") as fh:
        fh.write(text)
    print(text)
    sizes = [r.basis_size for r in rows]
    print(f"log-log slope: hyper {loglog_slope(sizes, [r.t_hyper for r in rows])}, "
          f"naive {loglog_slope(sizes, [r.t_naive for r in rows])}")


if __name__ == "__main__":
    main()
