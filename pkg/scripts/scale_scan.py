"""Scan the ground-state energy of the Gaussian three-body force against a.

Shows where the variational minimum sits at a given Q_max, next to the golden
section result.
"""
import argparse

import numpy as np

from obe3b.basis import SectorSpec
from obe3b.coeffs import build_hyper_table
from obe3b.solver import Solver, VariationalProtocol, golden_section
from obe3b.systems import builtin_system


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--qmax", type=int, default=12)
    ap.add_argument("--amin", type=float, default=1.4)
    ap.add_argument("--amax", type=float, default=2.0)
    ap.add_argument("--points", type=int, default=25)
    args = ap.parse_args()
    solver = Solver(builtin_system("gauss3b"), SectorSpec(0, 1, "three_identical", 1, args.qmax),
                    build_hyper_table(args.qmax))
    for a in np.linspace(args.amin, args.amax, args.points):
        print(f"{a:8.4f}  {solver.energy(a, args.qmax):.12f}")
    p = VariationalProtocol(a_range=(1.0, 3.0), optimize_at_Q=args.qmax, tolerance=1e-7)
    a_opt = golden_section(lambda a: solver.energy(a, args.qmax), p)
    print(f"minimum: a = {a_opt:.6f}, E = {solver.energy(a_opt, args.qmax):.12f}")


if __name__ == "__main__":
    main()
