#!/usr/bin/env python3
"""Run the CMC-1 deformation certification over a t-grid and print the
residual table.

Usage: python3 scripts/run_deformation.py [K] [T1,T2,...]
"""

import sys

from maxface import desitter as ds


def main(k: int = 1, ts=(0.005, 0.01, 0.02)) -> None:
    print(f"k = {k}, admissible window |t| < {k / (4 * (k + 1)):.6f}")
    print(f"{'t':>8} {'nu_0':>12} {'nu_inf':>12} {'su11':>10} "
          f"{'tr tau0':>10} {'tr tauinf':>10} {'theta0':>10}")
    for t in ts:
        rep = ds.deformation_report(k, t)
        print(f"{t:>8.4f} {rep['nu_0']:>12.8f} {rep['nu_inf']:>12.8f} "
              f"{rep['su11_worst_defect']:>10.2e} "
              f"{rep['trace_tau0_residual']:>10.2e} "
              f"{rep['trace_tauinf_residual']:>10.2e} "
              f"{rep['theta0_residual']:>10.2e}")
    pair = ds.AdmissiblePair(k, ts[-1])
    for which in ("zero", "infinity"):
        end = ds.end_asymptotics(pair, which=which)
        mark = "ok" if end["conclusive"] else "inconclusive"
        print(f"end {which:<9} slope {end['slope']:>9.5f} "
              f"expected {end['expected']:>9.5f} "
              f"rel {end['rel_error']:.2e} R^2 {end['r_squared']:.6f} [{mark}]")


if __name__ == "__main__":
    k = int(sys.argv[1]) if len(sys.argv) > 1 else 1
    ts = ([float(s) for s in sys.argv[2].split(",")]
          if len(sys.argv) > 2 else (0.005, 0.01, 0.02))
    main(k, ts)
