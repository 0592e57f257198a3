#!/usr/bin/env python3
"""Print the period-constant table and the closure residuals.

Usage: python3 scripts/run_periods.py [KMAX]
"""

import sys

from maxface import periods as per


def main(kmax: int = 6) -> None:
    print(f"{'k':>2} {'A_k':>14} {'B_k':>14} {'c_k':>14} "
          f"{'rho_k':>10} {'Gamma_k':>10} {'dual-route':>11} {'closure':>10}")
    for k in range(1, kmax + 1):
        rep = per.period_report(k)
        worst = max(rep["residuals"].values())
        print(f"{k:>2} {rep['A_k']:>14.10f} {rep['B_k']:>14.10f} "
              f"{rep['c_k']:>14.10f} {rep['rho_k']:>10.6f} "
              f"{rep['Gamma_k']:>10.6f} {rep['route_disagreement']:>11.2e} "
              f"{worst:>10.2e}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 6)
