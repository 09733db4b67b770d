#!/usr/bin/env python3
"""Blockwise selection statistics on Champernowne for growing numbers of blocks.

Prints rho (selected 1-frequency), theta (frequency inside typical blocks) and
the share ell/L of selected symbols coming from atypical blocks.
"""
import argparse
from fractions import Fraction

from normality_lab.automata import sliding_window_dfa, toggle_dfa
from normality_lab.normality import theorem_demo


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=8, help="block length")
    ap.add_argument("--max-log-blocks", type=int, default=17)
    ap.add_argument("--source", default="champernowne")
    args = ap.parse_args(argv)

    dfas = {"toggle": toggle_dfa(), "sliding(11)": sliding_window_dfa("11")}
    print(f"{'dfa':<12} {'blocks':>8} {'rho':>8} {'theta':>8} {'ell/L':>8} {'|rho-1/2|':>10}")
    for name, A in dfas.items():
        for k in range(8, args.max_log_blocks + 1, 3):
            d = theorem_demo(A, args.source, args.n, 1 << k, Fraction(1, 5))
            s = d.stats
            theta = f"{float(s.theta):.4f}" if s.theta is not None else "-"
            print(f"{name:<12} {1 << k:>8} {float(s.rho):>8.4f} {theta:>8} {float(s.ratio):>8.4f} "
                  f"{abs(float(s.rho) - 0.5):>10.4f}")


if __name__ == "__main__":
    main()
