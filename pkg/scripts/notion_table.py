#!/usr/bin/env python3
"""Run every normality estimator on a few sources and tabulate final deviations."""
import argparse

from normality_lab.normality import (freq_block, freq_caterpillar, freq_copeland, freq_postnikov,
                                     freq_word)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--log-n", type=int, default=18)
    ap.add_argument("sources", nargs="*",
                    default=["champernowne", "periodic:01", "random:1/2:1", "periodic:0011"])
    args = ap.parse_args(argv)
    N = 1 << args.log_n
    probes = {
        "word 1": lambda s: freq_word(s, "1", [N]),
        "block 11": lambda s: freq_block(s, "11", [N]),
        "caterpillar 101": lambda s: freq_caterpillar(s, "101", [N]),
        "postnikov 10": lambda s: freq_postnikov(s, "10", [N]),
        "copeland 1/3": lambda s: freq_copeland(s, 1, 3, [N]),
    }
    print("source".ljust(16) + "".join(k.rjust(17) for k in probes))
    for src in args.sources:
        cells = []
        for fn in probes.values():
            r = fn(src)
            cells.append(f"{r.final_deviation:.4f}{'' if r.converged else '*'}".rjust(17))
        print(src.ljust(16) + "".join(cells))
    print("* = not converged at tolerance 0.05")


if __name__ == "__main__":
    main()
