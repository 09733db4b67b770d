#!/usr/bin/env python3
"""Write exact lemma trend tables (CSV) for the toggle and 3-state rotator DFAs."""
import argparse
from fractions import Fraction
from pathlib import Path

from normality_lab.automata import rotator_dfa, toggle_dfa
from normality_lab.markov import min_accepting_mass
from normality_lab.measure import parse_rational
from normality_lab.strategies import dfa_strategy
from normality_lab.verify import verify_lemma1, verify_lemma2, verify_mainclaim


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=parse_rational, default=Fraction(1, 2))
    ap.add_argument("--eps", type=parse_rational, default=Fraction(1, 4))
    ap.add_argument("--b", type=parse_rational, default=Fraction(1, 4))
    ap.add_argument("--n-max", type=int, default=16)
    ap.add_argument("--out", type=Path, default=Path("trends"))
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    ns = range(2, args.n_max + 1)

    for name, A in (("toggle", toggle_dfa()), ("rotator3", rotator_dfa(3))):
        c = min_accepting_mass(A, args.p)
        reports = {
            "lemma1": verify_lemma1(A, args.p, c / 2, ns),
            "lemma2": verify_lemma2(dfa_strategy(A, name), args.p, args.b, args.eps, "1", ns),
            "mainclaim": verify_mainclaim(A, args.p, args.eps, ns, b=args.b),
        }
        for kind, rep in reports.items():
            path = args.out / f"{name}_{kind}.csv"
            path.write_text(rep.to_csv())
            verdict = "pass" if rep.passed else "FAIL " + str(rep.verdicts)
            print(f"{path}: {verdict}")


if __name__ == "__main__":
    main()
