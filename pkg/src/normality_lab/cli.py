"""Command-line entry point.

Exit codes: 0 pass, 1 verification verdict failed, 2 usage or configuration
error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction

from .automata import Dfa, DfaFormatError, compose, select_stream
from .generators import generate, open_source, parse_source
from .markov import (induce_matrix, is_irreducible, min_accepting_mass, period, simulate_trajectory,
                     stationary)
from .measure import as_param, format_rational, parse_rational
from .normality import (freq_block, freq_caterpillar, freq_copeland, freq_postnikov, freq_word)
from .strategies import dfa_strategy, suffix_strategy
from .verify import (DEFAULT_CAP, EnumerationCapError, TrendReport, verify_lemma1, verify_lemma2,
                     verify_lemma3, verify_lemma3_catalog, verify_mainclaim, verify_partition)

EXIT_PASS, EXIT_VERDICT, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _source(text: str):
    try:
        return parse_source(text)
    except ValueError as exc:
        raise UsageError(f"bad source {text!r}: {exc}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- argument types ----------------------------------------------------------

def rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def count(text: str) -> int:
    """Nonnegative integer, also accepting ``a^b``."""
    try:
        if "^" in text:
            base, exp = text.split("^")
            value = int(base) ** int(exp)
        else:
            value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or a^b, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def int_range(text: str) -> list[int]:
    """``8``, ``8,12,16``, ``4..16`` or ``4..16:4`` (inclusive)."""
    try:
        if ".." in text:
            lo, _, rest = text.partition("..")
            hi, _, step = rest.partition(":")
            values = list(range(int(lo), int(hi) + 1, int(step) if step else 1))
        else:
            values = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer range {text!r}")
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"range must contain positive integers: {text!r}")
    return values


def _load_dfa(path: str) -> Dfa:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read DFA file {path!r}: {exc.strerror}") from exc
    return Dfa.from_json(text)


def _load_strategy(ref: str):
    kind, _, arg = ref.partition(":")
    if kind == "suffix":
        return suffix_strategy(arg)
    if kind == "dfa":
        return dfa_strategy(_load_dfa(arg), name=ref)
    raise UsageError(f"strategy must be suffix:<bits> or dfa:<file.json>, got {ref!r}")


def _write(args, text: str):
    if not text.endswith("\n"):
        text += "\n"
    if not getattr(args, "output", None):
        sys.stdout.write(text)
        return
    target = os.path.abspath(args.output)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit_report(args, report) -> int:
    _write(args, report.to_json() if args.format == "json" else report.to_csv())
    return EXIT_PASS if report.passed else EXIT_VERDICT


# -- subcommands -------------------------------------------------------------

def cmd_select(args) -> int:
    A = _load_dfa(args.dfa)
    if args.source is None:
        raise UsageError("select requires --source")
    spec = _source(args.source)
    result = select_stream(A, open_source(spec), args.n, args.from_state)
    if args.format == "json":
        payload = {"selected": result.selected, "length": len(result.selected)}
        if args.positions:
            payload["positions"] = list(result.selected_positions)
        _write(args, json.dumps(payload))
    else:
        text = result.selected
        if args.positions:
            text += "\n" + " ".join(map(str, result.selected_positions))
        _write(args, text)
    return EXIT_PASS


def cmd_compose(args) -> int:
    C = compose(_load_dfa(args.first), _load_dfa(args.second))
    _write(args, C.to_json())
    return EXIT_PASS


def cmd_markov(args) -> int:
    A = _load_dfa(args.dfa)
    p = as_param(args.p)
    P = induce_matrix(A, p)
    out = {"matrix": P.to_json(), "irreducible": is_irreducible(P)}
    if out["irreducible"]:
        out["period"] = period(P)
        out["stationary"] = stationary(P).to_json()
        if A.accepting and p.positive:
            out["c"] = format_rational(min_accepting_mass(A, p))
    if args.simulate:
        stats = simulate_trajectory(P, args.start, args.simulate, args.seed)
        out["visits"] = {"n": stats.n, "counts": list(stats.counts)}
    _write(args, json.dumps(out, indent=2))
    return EXIT_PASS


def cmd_verify(args) -> int:
    lemma = args.lemma
    p = as_param(args.p)
    if lemma == "lemma3":
        return _verify_lemma3(args, p)
    if lemma == "lemma2":
        if args.strategy:
            S = _load_strategy(args.strategy)
        elif args.dfa:
            S = dfa_strategy(_load_dfa(args.dfa), name=f"dfa:{args.dfa}")
        else:
            raise UsageError("lemma2 requires --strategy or --dfa")
        report = verify_lemma2(S, p, args.b, args.eps, args.symbol, args.n, cap=args.cap)
        return _emit_report(args, report)
    if not args.dfa:
        raise UsageError(f"{lemma} requires --dfa")
    A = _load_dfa(args.dfa)
    if lemma == "lemma1":
        report = verify_lemma1(A, p, args.eps, args.n, d=args.d, cap=args.cap)
    elif lemma == "mainclaim":
        report = verify_mainclaim(A, p, args.eps, args.n, b=args.b_explicit, d=args.d, cap=args.cap)
    else:
        report = TrendReport("partition", {"p": p.p1, "b": args.b, "epsilon": args.eps},
                             ["n", "covers", "disjoint"])
        for n in args.n:
            chk = verify_partition(A, p, args.b, args.eps, n, cap=args.cap)
            report.rows.append({"n": n, "covers": chk.covers, "disjoint": chk.disjoint})
        report.verdicts = {"partition": all(r["covers"] and r["disjoint"] for r in report.rows)}
    return _emit_report(args, report)


def _verify_lemma3(args, p) -> int:
    if args.catalog:
        if args.catalog != "default":
            raise UsageError(f"unknown catalog {args.catalog!r}")
        report = TrendReport("lemma3-catalog", {"catalog": args.catalog},
                             ["p", "checks", "violations"])
        for q in (Fraction(1, 2), Fraction(1, 3)):
            res = verify_lemma3_catalog(ps=[q])
            report.rows.append({"p": q, "checks": res.checks, "violations": len(res.violations)})
        report.verdicts = {"no_violations": all(r["violations"] == 0 for r in report.rows)}
        return _emit_report(args, report)
    if not args.strategy and not args.dfa:
        raise UsageError("lemma3 requires --catalog, --strategy or --dfa")
    S = _load_strategy(args.strategy) if args.strategy else dfa_strategy(_load_dfa(args.dfa))
    # the empty word is written as "e"
    F = ["" if w == "e" else w for chunk in args.F or [] for w in chunk.split(",")]
    if any(set(w) - {"0", "1"} for w in F):
        raise UsageError("--F must be a comma-separated list of binary words")
    report = TrendReport("lemma3", {"strategy": str(S), "p": p.p1, "F": ",".join(F)},
                         ["n", "mu_M", "mu_R", "holds"])
    for n in args.n:
        if n > args.cap:
            raise EnumerationCapError(f"n={n} exceeds the enumeration cap of {args.cap}")
        chk = verify_lemma3(S, F, n, p)
        report.rows.append({"n": n, "mu_M": chk.mu_M, "mu_R": chk.mu_R, "holds": chk.holds})
    report.verdicts = {"holds": all(r["holds"] for r in report.rows)}
    return _emit_report(args, report)


_NOTIONS = {
    "p-distributed": "word", "word": "word",
    "block": "block",
    "caterpillar": "caterpillar",
    "postnikov": "postnikov", "postnikov-admissible": "postnikov",
    "copeland": "copeland", "copeland-arithmetic": "copeland",
}


def _default_schedule(N: int) -> list[int]:
    pts = [1 << k for k in range(6, N.bit_length()) if (1 << k) < N]
    return pts + [N]


def cmd_analyze(args) -> int:
    notion = _NOTIONS.get(args.notion)
    if notion is None:
        raise UsageError(f"unknown notion {args.notion!r}; choose from {sorted(_NOTIONS)}")
    p = as_param(args.p)
    source = _source(args.source)
    sched = _default_schedule(args.N)
    tol = args.tolerance
    if notion == "copeland":
        if args.r is None or args.modulus is None:
            raise UsageError("copeland requires --r and --n")
        if not 1 <= args.r <= args.modulus:
            raise UsageError(f"need 1 <= r <= n, got r={args.r}, n={args.modulus}")
        report = freq_copeland(source, args.r, args.modulus, sched, p, tol)
    elif notion == "postnikov":
        w = args.w or args.target
        if not w or "1" not in w or set(w) - {"0", "1"}:
            raise UsageError("postnikov requires --w, a binary word containing a 1")
        report = freq_postnikov(source, w, sched, p, tol)
    else:
        if not args.target or set(args.target) - {"0", "1"}:
            raise UsageError(f"{args.notion} requires --target <bits>")
        fn = {"word": freq_word, "block": freq_block, "caterpillar": freq_caterpillar}[notion]
        if notion == "caterpillar":
            sched = [N for N in sched if N >= len(args.target)]
        report = fn(source, args.target, sched, p, tol)
    _write(args, report.to_json() if args.format == "json" else report.to_csv())
    return EXIT_PASS if report.converged else EXIT_VERDICT


def cmd_generate(args) -> int:
    text = generate(_source(args.source), args.n)
    if len(text) < args.n:
        raise EOFError(f"source provides only {len(text)} of {args.n} symbols")
    _write(args, text)
    return EXIT_PASS


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="normality-lab",
                     description="Finite-state selection, Bernoulli measures and normality estimators.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt_default="csv"):
        sp.add_argument("--output", "-o", help="write to this file (atomically) instead of stdout")
        sp.add_argument("--format", choices=["csv", "json"], default=fmt_default)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("select", help="run a DFA selector over a source")
    sp.add_argument("--dfa", required=True)
    sp.add_argument("--source")
    sp.add_argument("--n", type=count, default=1 << 10)
    sp.add_argument("--from-state", type=int, default=None)
    sp.add_argument("--positions", action="store_true")
    common(sp, "csv")
    sp.set_defaults(func=cmd_select)

    sp = sub.add_parser("compose", help="product selector C with C[w] = B[A[w]]")
    sp.add_argument("first", metavar="A")
    sp.add_argument("second", metavar="B")
    common(sp, "json")
    sp.set_defaults(func=cmd_compose)

    sp = sub.add_parser("markov", help="induced Markov chain, period, stationary distribution")
    sp.add_argument("--dfa", required=True)
    sp.add_argument("--p", type=rational, default=Fraction(1, 2))
    sp.add_argument("--simulate", type=count, default=0, metavar="N")
    sp.add_argument("--start", type=int, default=0)
    common(sp, "json")
    sp.set_defaults(func=cmd_markov)

    sp = sub.add_parser("verify", help="exhaustive lemma checks")
    sp.add_argument("lemma", choices=["lemma1", "lemma2", "lemma3", "mainclaim", "partition"])
    sp.add_argument("--dfa")
    sp.add_argument("--strategy", help="suffix:<bits> or dfa:<file.json>")
    sp.add_argument("--catalog")
    sp.add_argument("--F", action="append",
                    help="words of F for lemma3, comma-separated or repeated ('e' is the empty word)")
    sp.add_argument("--p", type=rational, default=Fraction(1, 2))
    sp.add_argument("--eps", type=rational, default=Fraction(1, 4))
    sp.add_argument("--b", type=rational, default=None)
    sp.add_argument("--d", type=rational, default=None)
    sp.add_argument("--symbol", choices=["0", "1"], default="1")
    sp.add_argument("--n", type=int_range, default=[8, 12, 16])
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP)
    common(sp, "csv")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("analyze", help="normality estimators on a source prefix")
    sp.add_argument("--notion", required=True)
    sp.add_argument("--source", default="champernowne")
    sp.add_argument("--target")
    sp.add_argument("--w")
    sp.add_argument("--r", type=int)
    sp.add_argument("--n", dest="modulus", type=int)
    sp.add_argument("--N", type=count, default=1 << 16)
    sp.add_argument("--p", type=rational, default=Fraction(1, 2))
    sp.add_argument("--tolerance", type=float, default=0.05)
    common(sp, "csv")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("generate", help="print a prefix of a source")
    sp.add_argument("--source", required=True)
    sp.add_argument("--n", type=count, required=True)
    common(sp, "csv")
    sp.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "command", None) == "verify":
            # keep the caller's b for mainclaim; other lemmas need a concrete value
            args.b_explicit = args.b
            if args.b is None:
                args.b = Fraction(1, 4)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DfaFormatError, EnumerationCapError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, EOFError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
