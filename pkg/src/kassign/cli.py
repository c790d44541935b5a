"""Command-line entry point: ``kassign <command> [options]``.

Every command prints one JSON document on stdout.  Diagnostics go to
stderr.  Exit codes: 0 success, 2 malformed input, 3 domain error,
4 a conjectural identity failed in ``verify`` (a potential counterexample),
5 a proved identity failed in ``verify`` (an implementation bug).
"""

from __future__ import annotations

import argparse
import sys

from . import montecarlo as mc
from .arith import DEFAULT_PRIME, rational_to_mod
from .assignment import min_k_bruteforce, min_k_incremental
from .errors import KAssignError
from .expectation import expected_min_exact
from .formulas import FORMS
from .reduction import k_reduce, lambda_mu, vij_decompose
from .serialize import (
    MalformedInput,
    dumps,
    indices_out,
    loads,
    matrix_out,
    parse_cost_matrix,
    parse_rank_one,
    parse_rate_matrix,
    positions_out,
    scalar_out,
)
from .verify import SUITES, run_suite, summarize

EXIT_OK = 0
EXIT_MALFORMED = 2
EXIT_DOMAIN = 3
EXIT_CONJECTURE = 4
EXIT_BUG = 5


def _read_doc(value: str):
    """Inline JSON, ``@path`` for a file, or ``-`` for stdin."""
    if value == "-":
        text = sys.stdin.read()
    elif value.startswith("@"):
        try:
            with open(value[1:], encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise MalformedInput(f"cannot read {value[1:]}: {exc}") from exc
    else:
        text = value
    return loads(text)


def _cmd_solve(args):
    X = parse_cost_matrix(_read_doc(args.matrix))
    value, minimizers = min_k_bruteforce(X, args.k)
    flag = min_k_incremental(X, args.k)
    return {
        "k": args.k,
        "value": scalar_out(value),
        "minimizers": [positions_out(s) for s in minimizers],
        "flag": {
            "rows": [i + 1 for i in flag.rows],
            "cols": [j + 1 for j in flag.cols],
            "values": [scalar_out(v) for v in flag.values],
        },
    }


def _cmd_reduce(args):
    X = parse_cost_matrix(_read_doc(args.matrix))
    Y, removed = k_reduce(X, args.k)
    pot = lambda_mu(Y, args.k)
    _, minimizers = min_k_bruteforce(Y, args.k)
    gens = vij_decompose(Y, args.k, minimizers[0])
    return {
        "k": args.k,
        "reduced": matrix_out(Y),
        "removed": [{"cell": [i + 1, j + 1], "amount": scalar_out(a)}
                    for (i, j), a in sorted(removed.items())],
        "lambda": [scalar_out(x) for x in pot.lam],
        "mu": [scalar_out(x) for x in pot.mu],
        "generators": [{"rows": indices_out(g.rows), "cols": indices_out(g.cols),
                        "coefficient": scalar_out(g.coefficient)} for g in gens],
    }


def _cmd_formula(args):
    r, c = parse_rank_one(_read_doc(args.rates))
    value = FORMS[args.form](args.k, r, c)
    return {"k": args.k, "form": args.form, "value": scalar_out(value)}


def _cmd_exact(args):
    A = parse_rate_matrix(_read_doc(args.matrix))
    if args.mod_p is None:
        return {"k": args.k, "value": scalar_out(expected_min_exact(A, args.k))}
    p = args.mod_p
    Am = [[rational_to_mod(a, p) for a in row] for row in A]
    return {"k": args.k, "prime": str(p), "residue": scalar_out(expected_min_exact(Am, args.k))}


def _cmd_simulate(args):
    cfg = mc.SampleConfig(seed=args.seed, samples=args.samples, chunks=args.chunks,
                          threads=args.threads)
    if args.mode in ("flags", "contribution"):
        if args.rates is None:
            raise MalformedInput(f"--mode {args.mode} needs --rates")
        r, c = parse_rank_one(_read_doc(args.rates))
        if args.mode == "flags":
            rep = mc.estimate_flag_probs(r, c, args.k, cfg)
        else:
            rep = mc.estimate_contribution(r, c, args.k, cfg)
    else:
        source = args.matrix if args.matrix is not None else args.rates
        if source is None:
            raise MalformedInput("simulate needs --matrix or --rates")
        A = parse_rate_matrix(_read_doc(source))
        if args.mode == "emin":
            rep = mc.estimate_e_min(A, args.k, cfg)
        else:
            rep = mc.collapsed_rate_check(A, args.k, cfg)
    out = {"mode": args.mode, "k": args.k, "seed": args.seed, "samples": args.samples,
           "chunks": args.chunks, "evidence_only": True, "passed": rep.passed}
    out["report"] = rep.to_json()
    return out


def _cmd_verify(args):
    reports = []
    for name in args.suite:
        reports.extend(run_suite(name, args.trials, args.prime, args.seed, args.mode))
    summary = summarize(reports)
    return {"suites": args.suite, "seed": args.seed, "summary": summary, "reports": reports}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kassign", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="minimum k-assignment of a cost matrix")
    p.add_argument("--matrix", required=True, help="CostMatrix JSON, @file or -")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("reduce", help="k-reduce a matrix and decompose it")
    p.add_argument("--matrix", required=True, help="CostMatrix JSON, @file or -")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("formula", help="closed-form expected minimum for rank-1 rates")
    p.add_argument("--rates", required=True, help='{"r": [...], "c": [...]}, @file or -')
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--form", choices=sorted(FORMS), default="main")
    p.set_defaults(func=_cmd_formula)

    p = sub.add_parser("exact", help="exact expected minimum of a k x k rate matrix")
    p.add_argument("--matrix", required=True, help="RateMatrix or rank-1 rates JSON, @file or -")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mod-p", type=int, nargs="?", const=DEFAULT_PRIME, default=None,
                   metavar="P", help=f"compute the residue mod P (default P = {DEFAULT_PRIME})")
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("simulate", help="Monte Carlo estimates with z-scores")
    p.add_argument("--matrix", help="RateMatrix JSON, @file or -")
    p.add_argument("--rates", help="rank-1 rates JSON, @file or -")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=("emin", "flags", "contribution", "collapsed"),
                   default="emin")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--chunks", type=int, default=1)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify", help="random-point identity checks")
    p.add_argument("--suite", choices=SUITES, action="append",
                   help="repeatable; default runs every suite")
    p.add_argument("--trials", type=int, default=None, help="trials per check (suite default)")
    p.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    p.add_argument("--mode", choices=("rational", "modular"), default="rational")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1, help="accepted for symmetry; checks run serially")
    p.set_defaults(func=_cmd_verify)
    return parser


def dispatch(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "verify" and not args.suite:
        args.suite = list(SUITES)
    try:
        out = args.func(args)
    except MalformedInput as exc:
        print(f"kassign: malformed input: {exc}", file=stderr)
        return EXIT_MALFORMED
    except (KAssignError, ValueError) as exc:
        print(f"kassign: {exc}", file=stderr)
        return EXIT_DOMAIN
    stdout.write(dumps(out))
    if args.command == "verify":
        s = out["summary"]
        if s["proved_failures"]:
            print("kassign: a proved identity failed; this is an implementation bug", file=stderr)
            return EXIT_BUG
        if s["conjectural_mismatches"]:
            print("kassign: conjectural identity mismatch; witnesses are in the report",
                  file=stderr)
            return EXIT_CONJECTURE
    return EXIT_OK


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
