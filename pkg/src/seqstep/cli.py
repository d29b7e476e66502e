"""Command-line front end.

Subcommands: simulate (one experiment), sweep (a grid of n values to
CSV), verify (exhaustive oracle checks), exact (closed-form FDR by
enumeration), construct (print the periodic layout).

Exit codes: 0 on success, 1 on usage or parameter errors, 2 when a
verify run finds a violation. Output files are only written after a
run completes, so a failed run never leaves partial CSVs behind.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import __version__
from .construction import build_spec, derive_ab
from .montecarlo import (
    ExperimentConfig,
    default_grid,
    run_experiment,
    sweep_metadata,
    sweep_n,
    write_csv,
    write_metadata,
)
from .oracle import (
    check_cutoff_bound,
    check_cutoff_residues,
    check_threshold_equivalence,
    exact_fdr,
)
from .rational import RationalParseError, parse_rational
from .threshold import ProcedureParams, canonical_t

_ENV_THREADS = "SEQSTEP_THREADS"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; this tool reserves 2 for
    # verification failures, so usage problems must exit 1.
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _frac(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except RationalParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_rate_args(p: argparse.ArgumentParser, with_t: bool = True):
    p.add_argument("--alpha", type=_frac, required=True, help="FDR budget, p/q or decimal")
    p.add_argument(
        "--c", type=_frac, required=True, help="true-null target-win probability"
    )
    if with_t:
        g = p.add_mutually_exclusive_group()
        g.add_argument(
            "--t", type=_frac, default=None, help="additive constant in (0, 1]"
        )
        g.add_argument(
            "--u",
            type=int,
            default=None,
            help="integer shorthand: t = (b - u)/b with b from alpha and c",
        )


def _resolve_t(args, b: int) -> Fraction:
    if args.u is not None:
        if not 0 <= args.u <= b - 1:
            raise _UsageError(
                f"--u must lie in [0, {b - 1}] for b = {b} so t stays in (0, 1]"
            )
        return Fraction(b - args.u, b)
    if args.t is not None:
        return args.t
    return Fraction(1)


def _resolve_threads(args) -> int:
    if args.threads is not None:
        if args.threads < 0:
            raise _UsageError("--threads must be >= 0")
        return args.threads
    env = os.environ.get(_ENV_THREADS, "").strip()
    if env:
        try:
            val = int(env)
        except ValueError:
            raise _UsageError(f"{_ENV_THREADS} must be an integer, got {env!r}")
        if val < 0:
            raise _UsageError(f"{_ENV_THREADS} must be >= 0")
        return val
    return 0


def _build_params(args, t: Fraction) -> ProcedureParams:
    a, b = derive_ab(args.alpha, args.c)
    return ProcedureParams(alpha=args.alpha, c=args.c, t=t, a=a, b=b)


def _print_estimate(row_seed: int, params: ProcedureParams, est) -> None:
    print(f"n          = {est.n}")
    print(f"trials     = {est.n_trials}")
    print(f"alpha      = {params.alpha}")
    print(f"c          = {params.c}")
    print(f"t          = {params.t}")
    print(f"a/b        = {params.a}/{params.b}")
    print(f"mean_fdp   = {est.mean_fdp!r}")
    print(f"std_err    = {est.std_err!r}")
    print(f"ci_low     = {est.ci_low!r}")
    print(f"ci_high    = {est.ci_high!r}")
    print(f"p_hit_end  = {est.p_hit_end!r}")
    print(f"z_hat      = {est.z_hat!r}")
    print(f"mean_K     = {est.mean_cutoff!r}")
    print(f"seed       = {row_seed}")


def _cmd_simulate(args) -> int:
    a, b = derive_ab(args.alpha, args.c)
    t = _resolve_t(args, b)
    if args.canonicalize:
        t = canonical_t(t, b)
    params = _build_params(args, t)
    config = ExperimentConfig(
        params=params,
        spec=build_spec(a, b, args.n),
        n_trials=args.trials,
        master_seed=args.seed,
        confidence_level=args.level,
        thread_hint=_resolve_threads(args),
    )
    _print_estimate(args.seed, params, run_experiment(config))
    return 0


def _cmd_sweep(args) -> int:
    a, b = derive_ab(args.alpha, args.c)
    t = _resolve_t(args, b)
    if args.canonicalize:
        t = canonical_t(t, b)
    params = _build_params(args, t)
    if args.grid:
        try:
            n_values = [int(s) for s in args.grid.split(",") if s.strip()]
        except ValueError:
            raise _UsageError(f"--grid must be comma-separated integers, got {args.grid!r}")
        if not n_values:
            raise _UsageError("--grid is empty")
    else:
        n_values = default_grid(params)
    bad = [n for n in n_values if n < 1]
    if bad:
        raise _UsageError(f"grid values must be positive, got {bad}")
    rows = sweep_n(
        params,
        n_values,
        n_trials=args.trials,
        master_seed=args.seed,
        confidence_level=args.level,
        thread_hint=_resolve_threads(args),
    )
    # All computation is done; only now touch the filesystem.
    write_csv(args.out, rows)
    meta_path = args.metadata or (args.out + ".meta.json")
    write_metadata(
        meta_path,
        sweep_metadata(params, n_values, args.trials, args.seed, args.level),
    )
    print(f"wrote {len(rows)} rows to {args.out}")
    print(f"wrote metadata to {meta_path}")
    return 0


def _cmd_verify(args) -> int:
    a, b = derive_ab(args.alpha, args.c)
    failures = 0
    ran_any = False
    if args.equivalence is not None:
        ran_any = True
        params = _build_params(args, Fraction(1))
        rep = check_threshold_equivalence(params, args.equivalence)
        status = "ok" if rep.passed else "VIOLATION"
        print(
            f"threshold-equivalence (a={a}, b={b}, lengths<={args.equivalence}): "
            f"{rep.cases_checked} cases, {status}"
        )
        for v in rep.violations[:8]:
            print(f"  violation: {v}")
        failures += 0 if rep.passed else 1
    if args.u is not None:
        if args.n is None:
            raise _UsageError("--n is required with --u")
        ran_any = True
        for name, rep in (
            ("cutoff-bound", check_cutoff_bound(a, b, args.u, args.n)),
            ("cutoff-residues", check_cutoff_residues(a, b, args.u, args.n)),
        ):
            status = "ok" if rep.passed else "VIOLATION"
            print(
                f"{name} (a={a}, b={b}, u={args.u}, n={args.n}): "
                f"{rep.cases_checked} cases, {status}"
            )
            for v in rep.violations[:8]:
                print(f"  violation: {v}")
            for fl in rep.flags:
                print(f"  note: {fl}")
            failures += 0 if rep.passed else 1
    if not ran_any:
        raise _UsageError("nothing to verify: pass --equivalence N and/or --u U --n N")
    return 2 if failures else 0


def _cmd_exact(args) -> int:
    a, b = derive_ab(args.alpha, args.c)
    if not 0 <= args.u <= b - 1:
        raise _UsageError(f"--u must lie in [0, {b - 1}] for b = {b}")
    value = exact_fdr(a, b, args.u, args.n, args.c)
    print(f"exact_fdr  = {value.numerator}/{value.denominator}")
    print(f"          ~= {float(value)!r}")
    return 0


def _cmd_construct(args) -> int:
    a, b = derive_ab(args.alpha, args.c)
    spec = build_spec(a, b, args.n)
    print(spec.to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seqstep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"seqstep {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run one Monte Carlo experiment")
    _add_rate_args(p)
    p.add_argument("--n", type=int, required=True, help="number of hypotheses")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--level", type=_frac, default=Fraction(99, 100))
    p.add_argument("--threads", type=int, default=None)
    p.add_argument(
        "--canonicalize",
        action="store_true",
        help="replace t by ceil(t*b)/b before running",
    )
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="run a grid of n values and write CSV")
    _add_rate_args(p)
    p.add_argument(
        "--grid", default=None, help="comma-separated n values (default: 5..100 cycles)"
    )
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--level", type=_frac, default=Fraction(99, 100))
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--canonicalize", action="store_true")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--metadata", default=None, help="JSON metadata path")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("verify", help="exhaustive oracle checks (exit 2 on violation)")
    _add_rate_args(p, with_t=False)
    p.add_argument("--u", type=int, default=None, help="check cutoffs at t = (b - u)/b")
    p.add_argument("--n", type=int, default=None)
    p.add_argument(
        "--equivalence",
        type=int,
        default=None,
        metavar="N_MAX",
        help="exhaustive cutoff-equivalence check over lengths <= N_MAX",
    )
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("exact", help="exact FDR of the layout by enumeration")
    _add_rate_args(p, with_t=False)
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("construct", help="print the periodic layout as JSON")
    _add_rate_args(p, with_t=False)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_construct)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"seqstep: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
