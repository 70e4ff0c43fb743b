"""``mtc``: command-line access to Steiner values, Lambda, triple curvature and experiments.

Exit codes: 0 success, 2 invalid input, 3 solver failure.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys
from pathlib import Path

from joblib import effective_n_jobs

from .catk_lab import FAMILIES, CatExperimentSpec, verify_cat_bound, write_violations
from .config import DEFAULT_CONFIG, SolverConfig
from .exceptions import InvalidInputError, SolverError
from .metric_data import (enumerate_triples, format_float, load_distance_matrix, load_point_cloud,
                          write_report, write_rows)
from .sides import TripleSides
from .steiner import lambda_critical, s_value
from .suites import FIGURES, SUITES, run_suite
from .triple_curvature import curvature_report

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 2, 3

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("solver and output options (also MTC_<NAME> environment variables)")
    g.add_argument("--tol-newton", type=float, help="Newton residual tolerance (default 1e-12)")
    g.add_argument("--tol-bisect", type=float, help="bracketing root tolerance (default 1e-12)")
    g.add_argument("--tol-invert", type=float, help="curvature inversion tolerance (default 1e-9)")
    g.add_argument("--max-iter", type=int, help="Newton iteration cap (default 100)")
    g.add_argument("--seed", type=int, help="seed for sampling and generators (default 0)")
    g.add_argument("--out", help="write results to this path instead of standard output")
    g.add_argument("--threads", type=int, help="worker cap for batch work (default: all cores)")
    g.add_argument("-v", "--verbose", action="store_true", help="log solver diagnostics to stderr")
    return p


def _sides(p):
    p.add_argument("a", type=float)
    p.add_argument("b", type=float)
    p.add_argument("c", type=float)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="mtc", description="Curvature of metric triples.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("steiner", parents=[common], help="Steiner minimum S(a,b,c,k)",
                       description="Least total distance from a point of M_k to a triangle with sides a, b, c.")
    _sides(p)
    p.add_argument("--k", type=float, default=0.0, help="curvature of the model surface (default 0)")
    p.add_argument("--details", action="store_true", help="also print minimiser kind, legs and residual")

    p = sub.add_parser("lambda", parents=[common], help="critical curvature Lambda(a,b,c)",
                       description="Curvature at which the Steiner minimum moves to the vertex.")
    _sides(p)

    p = sub.add_parser("curvature", parents=[common], help="triple curvatures of a data set",
                       description="Per-triple g, Lambda and k_X as CSV (i,j,l,a,b,c,g,lambda,k,status).")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", help="distance matrix CSV")
    src.add_argument("--points", help="point cloud CSV with an '# ambient:' header")
    sel = p.add_mutually_exclusive_group()
    sel.add_argument("--all", action="store_true", help="every triple (default)")
    sel.add_argument("--sample", type=int, metavar="N", help="N seeded random triples")
    p.add_argument("--continuum", action="store_true",
                   help="minimise over the whole model surface (point clouds only)")

    p = sub.add_parser("experiment", parents=[common], help="verify k_X(T) <= k on a synthetic space",
                       description="Generate a seeded CAT(k) sample and report triples with k_X > k + 1e-4. "
                                   "The summary goes to stdout; --out receives the violation CSV.")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--n", type=int, default=40, help="number of points (default 40)")
    p.add_argument("--mode", choices=("continuum", "discrete"), default=None,
                   help="default: continuum, or discrete for unit_discrete")

    p = sub.add_parser("figures", parents=[common], help="emit figure data grids as CSV",
                       description="Figure 1: (c, Lambda(1,1.2,c)); figure 2: (t, s, S on the unit sphere); "
                                   "figure 3: (k, S(1,1.2,1.3,k)).  Without --which, --out names a directory "
                                   "receiving figure1.csv .. figure3.csv.")
    p.add_argument("--which", type=int, choices=sorted(FIGURES))

    p = sub.add_parser("suite", parents=[common], help="run a named check suite",
                       description="Print one PASS/FAIL line per check; exit 0 iff all pass.")
    p.add_argument("name", choices=SUITES)
    return parser


def _config(args) -> SolverConfig:
    try:
        base = SolverConfig.from_env(os.environ, DEFAULT_CONFIG)
        return base.updated(tol_newton=args.tol_newton, tol_bisect=args.tol_bisect,
                            tol_invert=args.tol_invert, max_iter=args.max_iter)
    except ValueError as exc:
        raise InvalidInputError(str(exc)) from None


def _env_int(name, value, default):
    if value is not None:
        return value
    raw = os.environ.get("MTC_" + name.upper())
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise InvalidInputError(f"MTC_{name.upper()}={raw!r} is not an integer") from None
    return default


@contextlib.contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _cmd_steiner(args, config, out):
    ev = s_value(TripleSides(args.a, args.b, args.c), args.k, config)
    print(format_float(ev.value), file=out)
    if args.details:
        legs = "" if ev.legs is None else " ".join(format_float(v) for v in ev.legs)
        print(f"minimizer={ev.minimizer_kind} legs={legs} residual={ev.residual!r}", file=out)
    return EXIT_OK


def _cmd_lambda(args, config, out):
    print(format_float(lambda_critical(TripleSides(args.a, args.b, args.c), config)), file=out)
    return EXIT_OK


def _cmd_curvature(args, config, out, seed, threads):
    space = load_distance_matrix(args.matrix) if args.matrix else load_point_cloud(args.points)
    if args.sample is not None:
        triples = enumerate_triples(space, "sample", args.sample, seed)
    else:
        triples = enumerate_triples(space, "all")
    mode = "continuum" if args.continuum else "discrete"
    reports = curvature_report(space, triples, mode, config, n_jobs=threads)
    write_report(reports, out)
    failed = [r for r in reports if r.is_error]
    for r in failed:
        print(f"triple {r.triple.indices}: {r.message}", file=sys.stderr)
    return EXIT_SOLVER if failed else EXIT_OK


def _cmd_experiment(args, config, seed, threads):
    mode = args.mode or ("discrete" if args.family == "unit_discrete" else "continuum")
    spec = CatExperimentSpec(args.family, args.k, args.n, seed, mode)
    report = verify_cat_bound(spec, config, n_jobs=threads)
    print(report.summary())
    if args.out is not None:
        write_violations(report, args.out)
    return EXIT_SOLVER if report.errors else EXIT_OK


def _cmd_figures(args, config):
    which = [args.which] if args.which else sorted(FIGURES)
    if len(which) > 1:
        if args.out is None:
            raise InvalidInputError("--out DIR is required when emitting all figures")
        Path(args.out).mkdir(parents=True, exist_ok=True)
    for w in which:
        header, make = FIGURES[w]
        rows = ([format_float(v) for v in row] for row in make(config=config))
        target = args.out if len(which) == 1 else os.path.join(args.out, f"figure{w}.csv")
        write_rows(header, rows, target if target is not None else sys.stdout)
    return EXIT_OK


def run(argv=None) -> int:
    """Parse ``argv`` and execute; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = _config(args)
        seed = _env_int("seed", args.seed, 0)
        threads = _env_int("threads", args.threads, -1)
        if threads == 0 or threads < -1:
            raise InvalidInputError(f"--threads must be a positive integer, got {threads}")
        threads = effective_n_jobs(threads)
        if args.command == "experiment":
            return _cmd_experiment(args, config, seed, threads)
        if args.command == "figures":
            return _cmd_figures(args, config)
        if args.command == "suite":
            return EXIT_OK if run_suite(args.name, seed, config) else EXIT_SOLVER
        with _sink(args.out) as out:
            if args.command == "steiner":
                return _cmd_steiner(args, config, out)
            if args.command == "lambda":
                return _cmd_lambda(args, config, out)
            return _cmd_curvature(args, config, out, seed, threads)
    except InvalidInputError as exc:
        print(f"mtc {args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverError as exc:
        print(f"mtc {args.command}: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"mtc {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
