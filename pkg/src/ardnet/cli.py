"""Command-line entry point: ``ardnet {estimate,simulate,benchmark}``.

Exit codes: 0 success, 1 usage error, 2 data or validation error, 3 numerical failure.
"""

import argparse
import os
import sys

import numpy as np

from . import benchmark, netgen, solver
from .errors import CsvParseError, InvalidInputError
from .io import format_matrix_csv, read_matrix_csv, write_matrix_csv

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

EMIT_FILES = {
    "probabilities": "m_star.csv",
    "adjacency": "g_star.csv",
    "traits": "w.csv",
    "ard": "y.csv",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_list(convert):
    def parse(text):
        try:
            return [convert(tok) for tok in text.split(",") if tok.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return parse


def build_parser():
    parser = _Parser(prog="ardnet", description="Recover link probabilities from aggregated relational data.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    est = sub.add_parser("estimate", help="estimate M from ARD and trait matrices")
    est.add_argument("--ard", required=True, help="K x N1 ARD counts (CSV)")
    est.add_argument("--traits", required=True, help="K x N2 trait indicators (CSV)")
    est.add_argument("--lambda", dest="lam", type=float, default=None,
                     help="penalty; defaults to 2(sqrt(N1)+sqrt(N2)+1)(sqrt(N2)+sqrt(K))")
    est.add_argument("--epsilon", type=float, default=1e-4)
    est.add_argument("--max-iter", type=int, default=5000)
    est.add_argument("--directed", action="store_true",
                     help="skip the symmetric/zero-diagonal/nonnegative projection")
    est.add_argument("--per-iter-projection", action="store_true")
    est.add_argument("--clamp-one", action="store_true", help="cap estimated probabilities at 1")
    est.add_argument("--shrinkage", choices=[s.value for s in solver.Shrinkage], default="scaled")
    est.add_argument("--out", help="output CSV for the estimate (default: standard output)")
    est.add_argument("--seed", type=int, default=None, help="accepted for symmetry; the estimator is deterministic")
    est.set_defaults(func=estimate_command)

    sim = sub.add_parser("simulate", help="simulate M*, G*, W and Y from a formation model")
    sim.add_argument("--model", required=True, type=str.lower, choices=["lsm", "rdp", "sbm"])
    sim.add_argument("--n", required=True, type=int)
    sim.add_argument("--seed", required=True, type=int)
    sim.add_argument("--k", type=int, default=None, help="number of traits (default: round(sqrt(n)))")
    sim.add_argument("--emit", choices=list(EMIT_FILES) + ["all"], default="all")
    sim.add_argument("--out-dir", default=".")
    sim.set_defaults(func=simulate_command)

    bench = sub.add_parser("benchmark", help="reproduce the effective-rank or MSE tables")
    bench.add_argument("--experiment", required=True, choices=benchmark.EXPERIMENTS)
    bench.add_argument("--models", type=_csv_list(lambda t: netgen.Model(t.strip().upper()).value),
                       default=["LSM", "RDP", "SBM"], help="comma-separated subset of lsm,rdp,sbm")
    bench.add_argument("--n", dest="ns", type=_csv_list(int), default=[50, 100],
                       help="comma-separated population sizes")
    bench.add_argument("--reps", type=int, default=500)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", help="write one JSON record per cell to this file")
    bench.add_argument("--parallel", type=int, default=1)
    bench.add_argument("--per-iter-projection", action="store_true")
    bench.add_argument("--shrinkage", choices=[s.value for s in solver.Shrinkage], default="scaled")
    bench.set_defaults(func=benchmark_command)
    return parser


def estimate_command(args):
    try:
        Y = read_matrix_csv(args.ard)
        W = read_matrix_csv(args.traits)
    except (OSError, CsvParseError) as exc:
        print(f"ardnet estimate: {exc}", file=sys.stderr)
        return EXIT_DATA
    if Y.shape[0] != W.shape[0] or Y.shape[1] > W.shape[1]:
        print(
            f"ardnet estimate: ARD matrix is {Y.shape[0]}x{Y.shape[1]} but trait matrix is "
            f"{W.shape[0]}x{W.shape[1]}; need the same K rows and N1 <= N2",
            file=sys.stderr,
        )
        return EXIT_DATA
    try:
        problem = solver.Problem(Y, W)
        config = solver.SolverConfig(
            lam=args.lam,
            epsilon=args.epsilon,
            max_iterations=args.max_iter,
            constraint_mode=(solver.ConstraintMode.UNCONSTRAINED if args.directed
                             else solver.ConstraintMode.UNDIRECTED),
            per_iteration_projection=args.per_iter_projection,
            clamp_upper_at_one=args.clamp_one,
            shrinkage=args.shrinkage,
        )
    except InvalidInputError as exc:
        print(f"ardnet estimate: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        result = solver.fit(problem, config)
    except (np.linalg.LinAlgError, FloatingPointError, InvalidInputError) as exc:
        print(f"ardnet estimate: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if not np.all(np.isfinite(result.estimate)):
        print("ardnet estimate: numerical failure: estimate is not finite", file=sys.stderr)
        return EXIT_NUMERIC

    summary = (
        f"iterations={result.iterations_used} converged={str(result.converged).lower()} "
        f"objective={result.final_objective:.10g} lambda={result.lam!r}"
    )
    if args.out:
        try:
            write_matrix_csv(result.estimate, args.out)
        except OSError as exc:
            print(f"ardnet estimate: {exc}", file=sys.stderr)
            return EXIT_DATA
        print(summary)
    else:
        sys.stdout.write(format_matrix_csv(result.estimate))
        print(summary, file=sys.stderr)
    return EXIT_OK


def simulate_command(args):
    try:
        spec = netgen.NetworkModelSpec(args.model, args.n)
        K = netgen.default_trait_count(args.n) if args.k is None else args.k
        M, G, W, Y = netgen.simulate_ard(spec, K, args.seed)
    except InvalidInputError as exc:
        print(f"ardnet simulate: {exc}", file=sys.stderr)
        return EXIT_DATA
    artifacts = {"probabilities": M, "adjacency": G, "traits": W, "ard": Y}
    wanted = list(EMIT_FILES) if args.emit == "all" else [args.emit]
    try:
        os.makedirs(args.out_dir, exist_ok=True)
        for key in wanted:
            write_matrix_csv(artifacts[key], os.path.join(args.out_dir, EMIT_FILES[key]))
    except OSError as exc:
        print(f"ardnet simulate: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def benchmark_command(args):
    if args.reps < 1 or args.parallel < 1 or not args.ns or any(n < 1 for n in args.ns):
        print("ardnet benchmark: --reps, --parallel and every --n must be positive", file=sys.stderr)
        return EXIT_USAGE
    options = None
    if args.experiment == "mse":
        options = {"per_iteration_projection": args.per_iter_projection, "shrinkage": args.shrinkage}
    records = benchmark.run_benchmark(
        args.experiment, args.models, args.ns, args.reps, args.seed, args.parallel, options
    )
    if args.out:
        with open(args.out, "w") as fh:
            for rec in records:
                fh.write(rec.to_json() + "\n")
    print(benchmark.render_table(records))
    for rec in records:
        if rec.nonconverged:
            print(f"warning: {rec.model} n={rec.n}: {rec.nonconverged}/{rec.reps} fits did not converge")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
