"""Command-line interface: ``ctef fit|reduce|simulate|benchmark|cluster``.

Exit codes: 0 on success, 2 for unusable input (bad flags, malformed CSV,
invalid grid configuration), 3 when the solver fails.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import warnings

import numpy as np

from . import bench
from .clustering import cluster, total_residual
from .dataio import CsvFormatError, dump_json, fit_to_dict, read_matrix, write_matrix
from .datasim import SimSpec, simulate
from .exceptions import SolverError
from .fitting import DEFAULT_WEIGHT, fit, fit_reduced, select_subspace
from .svg import ellipse_outline, scatter_plot
from .trf import SolverOptions

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _columns(text):
    try:
        cols = [int(c) for c in text.split(",") if c.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("columns must be comma-separated integers") from None
    if not cols or min(cols) < 1:
        raise argparse.ArgumentTypeError("columns are 1-based positive integers")
    return cols


def _positive(kind):
    def parse(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"expected a positive value, got {text}")
        return v
    return parse


def _add_solver_flags(p):
    p.add_argument("--w", type=_positive(float), default=DEFAULT_WEIGHT,
                   help="center-box weight (default %(default)s)")
    p.add_argument("--gtol", type=_positive(float), default=1e-8)
    p.add_argument("--ftol", type=_positive(float), default=1e-8)
    p.add_argument("--xtol", type=_positive(float), default=1e-8)
    p.add_argument("--max-iter", type=_positive(int), default=500)


def _options(args):
    return SolverOptions(gtol=args.gtol, ftol=args.ftol, xtol=args.xtol, max_iter=args.max_iter)


def _emit(obj, out):
    text = dump_json(obj, out)
    if out is None:
        sys.stdout.write(text)


def cmd_fit(args):
    X = read_matrix(args.input)
    opts = _options(args)
    if args.dim is None and args.columns is None:
        result = fit(X, args.w, opts)
    else:
        k = args.dim if args.dim is not None else len(args.columns)
        cols = None if args.columns is None else [c - 1 for c in args.columns]
        result = fit_reduced(X, k, cols, args.w, opts)
    _emit(fit_to_dict(result), args.out)
    return EXIT_OK


def cmd_reduce(args):
    X = read_matrix(args.input)
    opts = _options(args)
    best, losses = select_subspace(X, args.dim, args.w, options=opts)
    result = fit_reduced(X, args.dim, best, args.w, opts)
    out = fit_to_dict(result)
    out["candidates"] = [{"columns": [c + 1 for c in cols], "loss": loss}
                         for cols, loss in losses.items()]
    _emit(out, args.out)
    return EXIT_OK


def cmd_simulate(args):
    spec = SimSpec(p=args.p, n=args.n, tau=args.tau, noise=args.noise, ratio=args.ratio,
                   seed=args.seed)
    X, truth = simulate(spec)
    if args.out is None:
        _write_stdout(X)
    else:
        write_matrix(args.out, X, header=[f"x{i + 1}" for i in range(spec.p)])
    truth_path = args.truth
    if truth_path is None and args.out is not None:
        truth_path = os.path.splitext(args.out)[0] + ".truth.json"
    if truth_path is not None:
        info = truth.to_dict()
        info.update(schema_version=1, p=spec.p, n=spec.n, tau=spec.tau, noise=spec.noise,
                    ratio=spec.ratio, seed=spec.seed)
        dump_json(info, truth_path)
    return EXIT_OK


def _write_stdout(X):
    for row in X:
        sys.stdout.write(",".join(repr(float(v)) for v in row) + "\n")


def cmd_benchmark(args):
    if args.preset is not None:
        cfg = dict(bench.PRESETS[args.preset])
        grid = bench.ExperimentGrid.from_dict(cfg)
    elif args.config is not None:
        grid = bench.load_grid(args.config)
    else:
        raise ValueError("give a config file or --preset")
    if args.trials is not None:
        grid = bench.ExperimentGrid(grid.vary, grid.values, grid.weights, args.trials,
                                    grid.seed, grid.base, grid.thresholds)
    paths = bench.run_benchmark(grid, args.out_dir, workers=args.workers)
    for key in ("trials", "timings", "summary"):
        print(paths[key])
    for path in paths["plots"]:
        print(path)
    return EXIT_OK


def cmd_cluster(args):
    X = read_matrix(args.input)
    rng = np.random.default_rng(args.seed)
    state = cluster(X, args.k, n_steps=args.steps, w=args.w, rng=rng, options=_options(args),
                    init=args.init, n_init=args.n_init)
    os.makedirs(args.out_dir, exist_ok=True)
    with open(os.path.join(args.out_dir, "assignments.csv"), "w") as fh:
        fh.write("point,cluster\n")
        for i, lab in enumerate(state.labels):
            fh.write(f"{i},{int(lab)}\n")
    info = {
        "schema_version": 1,
        "n_clusters": args.k,
        "steps": state.steps,
        "converged": state.converged,
        "total_residual": total_residual(X, state.fits),
        "clusters": [None if f is None else dict(fit_to_dict(f), size=int(np.sum(state.labels == j)))
                     for j, f in enumerate(state.fits)],
    }
    dump_json(info, os.path.join(args.out_dir, "ellipsoids.json"))
    if X.shape[1] == 2:
        outlines = [ellipse_outline(f.center, f.rotation, f.axis_lengths)
                    for f in state.fits if f is not None]
        svg = scatter_plot(X, state.labels, outlines, title=f"{args.k} ellipse clusters")
        with open(os.path.join(args.out_dir, "clusters.svg"), "w") as fh:
            fh.write(svg)
    print(os.path.join(args.out_dir, "ellipsoids.json"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ctef", description="Cayley-transform ellipsoid fitting")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit an ellipsoid to a CSV of points")
    p.add_argument("input")
    p.add_argument("--dim", type=_positive(int), help="fit in a k-dimensional PCA subspace")
    p.add_argument("--columns", type=_columns,
                   help="1-based principal components for --dim, e.g. 1,3")
    p.add_argument("--out", help="JSON output path (default stdout)")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("reduce", help="pick the PCA subspace with the lowest loss")
    p.add_argument("input")
    p.add_argument("--dim", type=_positive(int), required=True)
    p.add_argument("--out")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("simulate", help="draw data from the Ellipsoid-Gaussian model")
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--n", type=int, default=18)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--noise", type=float, default=0.01)
    p.add_argument("--ratio", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="data CSV (default stdout)")
    p.add_argument("--truth", help="ground-truth JSON (default next to --out)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("benchmark", help="run a simulation grid")
    p.add_argument("config", nargs="?", help="JSON grid configuration")
    p.add_argument("--preset", choices=sorted(bench.PRESETS))
    p.add_argument("--out-dir", default="bench_out")
    p.add_argument("--trials", type=_positive(int), help="override trials per value")
    p.add_argument("--workers", type=_positive(int), default=1)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("cluster", help="cluster points around several ellipsoids")
    p.add_argument("input")
    p.add_argument("--k", type=_positive(int), required=True)
    p.add_argument("--steps", type=_positive(int), default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", choices=("kmeans", "random"), default="kmeans")
    p.add_argument("--n-init", type=_positive(int), default=1)
    p.add_argument("--out-dir", default="cluster_out")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_cluster)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if not args.verbose:
        warnings.simplefilter("ignore")
    try:
        return args.func(args)
    except SolverError as exc:
        print(f"ctef: solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (CsvFormatError, ValueError, OSError) as exc:
        print(f"ctef: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
