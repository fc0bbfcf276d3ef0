"""Command line front end: simulate | fit | check | plot.

Every command is deterministic given its flags and --seed.  Exit codes:
0 success, 1 usage error, 2 data error, 3 check failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from . import harness, samplers, svgplot, theory, transforms
from .mechanism import PrivacyBudget, g_dppca
from .rng import RngStream

_SCORES_WARNING = ("WARNING: projected scores are computed from the raw rows "
                   "and are NOT differentially private; only the directions "
                   "carry the privacy guarantee")


class _UsageError(Exception):
    """Flag combinations argparse cannot express; exits 1 like any
    other usage problem."""


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here reserves 2
    for data errors, so remap usage problems to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="master seed (default 0)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads for grid cells (default 1)")
    common.add_argument("--out", default=None,
                        help="output path (default depends on the command)")

    parser = _Parser(prog="gdppca",
                     description="Differentially private robust PCA toolkit")
    sub = parser.add_subparsers(dest="command", metavar="command")

    sim = sub.add_parser("simulate", parents=[common],
                         help="run an experiment grid and write a CSV")
    sim.add_argument("--profile", choices=("desk", "paper"), default="desk",
                     help="figure preset scale (default desk)")
    sim.add_argument("--figure", type=int, choices=(1, 2, 3, 4, 5),
                     help="run a figure preset grid")
    sim.add_argument("--models", nargs="+", choices=samplers.MODEL_KINDS,
                     help="explicit grid: data models")
    sim.add_argument("--ns", nargs="+", type=int,
                     help="explicit grid: sample sizes")
    sim.add_argument("--ds", nargs="+", type=int,
                     help="explicit grid: dimensions")
    sim.add_argument("--eps", nargs="+", type=float,
                     help="explicit grid: privacy epsilons")
    sim.add_argument("--reps", type=int, help="explicit grid: repetitions")
    sim.add_argument("--delta", type=float, default=1e-5,
                     help="privacy delta for explicit grids (default 1e-5)")
    sim.add_argument("--m", type=int, default=2,
                     help="subspace rank for explicit grids (default 2)")
    sim.add_argument("--methods", nargs="+", choices=harness.METHODS,
                     default=list(harness.PRIVATE_METHODS),
                     help="explicit grid: estimators (default: the five "
                          "private ones)")
    sim.add_argument("--nsggd-iters", type=int, default=None,
                     help="override the NSGGD iteration count")
    sim.add_argument("--timings", action="store_true",
                     help="record wall-clock runtime_ms (breaks byte "
                          "determinism of the CSV)")
    sim.set_defaults(func=cmd_simulate)

    fit = sub.add_parser("fit", parents=[common],
                         help="fit private directions to a CSV of rows")
    fit.add_argument("input", help="numeric CSV, one observation per row "
                                   "(header auto-detected)")
    fit.add_argument("--g", choices=("sph", "wins"), default="sph",
                     help="spatial sign transform (default sph)")
    fit.add_argument("--radius", type=float, default=None,
                     help="winsorizing radius (default sqrt(d))")
    fit.add_argument("--m", type=int, default=2,
                     help="number of directions (default 2)")
    fit.add_argument("--eps", type=float, default=2.0,
                     help="privacy epsilon (default 2.0)")
    fit.add_argument("--delta", type=float, default=1e-4,
                     help="privacy delta (default 1e-4)")
    fit.add_argument("--emit-scores", action="store_true",
                     help="also write non-private projected scores")
    fit.set_defaults(func=cmd_fit)

    chk = sub.add_parser("check", parents=[common],
                         help="run the theory verification suite")
    chk.add_argument("--samples", type=int, default=200_000,
                     help="Monte Carlo draws per estimate (default 200000)")
    chk.add_argument("--swaps", type=int, default=200,
                     help="row swaps per sensitivity search (default 200)")
    chk.add_argument("--trials", type=int, default=160,
                     help="corruption attack trials (default 160)")
    chk.add_argument("--inject-bug", action="store_true",
                     help=argparse.SUPPRESS)
    chk.set_defaults(func=cmd_check)

    plot = sub.add_parser("plot", parents=[common],
                          help="render a harness CSV to an SVG chart")
    plot.add_argument("input", help="CSV written by simulate")
    plot.add_argument("--loss", choices=("sin_theta", "proj_frob"),
                      default=None,
                      help="loss column to plot (default: auto)")
    plot.set_defaults(func=cmd_plot)

    return parser


# ------------------------------------------------------------- simulate


def cmd_simulate(args):
    explicit = {
        "--models": args.models, "--ns": args.ns, "--ds": args.ds,
        "--eps": args.eps, "--reps": args.reps,
    }
    given = [flag for flag, value in explicit.items() if value is not None]
    if args.figure is not None and given:
        raise _UsageError(f"--figure cannot be combined with {', '.join(given)}")
    if args.figure is not None:
        grid = harness.figure_grid(
            args.figure, profile=args.profile, master_seed=args.seed,
            nsggd_iterations=args.nsggd_iters,
            record_timings=args.timings,
        )
    else:
        missing = [flag for flag, value in explicit.items() if value is None]
        if missing:
            raise _UsageError("explicit grids need --models --ns --ds --eps "
                              f"--reps (missing {', '.join(missing)}); or pass "
                              "--figure N for a preset")
        grid = harness.ExperimentGrid(
            models=args.models, sample_sizes=args.ns, dims=args.ds,
            methods=args.methods, epsilons=args.eps, delta=args.delta,
            m=args.m, repetitions=args.reps, master_seed=args.seed,
            nsggd_iterations=args.nsggd_iters,
            record_timings=args.timings,
        )
    out = args.out if args.out is not None else "results.csv"
    rows = harness.run_grid(grid, threads=args.threads)
    harness.write_csv(rows, out)
    print(harness.format_summary(harness.summarize(rows)))
    print(f"wrote {len(rows)} rows to {out}")
    return 0


# ------------------------------------------------------------------ fit


def _read_matrix_csv(path):
    """Parse a numeric CSV into an array, skipping one optional header row.

    The first non-blank record is treated as a header exactly when at
    least one of its cells does not parse as a float.
    """
    data = []
    width = None
    seen_first = False
    with open(path, "r", encoding="utf-8", newline="") as f:
        for lineno, rec in enumerate(csv.reader(f), start=1):
            if not rec or all(not cell.strip() for cell in rec):
                continue
            if not seen_first:
                seen_first = True
                try:
                    [float(cell) for cell in rec]
                except ValueError:
                    continue  # header row
            if width is None:
                width = len(rec)
            elif len(rec) != width:
                raise ValueError(f"{path}:{lineno}: expected {width} fields, "
                                 f"got {len(rec)}")
            vals = []
            for col, cell in enumerate(rec, start=1):
                try:
                    v = float(cell)
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: column {col}: could "
                                     f"not parse {cell!r} as a number") from None
                if not math.isfinite(v):
                    raise ValueError(f"{path}:{lineno}: column {col}: "
                                     f"non-finite value {cell!r}")
                vals.append(v)
            data.append(vals)
    if not data:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(data, dtype=float)


def _write_matrix_csv(path, mat, header, comment=None):
    with open(path, "w", encoding="utf-8", newline="") as f:
        if comment is not None:
            f.write(f"# {comment}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in mat:
            writer.writerow([repr(float(v)) for v in row])


def cmd_fit(args):
    if args.g == "sph" and args.radius is not None:
        raise _UsageError("--radius only applies to --g wins")
    out = args.out if args.out is not None else "directions.csv"
    x = _read_matrix_csv(args.input)
    n, d = x.shape
    if args.g == "wins":
        radius = math.sqrt(d) if args.radius is None else args.radius
        g = transforms.winsorized(radius)
    else:
        g = transforms.spherical()
    budget = PrivacyBudget(args.eps, args.delta)
    v = g_dppca(x, g, args.m, budget, RngStream(args.seed))
    header = [f"pc{j + 1}" for j in range(v.shape[1])]
    _write_matrix_csv(out, v, header)
    print(f"fit {n} rows in dimension {d}: wrote {v.shape[1]} private "
          f"directions to {out} (epsilon={args.eps:g}, "
          f"delta={args.delta:g}, transform={g.kind})")
    if args.emit_scores:
        scores_path = str(Path(out).with_suffix(".scores.csv"))
        scores = x @ v
        score_header = [f"score{j + 1}" for j in range(v.shape[1])]
        _write_matrix_csv(scores_path, scores, score_header,
                          comment=_SCORES_WARNING)
        print(f"gdppca: {_SCORES_WARNING}", file=sys.stderr)
        print(f"wrote projected scores to {scores_path}")
    return 0


# ---------------------------------------------------------------- check


def _check_line(lines, name, passed, detail):
    tag = "PASS" if passed else "FAIL"
    lines.append(f"{tag}  {name}: {detail}")
    print(lines[-1])
    return passed


def cmd_check(args):
    if args.swaps < 1 or args.trials < 1 or args.samples < 2:
        raise ValueError("--swaps and --trials must be >= 1, --samples >= 2")
    root = RngStream(args.seed)
    # the negative-control mode deflates the sensitivity constant the
    # noise calibration relies on; every search must then catch it
    scale = 0.1 if args.inject_bug else 1.0
    ok = True
    lines = []

    for n, d in ((20, 3), (50, 5)):
        for g in (transforms.spherical(), transforms.winsorized(math.sqrt(d))):
            label = g.kind if g.radius is None else f"{g.kind}(r={g.radius:g})"
            rep = theory.kendall_sensitivity_search(
                g, n, d, args.swaps, root.child("kendall-sens", n, d, g.kind))
            passed = rep.worst_deviation <= rep.bound * scale + 1e-10
            ok &= _check_line(
                lines, f"kendall sensitivity n={n} d={d} {label}", passed,
                f"worst {rep.worst_deviation:.6e} vs bound "
                f"{rep.bound * scale:.6e} ({rep.swaps} swaps)")

    rep = theory.ag_sensitivity_search(50, 5, args.swaps,
                                       root.child("ag-sens", 50, 5))
    passed = rep.worst_deviation <= rep.bound * scale + 1e-10
    ok &= _check_line(
        lines, "covariance sensitivity n=50 d=5", passed,
        f"worst {rep.worst_deviation:.6e} vs bound {rep.bound * scale:.6e} "
        f"({rep.swaps} swaps)")

    model = samplers.gaussian_model(samplers.benchmark_model(5))
    x = samplers.sample(model, 200, root.child("corrupt-data"))
    crep = theory.corruption_deviation_check(
        x, transforms.spherical(), 2, 0.05, args.trials,
        root.child("corrupt-trials"))
    ok &= _check_line(
        lines, "corruption deviation n=200 d=5 alpha=0.05", crep.passed,
        f"worst {crep.worst_deviation:.6e} vs bound {crep.bound:.6e} "
        f"({crep.trials} trials, worst attack {crep.worst_attack})")

    w = samplers.benchmark_model(5).eigenvalues()
    tele = root.child("phi-telescope")
    total = sum(theory.phi_sph(w, ell, args.samples, tele).value
                for ell in range(1, w.size + 1))
    passed = abs(total - 1.0) <= 1e-9
    ok &= _check_line(lines, "phi spherical telescoping d=5", passed,
                      f"sum over l of phi_l = {total!r} (target 1)")

    a, b = 4.0, 1.0
    target = math.sqrt(a) / (math.sqrt(a) + math.sqrt(b))
    est = theory.phi_sph([a, b], 1, args.samples, root.child("phi-d2"))
    tol = 3.0 * est.std_error
    passed = abs(est.value - target) <= tol
    ok &= _check_line(lines, "phi spherical d=2 closed form", passed,
                      f"estimate {est.value:.6f} vs exact {target:.6f} "
                      f"(3 SE = {tol:.2e}, {est.samples} draws)")

    for radius in (0.5, math.sqrt(5.0), 5.0 * math.sqrt(5.0)):
        sw = theory.winsorized_sandwich(
            w, 1, radius, samplers.GAUSSIAN, args.samples,
            root.child("sandwich", repr(radius)))
        passed = (sw.lower.value <= sw.wins.value + 1e-12
                  and sw.wins.value <= sw.upper.value + 1e-12)
        ok &= _check_line(
            lines, f"winsorized sandwich d=5 r={radius:g}", passed,
            f"lower {sw.lower.value:.6f} <= wins {sw.wins.value:.6f} <= "
            f"upper {sw.upper.value:.6f} (clip prob {sw.exceed_prob:.3f})")

    lines.append("all checks passed" if ok
                 else "CHECK FAILURE: at least one verification failed")
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            f.write("\n".join(lines) + "\n")
    if ok:
        print("all checks passed")
        return 0
    print("CHECK FAILURE: at least one verification failed", file=sys.stderr)
    return 3


# ----------------------------------------------------------------- plot


def cmd_plot(args):
    out = args.out
    if out is None:
        out = str(Path(args.input).with_suffix(".svg"))
    panels = svgplot.plot_csv(args.input, out, args.loss)
    print(f"wrote {panels} panel(s) to {out}")
    return 0


# ----------------------------------------------------------------- main


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        print("gdppca: error: a command is required "
              "(simulate | fit | check | plot)", file=sys.stderr)
        return 1
    if args.threads < 1:
        print("gdppca: error: --threads must be >= 1", file=sys.stderr)
        return 1
    if args.seed < 0 or args.seed > 2 ** 64 - 1:
        print("gdppca: error: --seed must fit in an unsigned 64-bit integer",
              file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"gdppca: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"gdppca: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
