"""Simulation harness: seeded grids of private and non-private PCA runs.

A grid is a cross product of data models, sample sizes, dimensions and
privacy levels.  Every (cell, repetition) samples one dataset from the
two-spiked benchmark covariance and hands the same data to each method;
every dataset and every method invocation draws from its own counter
stream derived from the master seed, so any sub-grid reproduces the
exact rows of the full run and thread scheduling cannot change values.

Losses are measured against the true spike frame: the sine of the
largest principal angle and the Frobenius distance of the projectors.
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import competitors, kendall, linalg, samplers, transforms
from .mechanism import PrivacyBudget, g_dppca
from .rng import RngStream

_MODEL_KINDS = (samplers.GAUSSIAN, samplers.STUDENT_T1, samplers.CONTAMINATED)

PRIVATE_METHODS = ("g_sph", "g_wins", "AG", "SGPCA", "NSGGD")
NON_PRIVATE_METHODS = ("paired_sph", "paired_wins", "kendall_sph", "kendall_wins")
METHODS = PRIVATE_METHODS + NON_PRIVATE_METHODS

CSV_FIELDS = ("model", "method", "n", "d", "epsilon", "delta", "repetition",
              "seed", "sin_theta", "proj_frob", "runtime_ms", "notes")


@dataclass(frozen=True)
class ExperimentGrid:
    models: tuple[str, ...]
    sample_sizes: tuple[int, ...]
    dims: tuple[int, ...]
    methods: tuple[str, ...]
    epsilons: tuple[float, ...]
    delta: float
    m: int = 2
    repetitions: int = 30
    master_seed: int = 0
    nsggd_iterations: int | None = None
    record_timings: bool = False

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        for name, seq in (("models", self.models), ("sample_sizes", self.sample_sizes),
                          ("dims", self.dims), ("methods", self.methods),
                          ("epsilons", self.epsilons)):
            if not seq:
                raise ValueError(f"{name} must be nonempty")
        for kind in self.models:
            if kind not in _MODEL_KINDS:
                raise ValueError(f"unknown model kind {kind!r}; choose from {_MODEL_KINDS}")
        for method in self.methods:
            if method not in METHODS:
                raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
        for n in self.sample_sizes:
            if n < 2:
                raise ValueError(f"sample sizes must be >= 2, got {n}")
        for d in self.dims:
            if d < 4:
                raise ValueError(f"dims must be >= 4 (spiked model), got {d}")
        if self.m not in (1, 2):
            raise ValueError(f"losses are defined against the rank-2 spike; m must be 1 or 2, got {self.m}")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        needs_budget = any(method in PRIVATE_METHODS for method in self.methods)
        for eps in self.epsilons:
            if needs_budget and not (math.isfinite(eps) and eps > 0):
                raise ValueError(f"private methods need finite positive epsilon, got {eps}")
            if not needs_budget and not (eps > 0):
                raise ValueError(f"epsilon must be positive, got {eps}")
        if needs_budget:
            if not 0 < self.delta < 1:
                raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        elif not 0 <= self.delta < 1:
            raise ValueError(f"delta must be in [0, 1), got {self.delta}")
        if self.nsggd_iterations is not None and self.nsggd_iterations < 0:
            raise ValueError(f"nsggd_iterations must be >= 0, got {self.nsggd_iterations}")


@dataclass(frozen=True)
class ResultRow:
    model: str
    method: str
    n: int
    d: int
    epsilon: float
    delta: float
    repetition: int
    seed: int
    sin_theta: float
    proj_frob: float
    runtime_ms: float
    notes: str


def _model_for(kind, d):
    spike = samplers.benchmark_model(d)
    if kind == samplers.GAUSSIAN:
        return samplers.gaussian_model(spike)
    if kind == samplers.STUDENT_T1:
        return samplers.student_t1_model(spike)
    return samplers.contaminated_model(spike)


def _run_method(method, x, n, d, m, budget, nsggd_iterations, rng):
    """Dispatch one estimator; returns (frame, notes)."""
    if method == "g_sph":
        return g_dppca(x, transforms.spherical(), m, budget, rng), ""
    if method == "g_wins":
        radius = math.sqrt(d)
        v = g_dppca(x, transforms.winsorized(radius), m, budget, rng)
        return v, f"radius={radius!r}"
    if method == "AG":
        return competitors.analyze_gauss(x, m, budget, rng), ""
    if method == "SGPCA":
        lam1, lam_d = 10.0, 1.0  # true spectrum of the benchmark spike
        ds = competitors.sgpca_sensitivity(lam1, lam_d, d, n, m)
        cfg = competitors.SgpcaConfig(delta_sens=ds, rank=m)
        v = competitors.sgpca(x, m, budget, cfg, rng)
        return v, f"delta_sens={ds!r};dp=approximate;spectrum=known"
    if method == "NSGGD":
        cfg = competitors.nsggd_defaults(n, budget, iterations=nsggd_iterations)
        v = competitors.nsggd(x, m, budget, cfg, rng)
        eta = float(cfg.learning_rates[0]) if cfg.iterations else 0.0
        return v, f"T={cfg.iterations};B={cfg.batch_size};eta={eta!r}"
    if method == "paired_sph":
        k = kendall.kendall_paired(x, transforms.spherical())
    elif method == "paired_wins":
        k = kendall.kendall_paired(x, transforms.winsorized(math.sqrt(d)))
    elif method == "kendall_sph":
        k = kendall.kendall_u(x, transforms.spherical())
    else:  # kendall_wins
        k = kendall.kendall_u(x, transforms.winsorized(math.sqrt(d)))
    notes = "" if method.endswith("_sph") else f"radius={math.sqrt(d)!r}"
    return linalg.top_m(linalg.eigh(k), m), notes


def _run_cell_rep(grid, root, kind, n, d, eps, rep):
    eps_key = repr(float(eps))
    model = _model_for(kind, d)
    truth = model.spike.spike_frame()[:, : grid.m]
    x = samplers.sample(model, n, root.child("data", kind, n, d, eps_key, rep))
    budget = PrivacyBudget(eps, grid.delta) if math.isfinite(eps) else None
    rows = []
    for method in grid.methods:
        rng = root.child("method", kind, n, d, eps_key, rep, method)
        non_private = method in NON_PRIVATE_METHODS
        t0 = time.perf_counter()
        try:
            v, notes = _run_method(method, x, n, d, grid.m, budget,
                                   grid.nsggd_iterations, rng)
            sin_loss = linalg.sin_theta(v, truth)
            frob_loss = linalg.proj_frob(v, truth)
        except Exception as exc:  # error rows, not aborts
            msg = " ".join(str(exc).split())
            sin_loss = frob_loss = float("nan")
            notes = f"error: {type(exc).__name__}: {msg}"
        runtime = (time.perf_counter() - t0) * 1e3 if grid.record_timings else 0.0
        rows.append(ResultRow(
            model=kind, method=method, n=n, d=d,
            epsilon=math.inf if non_private else float(eps),
            delta=0.0 if non_private else grid.delta,
            repetition=rep, seed=rng.stream_id,
            sin_theta=sin_loss, proj_frob=frob_loss,
            runtime_ms=runtime, notes=notes,
        ))
    return rows


def _row_key(row):
    return (row.model, row.method, row.n, row.d, row.epsilon, row.repetition, row.seed)


def run_grid(grid: ExperimentGrid, threads: int = 1):
    """Run every (cell, method, repetition) and return rows in canonical order."""
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    root = RngStream(grid.master_seed)
    tasks = [(kind, n, d, eps, rep)
             for kind in grid.models
             for n in grid.sample_sizes
             for d in grid.dims
             for eps in grid.epsilons
             for rep in range(grid.repetitions)]
    if threads == 1:
        chunks = [_run_cell_rep(grid, root, *task) for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda t: _run_cell_rep(grid, root, *t), tasks))
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=_row_key)
    return rows


def run_eps_sweep(grid: ExperimentGrid, threads: int = 1):
    """Privacy-level sweep; identical to run_grid, named for the use case."""
    return run_grid(grid, threads)


def paired_toy_grid(d=25, sizes=(250, 500, 1000), repetitions=200, master_seed=0):
    """Non-private estimator shootout: full U-statistic vs disjoint pairs."""
    return ExperimentGrid(
        models=(samplers.GAUSSIAN,),
        sample_sizes=tuple(sizes),
        dims=(d,),
        methods=("kendall_sph", "kendall_wins", "paired_sph", "paired_wins"),
        epsilons=(math.inf,),
        delta=0.0,
        repetitions=repetitions,
        master_seed=master_seed,
    )


def run_paired_toy(d=25, sizes=(250, 500, 1000), repetitions=200, master_seed=0,
                   threads=1):
    return run_grid(paired_toy_grid(d, sizes, repetitions, master_seed), threads)


# ------------------------------------------------------------------ figures

_FULL_SIZES = (250, 500, 750, 1000, 1500, 2000)
_DESK_SIZES = (250, 500, 1000)
_EPS_SWEEP = (0.1, 0.25, 0.5, 1.0, 2.0, 4.0)
_FIGURE_MODELS = {2: samplers.GAUSSIAN, 3: samplers.STUDENT_T1, 4: samplers.CONTAMINATED}

DESK_NSGGD_ITERATIONS = 20_000


def figure_grid(figure, profile="desk", master_seed=0, nsggd_iterations=None,
                record_timings=False):
    """Grid reproducing one benchmark figure.

    1: non-private U-statistic vs paired estimator, d=25, proj_frob loss;
    2/3/4: five private methods over (n, d) at (eps, delta) = (0.5, 1e-5)
    under gaussian / student_t1 / contaminated data; 5: the same methods
    over an epsilon sweep at fixed (n, d).  The desk profile shrinks
    sizes and repetitions and caps the NSGGD step count so a full figure
    runs in minutes; the paper profile keeps full scale (sizes to 2000,
    100 repetitions, uncapped steps).
    """
    if profile not in ("desk", "paper"):
        raise ValueError(f"profile must be 'desk' or 'paper', got {profile!r}")
    desk = profile == "desk"
    if figure == 1:
        return paired_toy_grid(
            d=25,
            sizes=_DESK_SIZES if desk else _FULL_SIZES,
            repetitions=50 if desk else 1000,
            master_seed=master_seed,
        )
    if figure in (2, 3, 4):
        return ExperimentGrid(
            models=(_FIGURE_MODELS[figure],),
            sample_sizes=_DESK_SIZES if desk else _FULL_SIZES,
            dims=(5, 10, 25),
            methods=PRIVATE_METHODS,
            epsilons=(0.5,),
            delta=1e-5,
            repetitions=30 if desk else 100,
            master_seed=master_seed,
            nsggd_iterations=(DESK_NSGGD_ITERATIONS if desk else None)
            if nsggd_iterations is None else nsggd_iterations,
            record_timings=record_timings,
        )
    if figure == 5:
        return ExperimentGrid(
            models=_MODEL_KINDS,
            sample_sizes=(1000,) if desk else (2000,),
            dims=(10,),
            methods=PRIVATE_METHODS,
            epsilons=_EPS_SWEEP,
            delta=1e-5,
            repetitions=30 if desk else 100,
            master_seed=master_seed,
            nsggd_iterations=(DESK_NSGGD_ITERATIONS if desk else None)
            if nsggd_iterations is None else nsggd_iterations,
            record_timings=record_timings,
        )
    raise ValueError(f"figure must be 1..5, got {figure}")


# ---------------------------------------------------------------------- io


def _format_value(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows, path):
    """Write rows in the canonical schema: UTF-8, LF, round-trip floats."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for row in rows:
            writer.writerow([_format_value(getattr(row, field)) for field in CSV_FIELDS])


def read_csv(path):
    """Parse a harness CSV back into ResultRow objects (header validated)."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, expected harness CSV header") from None
        if tuple(header) != CSV_FIELDS:
            raise ValueError(f"{path}: header {header!r} does not match the "
                             f"harness schema {','.join(CSV_FIELDS)!r}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(CSV_FIELDS):
                raise ValueError(f"{path}:{lineno}: expected {len(CSV_FIELDS)} "
                                 f"fields, got {len(rec)}")
            try:
                rows.append(ResultRow(
                    model=rec[0], method=rec[1], n=int(rec[2]), d=int(rec[3]),
                    epsilon=float(rec[4]), delta=float(rec[5]),
                    repetition=int(rec[6]), seed=int(rec[7]),
                    sin_theta=float(rec[8]), proj_frob=float(rec[9]),
                    runtime_ms=float(rec[10]), notes=rec[11],
                ))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return rows


# ------------------------------------------------------------------ summary


class SummaryRow(NamedTuple):
    model: str
    method: str
    n: int
    d: int
    epsilon: float
    reps: int
    errors: int
    sin_mean: float
    sin_se: float
    frob_mean: float
    frob_se: float


def summarize(rows):
    """Per-(model, method, n, d, epsilon) mean and standard error of losses."""
    groups: dict = {}
    for row in rows:
        groups.setdefault((row.model, row.method, row.n, row.d, row.epsilon),
                          []).append(row)
    out = []
    for key in sorted(groups):
        group = groups[key]
        ok = [r for r in group if not math.isnan(r.sin_theta)]
        sins = np.array([r.sin_theta for r in ok])
        frobs = np.array([r.proj_frob for r in ok])
        k = len(ok)
        out.append(SummaryRow(
            *key,
            reps=k,
            errors=len(group) - k,
            sin_mean=float(sins.mean()) if k else float("nan"),
            sin_se=float(sins.std(ddof=1) / math.sqrt(k)) if k > 1 else 0.0,
            frob_mean=float(frobs.mean()) if k else float("nan"),
            frob_se=float(frobs.std(ddof=1) / math.sqrt(k)) if k > 1 else 0.0,
        ))
    return out


def format_summary(summaries):
    header = (f"{'model':<12} {'method':<13} {'n':>5} {'d':>3} {'epsilon':>8} "
              f"{'reps':>5} {'err':>4} {'sin mean':>10} {'se':>9} "
              f"{'frob mean':>10} {'se':>9}")
    lines = [header, "-" * len(header)]
    for s in summaries:
        eps = "inf" if math.isinf(s.epsilon) else f"{s.epsilon:g}"
        lines.append(
            f"{s.model:<12} {s.method:<13} {s.n:>5} {s.d:>3} {eps:>8} "
            f"{s.reps:>5} {s.errors:>4} {s.sin_mean:>10.4f} {s.sin_se:>9.4f} "
            f"{s.frob_mean:>10.4f} {s.frob_se:>9.4f}")
    return "\n".join(lines)
