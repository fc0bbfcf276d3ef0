import hashlib
import math

import numpy as np
import pytest

from gdppca import harness
from gdppca.harness import ExperimentGrid, ResultRow


def small_grid(**overrides):
    base = dict(
        models=("gaussian",),
        sample_sizes=(60,),
        dims=(5,),
        methods=("g_sph", "AG"),
        epsilons=(1.0,),
        delta=1e-5,
        repetitions=3,
        master_seed=42,
    )
    base.update(overrides)
    return ExperimentGrid(**base)


# --------------------------------------------------------------- validation


def test_grid_validation():
    with pytest.raises(ValueError):
        small_grid(models=())
    with pytest.raises(ValueError):
        small_grid(models=("cauchy",))
    with pytest.raises(ValueError):
        small_grid(methods=("pca",))
    with pytest.raises(ValueError):
        small_grid(sample_sizes=(1,))
    with pytest.raises(ValueError):
        small_grid(dims=(3,))
    with pytest.raises(ValueError):
        small_grid(m=3)
    with pytest.raises(ValueError):
        small_grid(repetitions=0)
    with pytest.raises(ValueError):
        small_grid(epsilons=(math.inf,))  # private methods need a finite budget
    with pytest.raises(ValueError):
        small_grid(delta=0.0)
    with pytest.raises(ValueError):
        harness.run_grid(small_grid(), threads=0)


def test_nonprivate_grid_allows_inf_epsilon():
    grid = small_grid(methods=("kendall_sph", "paired_sph"),
                      epsilons=(math.inf,), delta=0.0)
    rows = harness.run_grid(grid)
    assert all(math.isinf(r.epsilon) and r.delta == 0.0 for r in rows)


# ------------------------------------------------------------- determinism


def test_rows_deterministic_and_thread_invariant():
    grid = small_grid()
    a = harness.run_grid(grid)
    b = harness.run_grid(grid)
    c = harness.run_grid(grid, threads=3)
    assert a == b == c


def test_sub_grid_reproduces_full_grid_rows():
    full = harness.run_grid(small_grid(sample_sizes=(60, 100),
                                       epsilons=(0.5, 2.0)))
    sub = harness.run_grid(small_grid(sample_sizes=(100,), epsilons=(2.0,)))
    wanted = [r for r in full if r.n == 100 and r.epsilon == 2.0]
    assert sub == wanted


def test_methods_share_dataset_within_repetition():
    # two non-private deterministic methods on the same data give rows that
    # are consistent across separate single-method runs
    both = harness.run_grid(small_grid(methods=("kendall_sph", "kendall_wins"),
                                       epsilons=(math.inf,), delta=0.0))
    solo = harness.run_grid(small_grid(methods=("kendall_wins",),
                                       epsilons=(math.inf,), delta=0.0))
    assert [r for r in both if r.method == "kendall_wins"] == solo


def test_seed_column_is_method_stream_id():
    rows = harness.run_grid(small_grid())
    seeds = {(r.method, r.repetition): r.seed for r in rows}
    assert len(set(seeds.values())) == len(seeds)  # all distinct
    again = harness.run_grid(small_grid())
    assert {(r.method, r.repetition): r.seed for r in again} == seeds


# --------------------------------------------------------------- semantics


def test_losses_in_range_and_runtime_zero():
    rows = harness.run_grid(small_grid(methods=harness.PRIVATE_METHODS,
                                       nsggd_iterations=100))
    for r in rows:
        assert 0.0 <= r.sin_theta <= 1.0
        assert 0.0 <= r.proj_frob <= math.sqrt(4.0) + 1e-12
        assert r.runtime_ms == 0.0


def test_record_timings_produces_positive_runtimes():
    rows = harness.run_grid(small_grid(record_timings=True))
    assert all(r.runtime_ms > 0.0 for r in rows)


def test_error_rows_do_not_abort():
    # n=6 is too small for SGPCA's pair split at d=5 to produce a usable
    # frame? use a method that must fail: NSGGD needs n>=4, AG needs
    # non-identical rows; force failure via m=2 > usable rank by passing
    # a dataset... instead: sample_sizes=2 makes SGPCA raise (n >= 4)
    grid = small_grid(methods=("g_sph", "SGPCA"), sample_sizes=(2,),
                      repetitions=2)
    rows = harness.run_grid(grid)
    sgpca_rows = [r for r in rows if r.method == "SGPCA"]
    g_rows = [r for r in rows if r.method == "g_sph"]
    assert all(r.notes.startswith("error: ValueError") for r in sgpca_rows)
    assert all(math.isnan(r.sin_theta) and math.isnan(r.proj_frob)
               for r in sgpca_rows)
    assert all(not math.isnan(r.sin_theta) for r in g_rows)


def test_nsggd_notes_record_schedule():
    rows = harness.run_grid(small_grid(methods=("NSGGD",),
                                       nsggd_iterations=50))
    assert all(r.notes.startswith("T=50;B=") and ";eta=" in r.notes
               for r in rows)


def test_canonical_row_order():
    rows = harness.run_grid(small_grid(sample_sizes=(100, 60),
                                       epsilons=(2.0, 0.5)))
    keys = [(r.model, r.method, r.n, r.d, r.epsilon, r.repetition, r.seed)
            for r in rows]
    assert keys == sorted(keys)


def test_loss_improves_with_huge_budget():
    tight = harness.run_grid(small_grid(methods=("g_sph",), sample_sizes=(500,),
                                        epsilons=(0.5,), repetitions=5))
    loose = harness.run_grid(small_grid(methods=("g_sph",), sample_sizes=(500,),
                                        epsilons=(1e6,), repetitions=5))
    mean = lambda rows: sum(r.sin_theta for r in rows) / len(rows)
    assert mean(loose) < mean(tight)


# ------------------------------------------------------------- paired toy


def test_paired_toy_single_pair_degenerate():
    # at n=2 both estimators see the single pair (x2 - x1), so per-rep
    # losses coincide exactly
    rows = harness.run_paired_toy(d=25, sizes=(2,), repetitions=3,
                                  master_seed=5)
    by = {(r.method, r.repetition): r for r in rows}
    for rep in range(3):
        assert by[("kendall_sph", rep)].proj_frob == by[("paired_sph", rep)].proj_frob
        assert by[("kendall_wins", rep)].proj_frob == by[("paired_wins", rep)].proj_frob


def test_paired_toy_u_statistic_wins_on_average():
    rows = harness.run_paired_toy(d=25, sizes=(500,), repetitions=30,
                                  master_seed=11, threads=4)
    s = {r.method: r for r in harness.summarize(rows)}
    assert s["kendall_sph"].frob_mean < s["paired_sph"].frob_mean
    assert s["kendall_wins"].frob_mean < s["paired_wins"].frob_mean


# ------------------------------------------------------------------ figures


def test_figure_grid_profiles():
    desk = harness.figure_grid(3, "desk", master_seed=1)
    assert desk.models == ("student_t1",)
    assert desk.repetitions == 30
    assert desk.nsggd_iterations == harness.DESK_NSGGD_ITERATIONS
    assert max(desk.sample_sizes) <= 1000
    paper = harness.figure_grid(3, "paper", master_seed=1)
    assert paper.repetitions == 100
    assert paper.sample_sizes == (250, 500, 750, 1000, 1500, 2000)
    assert paper.nsggd_iterations is None
    toy = harness.figure_grid(1, "paper")
    assert toy.methods == ("kendall_sph", "kendall_wins", "paired_sph", "paired_wins")
    assert toy.repetitions == 1000
    sweep = harness.figure_grid(5, "desk")
    assert sweep.epsilons == (0.1, 0.25, 0.5, 1.0, 2.0, 4.0)
    assert set(sweep.models) == {"gaussian", "student_t1", "contaminated"}
    with pytest.raises(ValueError):
        harness.figure_grid(6)
    with pytest.raises(ValueError):
        harness.figure_grid(2, "laptop")


def test_figure_grid_iteration_override():
    grid = harness.figure_grid(2, "desk", nsggd_iterations=500)
    assert grid.nsggd_iterations == 500


# ---------------------------------------------------------------------- io


def test_csv_round_trip_and_bytes(tmp_path):
    rows = harness.run_grid(small_grid())
    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    harness.write_csv(rows, p1)
    harness.write_csv(harness.run_grid(small_grid()), p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert b"\r" not in p1.read_bytes()
    first = p1.read_text().splitlines()[0]
    assert first == "model,method,n,d,epsilon,delta,repetition,seed,sin_theta,proj_frob,runtime_ms,notes"
    assert harness.read_csv(p1) == rows


def test_csv_floats_round_trip_exactly(tmp_path):
    rows = harness.run_grid(small_grid())
    path = tmp_path / "x.csv"
    harness.write_csv(rows, path)
    back = harness.read_csv(path)
    for a, b in zip(rows, back):
        assert a.sin_theta == b.sin_theta
        assert a.proj_frob == b.proj_frob


def test_read_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("model,method\n")
    with pytest.raises(ValueError, match="header"):
        harness.read_csv(path)
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(ValueError, match="empty"):
        harness.read_csv(empty)


def test_read_csv_reports_location(tmp_path):
    path = tmp_path / "trunc.csv"
    path.write_text(",".join(harness.CSV_FIELDS) + "\ngaussian,AG,10\n")
    with pytest.raises(ValueError, match="trunc.csv:2"):
        harness.read_csv(path)


# ------------------------------------------------------------------ summary


def test_summarize_oracles():
    base = dict(model="gaussian", method="AG", n=10, d=5, epsilon=0.5,
                delta=1e-5, runtime_ms=0.0, notes="")
    rows = [ResultRow(repetition=0, seed=1, sin_theta=0.2, proj_frob=0.4, **base),
            ResultRow(repetition=1, seed=2, sin_theta=0.4, proj_frob=0.8, **base)]
    (s,) = harness.summarize(rows)
    assert s.sin_mean == pytest.approx(0.3)
    assert s.frob_mean == pytest.approx(0.6)
    assert s.sin_se == pytest.approx(np.std([0.2, 0.4], ddof=1) / np.sqrt(2))
    assert s.reps == 2 and s.errors == 0
    (t,) = harness.summarize(rows[:1])
    assert t.sin_mean == 0.2 and t.sin_se == 0.0


def test_summarize_keeps_methods_apart_and_counts_errors():
    base = dict(model="gaussian", n=10, d=5, epsilon=0.5, delta=1e-5,
                repetition=0, seed=1, runtime_ms=0.0)
    rows = [ResultRow(method="AG", sin_theta=0.2, proj_frob=0.4, notes="", **base),
            ResultRow(method="g_sph", sin_theta=0.1, proj_frob=0.2, notes="", **base),
            ResultRow(method="g_sph", sin_theta=float("nan"),
                      proj_frob=float("nan"), notes="error: X", **base)]
    summaries = harness.summarize(rows)
    assert [s.method for s in summaries] == ["AG", "g_sph"]
    g = summaries[1]
    assert g.reps == 1 and g.errors == 1
    assert g.sin_mean == 0.1
