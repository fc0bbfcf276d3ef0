import subprocess
import sys

import numpy as np
import pytest

from gdppca import cli, harness


def run(argv):
    return cli.main(argv)


def write_rows_csv(path, rows=120, d=4, seed=5, header=True):
    gen = np.random.default_rng(seed)
    x = gen.standard_normal((rows, d)) @ np.diag(np.linspace(3.0, 0.5, d))
    with open(path, "w") as f:
        if header:
            f.write(",".join(f"v{j}" for j in range(d)) + "\n")
        for row in x:
            f.write(",".join(repr(float(v)) for v in row) + "\n")
    return x


# ------------------------------------------------------------- simulate


def test_simulate_explicit_grid(tmp_path, capsys):
    out = tmp_path / "res.csv"
    code = run(["simulate", "--models", "gaussian", "--ns", "40", "60",
                "--ds", "5", "--eps", "0.5", "--reps", "2",
                "--methods", "g_sph", "AG", "--out", str(out), "--seed", "0"])
    assert code == 0
    rows = harness.read_csv(out)
    assert len(rows) == 2 * 2 * 2
    assert {r.method for r in rows} == {"g_sph", "AG"}
    printed = capsys.readouterr().out
    assert "wrote 8 rows" in printed
    assert "g_sph" in printed  # summary table


def test_simulate_byte_deterministic(tmp_path):
    argv = ["simulate", "--models", "gaussian", "--ns", "40", "--ds", "5",
            "--eps", "1.0", "--reps", "2", "--methods", "g_sph",
            "--seed", "7"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(argv + ["--out", str(a)]) == 0
    assert run(argv + ["--out", str(b), "--threads", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_timings_column(tmp_path):
    base = ["simulate", "--models", "gaussian", "--ns", "40", "--ds", "5",
            "--eps", "1.0", "--reps", "1", "--methods", "g_sph", "--seed", "0"]
    plain, timed = tmp_path / "p.csv", tmp_path / "t.csv"
    run(base + ["--out", str(plain)])
    run(base + ["--out", str(timed), "--timings"])
    assert all(r.runtime_ms == 0.0 for r in harness.read_csv(plain))
    assert all(r.runtime_ms > 0.0 for r in harness.read_csv(timed))


def test_simulate_figure_preset_dispatch(tmp_path, monkeypatch):
    seen = {}
    tiny = harness.ExperimentGrid(
        models=("gaussian",), sample_sizes=(30,), dims=(5,),
        methods=("g_sph",), epsilons=(1.0,), delta=1e-5, repetitions=1)

    def fake(figure, profile="desk", master_seed=0, nsggd_iterations=None,
             record_timings=False):
        seen.update(figure=figure, profile=profile, master_seed=master_seed,
                    nsggd_iterations=nsggd_iterations)
        return tiny

    monkeypatch.setattr(cli.harness, "figure_grid", fake)
    out = tmp_path / "fig.csv"
    code = run(["simulate", "--figure", "3", "--profile", "paper",
                "--seed", "11", "--nsggd-iters", "500", "--out", str(out)])
    assert code == 0
    assert seen == {"figure": 3, "profile": "paper", "master_seed": 11,
                    "nsggd_iterations": 500}
    assert len(harness.read_csv(out)) == 1


def test_simulate_usage_errors(tmp_path):
    # figure combined with an explicit-grid flag
    assert run(["simulate", "--figure", "2", "--models", "gaussian"]) == 1
    # explicit grid with a missing flag
    assert run(["simulate", "--models", "gaussian", "--ns", "40"]) == 1
    # invalid grid values surface as data errors, not tracebacks
    assert run(["simulate", "--models", "gaussian", "--ns", "40", "--ds", "3",
                "--eps", "1.0", "--reps", "1",
                "--out", str(tmp_path / "x.csv")]) == 2  # d < 4


# ------------------------------------------------------------------ fit


def test_fit_writes_orthonormal_directions(tmp_path):
    src = tmp_path / "data.csv"
    write_rows_csv(src)
    out = tmp_path / "dirs.csv"
    code = run(["fit", str(src), "--g", "wins", "--m", "2",
                "--out", str(out), "--seed", "3"])
    assert code == 0
    mat = np.loadtxt(out, delimiter=",", skiprows=1)
    assert mat.shape == (4, 2)
    assert np.allclose(mat.T @ mat, np.eye(2), atol=1e-10)
    assert not (tmp_path / "dirs.scores.csv").exists()


def test_fit_header_detection(tmp_path):
    with_h, without_h = tmp_path / "h.csv", tmp_path / "n.csv"
    write_rows_csv(with_h, header=True)
    write_rows_csv(without_h, header=False)
    out_h, out_n = tmp_path / "dh.csv", tmp_path / "dn.csv"
    run(["fit", str(with_h), "--out", str(out_h), "--seed", "9"])
    run(["fit", str(without_h), "--out", str(out_n), "--seed", "9"])
    assert out_h.read_bytes() == out_n.read_bytes()


def test_fit_deterministic_and_radius_default(tmp_path):
    src = tmp_path / "data.csv"
    write_rows_csv(src, d=4)
    outs = [tmp_path / f"d{i}.csv" for i in range(3)]
    run(["fit", str(src), "--g", "wins", "--out", str(outs[0]), "--seed", "3"])
    run(["fit", str(src), "--g", "wins", "--out", str(outs[1]), "--seed", "3"])
    # default radius is sqrt(d); spelling it out changes nothing
    run(["fit", str(src), "--g", "wins", "--radius", "2.0",
         "--out", str(outs[2]), "--seed", "3"])
    assert outs[0].read_bytes() == outs[1].read_bytes() == outs[2].read_bytes()


def test_fit_scores_carry_warning(tmp_path, capsys):
    src = tmp_path / "data.csv"
    x = write_rows_csv(src)
    out = tmp_path / "dirs.csv"
    code = run(["fit", str(src), "--emit-scores", "--out", str(out),
                "--seed", "3"])
    assert code == 0
    scores_path = tmp_path / "dirs.scores.csv"
    first = scores_path.read_text().splitlines()[0]
    assert first.startswith("#") and "NOT differentially private" in first
    assert "NOT differentially private" in capsys.readouterr().err
    v = np.loadtxt(out, delimiter=",", skiprows=1)
    scores = np.loadtxt(scores_path, delimiter=",", skiprows=2)
    assert np.allclose(scores, x @ v, atol=1e-12)


def test_fit_data_errors(tmp_path):
    missing = tmp_path / "missing.csv"
    assert run(["fit", str(missing)]) == 2

    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1.0,2.0\n3.0,oops\n")
    assert run(["fit", str(bad)]) == 2

    ragged = tmp_path / "ragged.csv"
    ragged.write_text("1.0,2.0\n3.0\n")
    assert run(["fit", str(ragged)]) == 2

    inf = tmp_path / "inf.csv"
    inf.write_text("1.0,2.0\n3.0,inf\n")
    assert run(["fit", str(inf)]) == 2

    short = tmp_path / "short.csv"
    short.write_text("1.0,2.0\n")
    assert run(["fit", str(short)]) == 2  # one observation cannot be paired

    headeronly = tmp_path / "hdr.csv"
    headeronly.write_text("a,b\n")
    assert run(["fit", str(headeronly)]) == 2


def test_fit_error_messages_locate_the_cell(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1.0,2.0\n3.0,oops\n")
    run(["fit", str(bad)])
    err = capsys.readouterr().err
    assert "bad.csv:3" in err and "column 2" in err and "'oops'" in err


def test_fit_radius_with_spherical_is_usage_error(tmp_path):
    src = tmp_path / "data.csv"
    write_rows_csv(src)
    assert run(["fit", str(src), "--g", "sph", "--radius", "2.0"]) == 1


# ---------------------------------------------------------------- check


CHECK_FAST = ["check", "--samples", "2000", "--swaps", "40",
              "--trials", "20", "--seed", "0"]


def test_check_passes_and_prints_one_line_per_check(capsys):
    assert run(CHECK_FAST) == 0
    out = capsys.readouterr().out
    lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert len(lines) == 11
    assert all(l.startswith("PASS") for l in lines)
    assert "all checks passed" in out


def test_check_inject_bug_fails_with_exit_3(capsys):
    assert run(CHECK_FAST + ["--inject-bug"]) == 3
    captured = capsys.readouterr()
    fails = [l for l in captured.out.splitlines() if l.startswith("FAIL")]
    # every sensitivity search must catch the deflated constant
    assert len(fails) == 5
    assert "CHECK FAILURE" in captured.err


def test_check_deterministic(capsys):
    run(CHECK_FAST)
    first = capsys.readouterr().out
    run(CHECK_FAST)
    assert capsys.readouterr().out == first


def test_check_validates_sizes():
    assert run(["check", "--swaps", "0"]) == 2


def test_check_out_writes_report(tmp_path):
    report = tmp_path / "report.txt"
    assert run(CHECK_FAST + ["--out", str(report)]) == 0
    lines = report.read_text().splitlines()
    assert sum(l.startswith("PASS") for l in lines) == 11
    assert lines[-1] == "all checks passed"


# ----------------------------------------------------------------- plot


def test_plot_command_round_trip(tmp_path, capsys):
    out = tmp_path / "res.csv"
    run(["simulate", "--models", "gaussian", "--ns", "40", "60", "--ds", "5",
         "--eps", "0.5", "--reps", "2", "--methods", "g_sph",
         "--out", str(out), "--seed", "0"])
    svg = tmp_path / "res.svg"
    assert run(["plot", str(out), "--out", str(svg)]) == 0
    assert svg.read_text().startswith("<svg ")
    # default output path swaps the suffix
    assert run(["plot", str(out)]) == 0
    assert (tmp_path / "res.svg").exists()


def test_plot_data_errors(tmp_path):
    assert run(["plot", str(tmp_path / "missing.csv")]) == 2
    empty = tmp_path / "empty.csv"
    empty.write_text(",".join(harness.CSV_FIELDS) + "\n")
    assert run(["plot", str(empty)]) == 2
    assert not (tmp_path / "empty.svg").exists()


# ----------------------------------------------------------------- misc


def test_usage_exit_codes():
    assert run([]) == 1
    assert run(["simulate", "--threads", "0", "--models", "gaussian",
                "--ns", "40", "--ds", "5", "--eps", "1.0", "--reps", "1"]) == 1
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 1


def test_console_script_installed():
    proc = subprocess.run([sys.executable, "-m", "gdppca.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    for word in ("simulate", "fit", "check", "plot"):
        assert word in proc.stdout
