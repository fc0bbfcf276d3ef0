import math

import pytest

from gdppca import harness, svgplot
from gdppca.harness import ResultRow


def mkrow(**kw):
    base = dict(model="gaussian", method="g_sph", n=100, d=5, epsilon=0.5,
                delta=1e-5, repetition=0, seed=1, sin_theta=0.3,
                proj_frob=0.4, runtime_ms=0.0, notes="")
    base.update(kw)
    return ResultRow(**base)


def grid_rows(dims=(5, 10), ns=(100, 200), methods=("g_sph", "AG"), model="gaussian"):
    rows = []
    for d in dims:
        for n in ns:
            for method in methods:
                for rep in range(3):
                    rows.append(mkrow(model=model, method=method, n=n, d=d,
                                      sin_theta=0.1 * rep + n / 1000.0,
                                      proj_frob=0.2 * rep, repetition=rep,
                                      seed=rep + n + d))
    return rows


def test_render_is_deterministic():
    rows = grid_rows()
    assert svgplot.render_svg(rows) == svgplot.render_svg(rows)


def test_one_panel_per_model_dim_pair():
    svg = svgplot.render_svg(grid_rows(dims=(5, 10, 25)))
    assert svg.count('<rect x="') == 3
    for d in (5, 10, 25):
        assert f"gaussian, d={d}</text>" in svg


def test_panels_split_by_model_too():
    rows = grid_rows(dims=(10,), model="gaussian") + grid_rows(dims=(10,), model="student_t1")
    svg = svgplot.render_svg(rows)
    assert svg.count('<rect x="') == 2
    assert "student_t1, d=10</text>" in svg


def test_default_loss_sin_theta_for_private_rows():
    svg = svgplot.render_svg(grid_rows())
    assert ">sin_theta</text>" in svg
    assert ">n</text>" in svg


def test_default_loss_proj_frob_when_all_rows_non_private():
    rows = [mkrow(method="paired_sph", epsilon=math.inf, delta=0.0, n=n,
                  repetition=r, proj_frob=0.1 * r)
            for n in (50, 100) for r in range(3)]
    svg = svgplot.render_svg(rows)
    assert ">proj_frob</text>" in svg


def test_explicit_loss_override():
    svg = svgplot.render_svg(grid_rows(), loss="proj_frob")
    assert ">proj_frob</text>" in svg
    with pytest.raises(ValueError, match="loss"):
        svgplot.render_svg(grid_rows(), loss="mse")


def test_epsilon_sweep_uses_epsilon_axis_and_drops_inf_rows():
    rows = []
    for eps in (0.25, 1.0, 4.0):
        for rep in range(2):
            rows.append(mkrow(epsilon=eps, sin_theta=1.0 / (1.0 + eps),
                              repetition=rep))
    rows.append(mkrow(method="paired_sph", epsilon=math.inf, delta=0.0))
    svg = svgplot.render_svg(rows)
    assert ">epsilon</text>" in svg
    assert "paired_sph" not in svg


def test_empty_rows_raise():
    with pytest.raises(ValueError, match="no data rows"):
        svgplot.render_svg([])


def test_all_error_rows_raise():
    rows = [mkrow(sin_theta=float("nan"), proj_frob=float("nan"),
                  notes="error: ValueError: boom", repetition=r)
            for r in range(3)]
    with pytest.raises(ValueError, match="error row"):
        svgplot.render_svg(rows)


def test_plot_csv_round_trip_and_byte_identical(tmp_path):
    csv_path = tmp_path / "res.csv"
    harness.write_csv(grid_rows(), csv_path)
    out1 = tmp_path / "a.svg"
    out2 = tmp_path / "b.svg"
    assert svgplot.plot_csv(csv_path, out1) == 2
    svgplot.plot_csv(csv_path, out2)
    assert out1.read_bytes() == out2.read_bytes()
    text = out1.read_text()
    assert text.startswith("<svg ") and text.rstrip().endswith("</svg>")
    assert "\r" not in text


def test_plot_csv_header_only_errors_without_output(tmp_path):
    src = tmp_path / "empty.csv"
    src.write_text(",".join(harness.CSV_FIELDS) + "\n")
    out = tmp_path / "empty.svg"
    with pytest.raises(ValueError):
        svgplot.plot_csv(src, out)
    assert not out.exists()


def test_plot_csv_schema_mismatch(tmp_path):
    src = tmp_path / "bad.csv"
    src.write_text("x,y\n1,2\n")
    with pytest.raises(ValueError, match="does not match"):
        svgplot.plot_csv(src, tmp_path / "bad.svg")


def test_legend_and_colors_per_method():
    svg = svgplot.render_svg(grid_rows(methods=("g_sph", "g_wins", "NSGGD")))
    for method, color in (("g_sph", "#1f77b4"), ("g_wins", "#ff7f0e"),
                          ("NSGGD", "#9467bd")):
        assert f">{method}</text>" in svg
        assert color in svg


def test_single_point_lines_render():
    # one n value: degenerate x span still renders without dividing by zero
    svg = svgplot.render_svg(grid_rows(ns=(100,)))
    assert "<circle" in svg
