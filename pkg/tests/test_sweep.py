import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from levelcross.cli import main as cli_main
from levelcross.models import ModelKind
from levelcross.sweep import (CSV_HEADER, SweepConfig, compare_report,
                              preset_configs, rows_to_csv, rows_to_jsonl,
                              run_sweep, write_rows)


def lz_cfg(methods=("lz",), count=3, workers=1, **kw):
    return SweepConfig.from_range(ModelKind.LZ, "a", 0.5, 1.5, count,
                                  methods=methods, workers=workers, **kw)


def test_degenerate_two_point_grid():
    cfg = SweepConfig.from_range(ModelKind.LZ, "a", 0.5, 1.0, 2, methods=("lz",))
    rows = run_sweep(cfg)
    assert len(rows) == 2
    assert rows[0].p_lz == pytest.approx(math.exp(-math.pi * 0.25))
    assert rows[1].p_lz == pytest.approx(math.exp(-math.pi))
    assert rows[0].p_numeric is None


def test_rows_ordered_by_sweep_variable():
    rows = run_sweep(lz_cfg(count=5, workers=4))
    assert [r.a for r in rows] == sorted(r.a for r in rows)


def test_rel_diff_definition():
    cfg = lz_cfg(methods=("numeric", "ddp", "lz"), count=2)
    rows = run_sweep(cfg)
    for r in rows:
        assert r.rel_diff == pytest.approx(
            abs(r.p_numeric - r.p_ddp) / r.p_numeric
        )


def test_below_floor_rows_omit_numeric():
    cfg = SweepConfig.from_range(
        ModelKind.SUPERLINEAR, "a", 3.2, 3.4, 2, eps=0.25,
        methods=("numeric", "ddp"), workers=1,
    )
    rows = run_sweep(cfg)
    for r in rows:
        assert r.p_numeric is None
        assert "below-floor" in r.warnings


def test_deterministic_output_bytes(tmp_path):
    cfg = lz_cfg(methods=("numeric", "ddp", "lz"), count=3, workers=4)
    rows1 = run_sweep(cfg)
    rows2 = run_sweep(cfg)
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_rows(rows1, str(f1), "csv")
    write_rows(rows2, str(f2), "csv")
    assert f1.read_bytes() == f2.read_bytes()
    j1, j2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    write_rows(rows1, str(j1), "jsonl")
    write_rows(rows2, str(j2), "jsonl")
    assert j1.read_bytes() == j2.read_bytes()


def test_csv_header_and_shape():
    rows = run_sweep(lz_cfg(count=2))
    text = rows_to_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == 3
    assert all(len(line.split(",")) == 12 for line in lines[1:])


def test_jsonl_keys():
    rows = run_sweep(lz_cfg(count=2))
    rec = json.loads(rows_to_jsonl(rows).strip().split("\n")[0])
    assert list(rec) == [
        "model", "a", "eps_or_n", "p_numeric", "p_ddp", "ddp_branch",
        "p_lz", "p_asymptotic", "rel_diff", "tau_stop", "cross_order_gap",
        "warnings",
    ]


def test_compare_report_no_comparable_rows():
    rows = run_sweep(lz_cfg(methods=("lz",), count=2))
    report = compare_report(rows)
    assert report["no_comparable_rows"] is True


def test_compare_report_lz_deviation_bounded():
    cfg = SweepConfig.from_range(ModelKind.LZ, "a", 0.25, 2.0, 5,
                                 methods=("numeric", "ddp", "lz"))
    report = compare_report(run_sweep(cfg))
    stats = report["branches"]["lz-exact"]
    assert stats["count"] == 5
    assert stats["max_rel_diff"] <= 1e-3


def test_compare_report_sublinear_median():
    cfg = SweepConfig.from_range(ModelKind.SUBLINEAR, "a", 0.25, 2.0, 5,
                                 eps=0.25, methods=("numeric", "ddp"))
    report = compare_report(run_sweep(cfg))
    stats = report["branches"]["sublinear-quadrature"]
    assert math.isfinite(stats["median_rel_diff"])
    assert stats["median_rel_diff"] <= 0.10


def test_eps_sweep_requires_fixed_coupling():
    with pytest.raises(ValueError):
        SweepConfig.from_range(ModelKind.SUPERLINEAR, "eps", 0.0, 0.5, 3)
    with pytest.raises(ValueError):
        SweepConfig.from_range(ModelKind.LZ, "eps", 0.0, 0.5, 3, a=1.0)


def test_config_validation():
    with pytest.raises(ValueError):
        SweepConfig.from_range(ModelKind.LZ, "a", 1.0, 0.5, 3)
    with pytest.raises(ValueError):
        SweepConfig.from_range(ModelKind.LZ, "a", 0.5, 1.0, 1)
    with pytest.raises(ValueError):
        SweepConfig.from_range(ModelKind.LZ, "a", 0.5, 1.0, 3, methods=("bogus",))


def test_preset_configs_cover_figures():
    assert len(preset_configs("fig2")) == 1
    assert len(preset_configs("fig4")) == 2
    assert [c.n_power for c in preset_configs("fig5")] == [3, 5, 7]
    with pytest.raises(ValueError):
        preset_configs("fig9")


def test_fig4_preset_shares_lz_value_at_zero_nonlinearity():
    # both perturbative models coincide with the linear result at eps = 0
    for cfg in preset_configs("fig4", workers=1):
        model = cfg.model_at(cfg.grid[0])
        from levelcross.ddp import analytic_probability

        assert analytic_probability(model).probability == pytest.approx(
            math.exp(-math.pi), rel=1e-12
        )


# -- command line ------------------------------------------------------------

def test_cli_sweep_csv(tmp_path):
    out = tmp_path / "rows.csv"
    runner = CliRunner()
    result = runner.invoke(cli_main, [
        "sweep", "--model", "lz", "--var", "a", "--min", "0.5", "--max",
        "1.0", "--count", "2", "--methods", "lz,ddp", "--format", "csv",
        "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    lines = out.read_text().strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == 3


def test_cli_bad_arguments_exit_2():
    runner = CliRunner()
    result = runner.invoke(cli_main, [
        "sweep", "--model", "lz", "--var", "eps", "--min", "0", "--max",
        "0.5", "--count", "3", "--out", "/tmp/x.csv",
    ])
    assert result.exit_code == 2
    result = runner.invoke(cli_main, ["preset", "fig9", "--out", "/tmp/x.csv"])
    assert result.exit_code == 2
    result = runner.invoke(cli_main, [
        "sweep", "--model", "lz", "--var", "a", "--min", "1.0", "--max",
        "0.5", "--count", "3", "--out", "/tmp/x.csv",
    ])
    assert result.exit_code == 2


def test_cli_warned_rows_exit_3(tmp_path):
    out = tmp_path / "rows.csv"
    runner = CliRunner()
    result = runner.invoke(cli_main, [
        "sweep", "--model", "superlinear", "--eps", "0.25", "--var", "a",
        "--min", "3.2", "--max", "3.4", "--count", "2",
        "--methods", "numeric,ddp", "--out", str(out),
    ])
    assert result.exit_code == 3
    assert out.exists()


def test_cli_solve_report():
    runner = CliRunner()
    result = runner.invoke(cli_main, ["solve", "--model", "lz", "--a", "1.0"])
    assert result.exit_code == 0, result.output
    assert "P numeric" in result.output
    assert "4.32" in result.output


def test_cli_aeh_report():
    runner = CliRunner()
    result = runner.invoke(cli_main, [
        "aeh", "--A", "1.0", "--B", "2.0", "--T", "2.0",
    ])
    assert result.exit_code == 0, result.output
    assert "exact" in result.output and "numeric" in result.output


def test_cli_sweep_renders_plot(tmp_path):
    out = tmp_path / "rows.csv"
    img = tmp_path / "rows.png"
    runner = CliRunner()
    result = runner.invoke(cli_main, [
        "sweep", "--model", "lz", "--var", "a", "--min", "0.5", "--max",
        "1.5", "--count", "3", "--methods", "lz,ddp,numeric",
        "--out", str(out), "--plot", str(img),
    ])
    assert result.exit_code == 0, result.output
    assert img.exists() and img.stat().st_size > 0
