import subprocess
import sys

import pytest

from aphidsim.cli import run_cli
from aphidsim.fileio import SWEEP_HEADER, TIMESERIES_HEADER
from aphidsim.presets import FIGURE_PRESETS


def test_figures_single_panel(tmp_path, capsys):
    assert run_cli(["figures", "--which", "2B", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "fig2B_timeseries.csv").read_text().startswith(TIMESERIES_HEADER)
    summary = (tmp_path / "fig2B_summary.txt").read_text()
    assert "classification = VirulentOnly" in summary
    table = (tmp_path / "verdicts.csv").read_text()
    assert "2B," in table and "# mismatches=0" in table
    assert "MISMATCH" not in capsys.readouterr().out


def test_figures_comma_list(tmp_path):
    assert run_cli(["figures", "--which", "1a,3E", "--out", str(tmp_path)]) == 0
    assert sorted(p.name for p in tmp_path.glob("*_timeseries.csv")) == ["fig1A_timeseries.csv", "fig3E_timeseries.csv"]


def test_figures_unknown_panel(tmp_path):
    assert run_cli(["figures", "--which", "4Z", "--out", str(tmp_path)]) == 2


@pytest.mark.slow
def test_figures_all(tmp_path):
    assert run_cli(["figures", "--out", str(tmp_path)]) == 0
    assert len(list(tmp_path.glob("fig*_timeseries.csv"))) == len(FIGURE_PRESETS) == 18
    rows = (tmp_path / "verdicts.csv").read_text().splitlines()
    assert sum(1 for r in rows if ",ok," in r) == 18
    assert rows[-1] == "# mismatches=0"


def test_validate_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.txt"
    good.write_text("x_A0 = 40\n")
    bad = tmp_path / "bad.txt"
    bad.write_text("k_f = 5e-4\nk_r = 1e-4\n")
    unknown = tmp_path / "unknown.txt"
    unknown.write_text("speed = 3\n")
    assert run_cli(["validate", str(good)]) == 0
    assert "good: valid" in capsys.readouterr().out
    assert run_cli(["validate", str(bad)]) == 1
    assert "k_r must exceed k_f" in capsys.readouterr().out
    assert run_cli(["validate", str(unknown)]) == 1
    assert "unknown.txt:1:" in capsys.readouterr().err
    assert run_cli(["validate", str(tmp_path / "missing.txt")]) == 2


@pytest.mark.parametrize("argv", [["frobnicate"], [], ["run"], ["sweep", "x", "--workers", "two"]])
def test_usage_errors(argv):
    assert run_cli(argv) == 2


def test_run_writes_outputs(tmp_path, capsys):
    sc = tmp_path / "mine.txt"
    sc.write_text("x_A0 = 40\nk_r = 0\n")
    out = tmp_path / "out"
    assert run_cli(["run", str(sc), "--out", str(out)]) == 0
    assert (out / "mine_timeseries.csv").exists()
    assert "classification = AvirulentOnly" in (out / "mine_summary.txt").read_text()
    assert "AvirulentOnly" in capsys.readouterr().out


def test_sweep_writes_grid(tmp_path, capsys):
    sw = tmp_path / "grid.txt"
    sw.write_text("k_r = 0\naxis1 = x_A0 20 40 2\naxis2 = x_V0 0 60 2\n")
    assert run_cli(["sweep", str(sw), "--out", str(tmp_path), "--workers", "2"]) == 0
    lines = (tmp_path / "grid_sweep.csv").read_text().splitlines()
    assert lines[1] == SWEEP_HEADER and len(lines) == 6
    assert "2x2 sweep" in capsys.readouterr().out


def test_sweep_invalid_cell_exit_code(tmp_path):
    sw = tmp_path / "bad.txt"
    sw.write_text("axis1 = k_f 0 0.015 4\naxis2 = x_A0 20 40 2\n")
    assert run_cli(["sweep", str(sw), "--out", str(tmp_path)]) == 1


def test_module_entry_point(tmp_path):
    good = tmp_path / "ok.txt"
    good.write_text("")
    proc = subprocess.run([sys.executable, "-m", "aphidsim", "validate", str(good)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "ok: valid" in proc.stdout
