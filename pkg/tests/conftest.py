from __future__ import annotations

import functools
import sys

import pytest

from aphidsim import FIGURE_PRESETS, classify, euler_oracle, integrate


@functools.lru_cache(maxsize=None)
def preset_run(figure_id: str):
    traj = integrate(FIGURE_PRESETS[figure_id].scenario)
    return traj, classify(traj)


@functools.lru_cache(maxsize=None)
def preset_euler(figure_id: str, dt_fine: float = 1e-4):
    return euler_oracle(FIGURE_PRESETS[figure_id].scenario, dt_fine)


# paired panels are the same run; 13 distinct scenarios cover all 18 panels
DISTINCT_PRESETS = ("1A", "1B", "1C", "1E", "1G", "2A", "2C", "2E", "3A", "3B", "3C", "3D", "3E")


@pytest.fixture
def runs():
    return preset_run


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
