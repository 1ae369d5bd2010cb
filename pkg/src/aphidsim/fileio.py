"""Plain-text readers and writers.

Scenario files are flat ``key = value`` lines with ``#`` comments::

    # Figure 1B-like run
    x_A0 = 40
    k_r = 0
    t_end = 120

Omitted keys take the package defaults. Sweep files use the same format
plus ``axis1``, ``axis2`` (``<target> <min> <max> <n_points>``) and an
optional ``workers``.

Numbers are always written with ``repr`` or ``%.17e`` so files round-trip
exactly and never depend on the locale.
"""

from __future__ import annotations

import math
from dataclasses import fields
from pathlib import Path

import numpy as np

from aphidsim.errors import ParameterValidationError, ScenarioFileError
from aphidsim.integrator import Trajectory
from aphidsim.model import ModelParams, ValidationReport
from aphidsim.outcomes import OutcomeSummary
from aphidsim.scenario import IntegrationControls, Scenario
from aphidsim.sweep import SweepAxis, SweepResult, SweepSpec

PARAM_KEYS = ("r", "a", "k_f", "k_r", "A", "epsilon_ext")
INITIAL_KEYS = ("R0", "x_A0", "x_V0")
CONTROL_KEYS = ("t_end", "dt", "sample_every", "event_tol")
SCENARIO_KEYS = PARAM_KEYS + INITIAL_KEYS + CONTROL_KEYS + ("gate_on_initial",)
SWEEP_KEYS = ("axis1", "axis2", "workers")

TIMESERIES_HEADER = "t,h,x_A,x_V,R"
SWEEP_HEADER = "axis1_value,axis2_value,classification,peak_A_t,peak_A,peak_V_t,peak_V,extinct_A_at,extinct_V_at"

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def _read_pairs(path: Path, allowed: tuple[str, ...]) -> dict[str, tuple[str, int]]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    pairs: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ScenarioFileError(f"expected 'key = value', got {raw.strip()!r}", path, lineno)
        if key not in allowed:
            raise ScenarioFileError(f"unknown key {key!r}", path, lineno)
        if key in pairs:
            raise ScenarioFileError(f"duplicate key {key!r} (first on line {pairs[key][1]})", path, lineno)
        pairs[key] = (value, lineno)
    return pairs


def _as_float(value: str, key: str, path: Path, lineno: int) -> float:
    try:
        out = float(value)
    except ValueError:
        raise ScenarioFileError(f"{key}: expected a number, got {value!r}", path, lineno) from None
    if not math.isfinite(out):
        raise ScenarioFileError(f"{key}: value must be finite, got {value!r}", path, lineno)
    return out


def _as_int(value: str, key: str, path: Path, lineno: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ScenarioFileError(f"{key}: expected an integer, got {value!r}", path, lineno) from None


def _as_bool(value: str, key: str, path: Path, lineno: int) -> bool:
    v = value.lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise ScenarioFileError(f"{key}: expected true/false, got {value!r}", path, lineno)


def _scenario_from_pairs(pairs: dict[str, tuple[str, int]], name: str, path: Path) -> Scenario:
    pkw, ckw, skw = {}, {}, {}
    for key, (value, lineno) in pairs.items():
        if key in PARAM_KEYS:
            pkw[key] = _as_float(value, key, path, lineno)
        elif key in INITIAL_KEYS:
            skw[key] = _as_float(value, key, path, lineno)
        elif key == "sample_every":
            ckw[key] = _as_int(value, key, path, lineno)
        elif key in CONTROL_KEYS:
            ckw[key] = _as_float(value, key, path, lineno)
        elif key == "gate_on_initial":
            skw[key] = _as_bool(value, key, path, lineno)
    return Scenario(name=name, params=ModelParams(**pkw), controls=IntegrationControls(**ckw), **skw)


def load_scenario(path) -> Scenario:
    """Read a scenario file and fill omitted keys with defaults.

    Raises
    ------
    ScenarioFileError
        Malformed line, unknown or duplicate key, or unparseable value
        (message carries the line number).
    ParameterValidationError
        The resolved scenario violates a model or control invariant.
    OSError
        The file cannot be read.
    """
    path = Path(path)
    pairs = _read_pairs(path, SCENARIO_KEYS)
    return _scenario_from_pairs(pairs, path.stem, path).check()


def dumps_scenario(scenario: Scenario) -> str:
    lines = [f"# scenario {scenario.name}"]
    for f in fields(ModelParams):
        lines.append(f"{f.name} = {getattr(scenario.params, f.name)!r}")
    for key in INITIAL_KEYS:
        lines.append(f"{key} = {float(getattr(scenario, key))!r}")
    c = scenario.controls
    lines.append(f"t_end = {float(c.t_end)!r}")
    lines.append(f"dt = {float(c.dt)!r}")
    lines.append(f"sample_every = {int(c.sample_every)}")
    lines.append(f"event_tol = {float(c.event_tol)!r}")
    lines.append(f"gate_on_initial = {'true' if scenario.gate_on_initial else 'false'}")
    return "\n".join(lines) + "\n"


def write_scenario(scenario: Scenario, path) -> None:
    _write(Path(path), dumps_scenario(scenario))


def load_sweep_spec(path) -> SweepSpec:
    """Read a sweep file: a base scenario plus two axes."""
    path = Path(path)
    pairs = _read_pairs(path, SCENARIO_KEYS + SWEEP_KEYS)
    axes = []
    for key in ("axis1", "axis2"):
        if key not in pairs:
            raise ScenarioFileError(f"missing required key {key!r}", path)
        value, lineno = pairs.pop(key)
        parts = value.replace(",", " ").split()
        if len(parts) != 4:
            raise ScenarioFileError(f"{key}: expected '<target> <min> <max> <n_points>', got {value!r}", path, lineno)
        axes.append(SweepAxis(
            parts[0],
            _as_float(parts[1], key, path, lineno),
            _as_float(parts[2], key, path, lineno),
            _as_int(parts[3], key, path, lineno),
        ))
    workers = 1
    if "workers" in pairs:
        value, lineno = pairs.pop("workers")
        workers = _as_int(value, "workers", path, lineno)
    base = _scenario_from_pairs(pairs, path.stem, path)
    spec = SweepSpec(base, axes[0], axes[1], workers)
    bad = spec.violations()
    if bad:
        raise ParameterValidationError(ValidationReport(bad), context=str(path))
    return spec


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _num(x: float) -> str:
    return f"{x:.17e}"


def format_timeseries(trajectory: Trajectory) -> str:
    rows = [TIMESERIES_HEADER]
    for s in trajectory.samples:
        rows.append(",".join(_num(v) for v in s.as_tuple()))
    for e in trajectory.events:
        rows.append(f"# event t={_num(e.t)} kind={e.kind.value}")
    return "\n".join(rows) + "\n"


def write_timeseries(trajectory: Trajectory, path) -> None:
    """Write samples as ``t,h,x_A,x_V,R`` rows, events as trailing comments."""
    _write(Path(path), format_timeseries(trajectory))


def read_timeseries(path):
    """Parse a file written by :func:`write_timeseries`.

    Returns ``(array, events)`` where ``events`` is a list of
    ``(t, kind)`` pairs.
    """
    rows, events = [], []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("# event"):
            parts = dict(p.split("=", 1) for p in line[len("# event"):].split())
            events.append((float(parts["t"]), parts["kind"]))
        elif line and not line.startswith("#") and line != TIMESERIES_HEADER:
            rows.append([float(v) for v in line.split(",")])
    return np.array(rows).reshape(-1, 5), events


def _opt(x: float | None) -> str:
    return "" if x is None else _num(x)


def format_summary(summary: OutcomeSummary, scenario: Scenario | None = None) -> str:
    lines = []
    if scenario is not None:
        lines.append(f"scenario = {scenario.name}")
    lines += [
        f"classification = {summary.classification.value}",
        f"peak_A_t = {_num(summary.peak_A.t)}",
        f"peak_A = {_num(summary.peak_A.density)}",
        f"peak_V_t = {_num(summary.peak_V.t)}",
        f"peak_V = {_num(summary.peak_V.density)}",
        f"extinct_A_at = {_opt(summary.extinct_A_at) or 'none'}",
        f"extinct_V_at = {_opt(summary.extinct_V_at) or 'none'}",
        f"cumulative_h_end = {_num(summary.cumulative_h_end)}",
    ]
    term = summary.terminal
    for key, value in zip(("t", "h", "x_A", "x_V", "R"), term.as_tuple()):
        lines.append(f"terminal_{key} = {_num(value)}")
    return "\n".join(lines) + "\n"


def write_summary(summary: OutcomeSummary, path, scenario: Scenario | None = None) -> None:
    _write(Path(path), format_summary(summary, scenario))


def format_sweep(result: SweepResult) -> str:
    spec = result.spec
    rows = [
        f"# axis1={spec.axis1.target} axis2={spec.axis2.target}",
        SWEEP_HEADER,
    ]
    for i, v1 in enumerate(result.axis1_values):
        for j, v2 in enumerate(result.axis2_values):
            c = result.grid[i][j]
            rows.append(",".join([
                _num(v1), _num(v2), c.classification.value,
                _num(c.peak_A.t), _num(c.peak_A.density),
                _num(c.peak_V.t), _num(c.peak_V.density),
                _opt(c.extinct_A_at), _opt(c.extinct_V_at),
            ]))
    return "\n".join(rows) + "\n"


def write_sweep(result: SweepResult, path) -> None:
    _write(Path(path), format_sweep(result))
