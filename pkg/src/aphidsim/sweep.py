"""Two-axis sweeps over initial conditions or rate constants.

Every cell is ``classify(integrate(cell_scenario))``. Cells are independent,
so they can be farmed out to worker processes by row block; results are
written into a preallocated grid, which keeps the assembled output identical
whatever the worker count or completion order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from aphidsim.errors import ParameterValidationError
from aphidsim.integrator import integrate
from aphidsim.model import ValidationReport
from aphidsim.outcomes import OutcomeClass, OutcomeSummary, classify
from aphidsim.scenario import Scenario

SWEEP_TARGETS = ("x_A0", "x_V0", "k_f", "k_r", "A", "R0")


@dataclass(frozen=True)
class SweepAxis:
    target: str
    min: float
    max: float
    n_points: int

    def violations(self) -> list[str]:
        out = []
        if self.target not in SWEEP_TARGETS:
            out.append(f"axis target {self.target!r} not one of {', '.join(SWEEP_TARGETS)}")
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            out.append("axis bounds must be finite")
        if not isinstance(self.n_points, int) or self.n_points < 1:
            out.append("n_points must be an integer >= 1")
        elif self.n_points == 1:
            if self.min != self.max:
                out.append("a single-point axis needs min == max")
        elif not self.min < self.max:
            out.append("axis needs min < max")
        return out

    def values(self) -> list[float]:
        """Grid points ``min + i (max - min) / (n - 1)``, endpoints exact."""
        n = self.n_points
        if n == 1:
            return [float(self.min)]
        step = (self.max - self.min) / (n - 1)
        vals = [self.min + i * step for i in range(n - 1)]
        vals.append(float(self.max))
        return vals


@dataclass(frozen=True)
class SweepSpec:
    base: Scenario
    axis1: SweepAxis
    axis2: SweepAxis
    workers: int = 1

    def violations(self) -> list[str]:
        out = [f"axis1: {v}" for v in self.axis1.violations()]
        out += [f"axis2: {v}" for v in self.axis2.violations()]
        if self.axis1.target == self.axis2.target:
            out.append("axis targets must differ")
        if not isinstance(self.workers, int) or self.workers < 1:
            out.append("workers must be an integer >= 1")
        return out

    def cell_scenario(self, i: int, j: int) -> Scenario:
        v1 = self.axis1.values()[i]
        v2 = self.axis2.values()[j]
        return self.base.with_values(
            name=f"{self.base.name}[{i},{j}]",
            **{self.axis1.target: v1, self.axis2.target: v2},
        )


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    axis1_values: tuple[float, ...]
    axis2_values: tuple[float, ...]
    grid: tuple[tuple[OutcomeSummary, ...], ...]
    scenarios: tuple[tuple[Scenario, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.axis1_values), len(self.axis2_values)

    def classifications(self) -> np.ndarray:
        return np.array([[c.classification.value for c in row] for row in self.grid], dtype=object)


def _run_rows(scenario_rows: list[list[Scenario]]) -> list[list[OutcomeSummary]]:
    return [[classify(integrate(sc)) for sc in row] for row in scenario_rows]


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate every cell of ``spec``.

    Raises
    ------
    ParameterValidationError
        If ``spec`` itself is malformed, or for the first cell (row-major)
        whose resolved scenario is invalid; the message names the cell index.
    """
    bad = spec.violations()
    if bad:
        raise ParameterValidationError(ValidationReport(bad), context="sweep spec")
    v1, v2 = spec.axis1.values(), spec.axis2.values()
    scenarios = [[spec.cell_scenario(i, j) for j in range(len(v2))] for i in range(len(v1))]
    for i, row in enumerate(scenarios):
        for j, sc in enumerate(row):
            report = sc.validate()
            if not report.ok:
                raise ParameterValidationError(report, context=f"sweep cell ({i}, {j})")

    n_rows = len(v1)
    grid: list[list[OutcomeSummary] | None] = [None] * n_rows
    workers = min(spec.workers, n_rows)
    if workers <= 1:
        for i, row in enumerate(_run_rows(scenarios)):
            grid[i] = row
    else:
        blocks = np.array_split(np.arange(n_rows), workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [(block, pool.submit(_run_rows, [scenarios[i] for i in block])) for block in blocks if len(block)]
            for block, fut in futures:
                for i, row in zip(block, fut.result()):
                    grid[int(i)] = row

    return SweepResult(
        spec=spec,
        axis1_values=tuple(v1),
        axis2_values=tuple(v2),
        grid=tuple(tuple(row) for row in grid),
        scenarios=tuple(tuple(row) for row in scenarios),
    )


def boundary_trace(result: SweepResult, cls: OutcomeClass | str) -> list[tuple[int, int]]:
    """Cells on the border between ``cls`` and everything else.

    A cell is on the border when one of its 4-neighbours falls on the other
    side. Returned in row-major order; empty if ``cls`` is absent or fills
    the grid.
    """
    member = result.classifications() == OutcomeClass(cls).value
    n, m = member.shape
    cells = []
    for i in range(n):
        for j in range(m):
            for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                ii, jj = i + di, j + dj
                if 0 <= ii < n and 0 <= jj < m and member[ii, jj] != member[i, j]:
                    cells.append((i, j))
                    break
    return cells


def boundary_segments(result: SweepResult, cls: OutcomeClass | str) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """Cell-edge segments, in axis units, separating ``cls`` from the rest.

    Edges sit halfway between neighbouring grid points.
    """
    member = result.classifications() == OutcomeClass(cls).value
    a1 = np.asarray(result.axis1_values)
    a2 = np.asarray(result.axis2_values)

    def _edges(vals):
        if len(vals) == 1:
            return np.array([vals[0], vals[0]])
        mids = 0.5 * (vals[1:] + vals[:-1])
        return np.concatenate([[vals[0] - (mids[0] - vals[0])], mids, [vals[-1] + (vals[-1] - mids[-1])]])

    e1, e2 = _edges(a1), _edges(a2)
    n, m = member.shape
    segs = []
    for i in range(n):
        for j in range(m):
            if i + 1 < n and member[i, j] != member[i + 1, j]:
                segs.append(((float(e1[i + 1]), float(e2[j])), (float(e1[i + 1]), float(e2[j + 1]))))
            if j + 1 < m and member[i, j] != member[i, j + 1]:
                segs.append(((float(e1[i]), float(e2[j + 1])), (float(e1[i + 1]), float(e2[j + 1]))))
    return segs
