"""Scenario and integration-control containers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from aphidsim.errors import ParameterValidationError
from aphidsim.model import DEFAULT_R0, ModelParams, SystemState, ValidationReport, validate_params

# June arrival to mid-September departure
DEFAULT_T_END = 120.0
DEFAULT_DT = 0.01
DEFAULT_SAMPLE_EVERY = 100
DEFAULT_EVENT_TOL = 1e-6


@dataclass(frozen=True)
class IntegrationControls:
    """Fixed-step integration settings.

    Attributes:
        t_end: Season length (days).
        dt: Base RK4 step (days).
        sample_every: Output decimation, in base steps.
        event_tol: Width of the final bisection bracket on event times (days).
    """

    t_end: float = DEFAULT_T_END
    dt: float = DEFAULT_DT
    sample_every: int = DEFAULT_SAMPLE_EVERY
    event_tol: float = DEFAULT_EVENT_TOL

    def violations(self) -> list[str]:
        out = []
        for name in ("t_end", "dt", "event_tol"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                out.append(f"{name} must be a finite number (got {value!r})")
        if out:
            return out
        if self.t_end <= 0:
            out.append("t_end must be positive")
        if not 0 < self.dt <= self.t_end:
            out.append("dt must satisfy 0 < dt <= t_end")
        if not 0 < self.event_tol < self.dt:
            out.append("event_tol must satisfy 0 < event_tol < dt")
        if not isinstance(self.sample_every, int) or isinstance(self.sample_every, bool) or self.sample_every < 1:
            out.append("sample_every must be an integer >= 1")
        return out

    @property
    def n_steps(self) -> int:
        # tolerate t_end/dt landing a hair above an integer
        return max(1, math.ceil(self.t_end / self.dt - 1e-9))


@dataclass(frozen=True)
class Scenario:
    """A fully resolved simulation case.

    ``h`` and ``t`` always start at zero; only the three densities below are
    free initial conditions.
    """

    name: str = "scenario"
    params: ModelParams = field(default_factory=ModelParams)
    x_A0: float = 0.0
    x_V0: float = 0.0
    R0: float = DEFAULT_R0
    controls: IntegrationControls = field(default_factory=IntegrationControls)
    gate_on_initial: bool = False

    def initial_state(self) -> SystemState:
        return SystemState(0.0, 0.0, float(self.x_A0), float(self.x_V0), float(self.R0))

    def validate(self) -> ValidationReport:
        report = validate_params(self.params)
        for name in ("x_A0", "x_V0", "R0"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                report.violations.append(f"{name} must be a finite number (got {value!r})")
            elif value < 0:
                report.violations.append(f"{name} must be non-negative")
        report.violations.extend(self.controls.violations())
        return report

    def check(self) -> Scenario:
        """Raise :class:`ParameterValidationError` unless the scenario is valid."""
        report = self.validate()
        if not report.ok:
            raise ParameterValidationError(report, context=f"scenario {self.name!r}")
        return self

    def with_values(self, **changes) -> Scenario:
        """Copy with flat keys (``k_f``, ``x_A0``, ``dt``, ...) replaced."""
        param_keys = {k: changes.pop(k) for k in list(changes) if k in _PARAM_KEYS}
        ctrl_keys = {k: changes.pop(k) for k in list(changes) if k in _CONTROL_KEYS}
        out = replace(self, **changes)
        if param_keys:
            out = replace(out, params=replace(out.params, **param_keys))
        if ctrl_keys:
            out = replace(out, controls=replace(out.controls, **ctrl_keys))
        return out


_PARAM_KEYS = ("r", "a", "k_f", "k_r", "A", "epsilon_ext")
_CONTROL_KEYS = ("t_end", "dt", "sample_every", "event_tol")
