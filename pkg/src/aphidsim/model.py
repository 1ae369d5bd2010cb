"""Two-biotype aphid model on a resistant host plant.

State variables
---------------
h    cumulative combined aphid density, scaled by ``a`` (dimensionless)
x_A  avirulent aphid density (aphids)
x_V  virulent aphid density (aphids)
R    dynamic resistance level of the plant (aphids)

Right-hand side::

    dh/dt   = a (x_A + x_V)
    dx_A/dt = (r - h)(x_A - R)
    dx_V/dt = (r - h) x_V
    dR/dt   = -(k_r x_V + k_f x_V + k_f g(x_A - A) x_A) R

where ``g`` is the facilitation gate (1 for a strictly positive argument,
else 0). A population sitting at exactly zero is treated as absent and has
zero derivative, which makes extinction absorbing.

With ``x_A = R = 0`` the ``(h, x_V)`` pair reduces to the single-biotype
boom-bust model ``dh/dt = a x``, ``dx/dt = (r - h) x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

from aphidsim.errors import NumericalDomainError

# finite rate of increase from the life-table work
DEFAULT_R = 0.27
DEFAULT_A_SCALE = 5e-6
# both the avirulent threshold and the initial resistance are 30 aphids
DEFAULT_THRESHOLD = 30.0
DEFAULT_R0 = 30.0
# calibrated so the figure scenarios land in their reported regimes
DEFAULT_K_F = 2e-3
DEFAULT_K_R = 1e-2
DEFAULT_EPSILON_EXT = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Rate constants and thresholds of the two-biotype model.

    Attributes:
        r: Maximum potential aphid growth rate (per day).
        a: Scaling constant relating cumulative density to the dynamics
            (per aphid-day).
        k_f: Feeding-facilitation rate (per aphid per day).
        k_r: Obviation-of-resistance rate (per aphid per day).
        A: Avirulent density above which feeding facilitation acts (aphids).
        epsilon_ext: Density below which a population is declared extinct.
            Numerical control only.
    """

    r: float = DEFAULT_R
    a: float = DEFAULT_A_SCALE
    k_f: float = DEFAULT_K_F
    k_r: float = DEFAULT_K_R
    A: float = DEFAULT_THRESHOLD
    epsilon_ext: float = DEFAULT_EPSILON_EXT


@dataclass(frozen=True, slots=True)
class SystemState:
    t: float
    h: float
    x_A: float
    x_V: float
    R: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.t, self.h, self.x_A, self.x_V, self.R)


@dataclass(frozen=True, slots=True)
class Derivative:
    dh: float
    dx_A: float
    dx_V: float
    dR: float


@dataclass
class ValidationReport:
    """Outcome of :func:`validate_params`; empty ``violations`` means valid."""

    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(f"- {v}" for v in self.violations)


def facilitation_gate(x_A: float, A: float) -> int:
    """Return 1 when ``x_A - A`` is strictly positive, else 0."""
    return 1 if x_A - A > 0 else 0


def validate_params(params: ModelParams) -> ValidationReport:
    report = ValidationReport()
    v = report.violations
    for f in fields(params):
        value = getattr(params, f.name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            v.append(f"{f.name} must be a finite number (got {value!r})")
    if v:
        return report

    if params.r <= 0:
        v.append("r must be positive")
    if params.a <= 0:
        v.append("a must be positive")
    if params.k_f < 0:
        v.append("k_f must be non-negative")
    if params.k_r < 0:
        v.append("k_r must be non-negative")
    if params.A < 0:
        v.append("A must be non-negative")
    if params.epsilon_ext <= 0:
        v.append("epsilon_ext must be positive")
    if params.k_f > 0 and params.k_r > 0 and not params.k_r > params.k_f:
        v.append("k_r must exceed k_f when both mechanisms are enabled")
    return report


def _deriv(h, x_A, x_V, R, r, a, k_f, k_r, gate, a_present):
    # shared by rhs() and the steppers; keep the operation order fixed
    growth = r - h
    dh = a * (x_A + x_V)
    dx_A = growth * (x_A - R) if a_present else 0.0
    dx_V = growth * x_V
    dR = -(k_r * x_V + k_f * x_V + k_f * gate * x_A) * R
    return dh, dx_A, dx_V, dR


def rhs(state: SystemState, params: ModelParams, gate: int | None = None) -> Derivative:
    """Evaluate the model right-hand side at ``state``.

    Parameters
    ----------
    state : SystemState
        Current state; all fields must be finite.
    params : ModelParams
        Assumed already validated.
    gate : int, optional
        Override for the facilitation gate. By default the gate is evaluated
        on the current avirulent density.

    Raises
    ------
    NumericalDomainError
        If any state field or the resulting derivative is not finite.
    """
    values = state.as_tuple()
    if not all(math.isfinite(x) for x in values):
        raise NumericalDomainError(f"non-finite state {state}")
    if gate is None:
        gate = facilitation_gate(state.x_A, params.A)
    d = _deriv(
        state.h, state.x_A, state.x_V, state.R,
        params.r, params.a, params.k_f, params.k_r, gate, state.x_A != 0.0,
    )
    if not all(math.isfinite(x) for x in d):
        raise NumericalDomainError(f"non-finite derivative at {state}")
    return Derivative(*d)


def model1_rhs(h: float, x: float, r: float, a: float) -> tuple[float, float]:
    """Single-biotype right-hand side ``(a x, (r - h) x)``."""
    return a * x, (r - h) * x
