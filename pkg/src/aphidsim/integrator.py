"""Fixed-step integration with event localisation.

The facilitation gate makes the right-hand side discontinuous, and an
avirulent population below the resistance level is driven through zero in
finite time. Both are handled the same way: after every trial step the
driver checks for a crossing of ``x_A = A`` (gate flip) or of a density
through ``epsilon_ext`` (extinction). When one is found the step is
re-integrated from its start over shrinking sub-steps until the earliest
crossing is bracketed to within ``event_tol``; the state is advanced to the
late end of the bracket, the event is applied, and the remainder of the step
is integrated under the new mode. No stage ever straddles a discontinuity.

Extinct populations are set to exactly zero and stay there.

The gate is a mode variable held fixed between events rather than being
re-evaluated inside RK4 stages.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from aphidsim.errors import EventLocalizationError, NumericalDomainError
from aphidsim.model import ModelParams, SystemState, _deriv, facilitation_gate, model1_rhs
from aphidsim.scenario import IntegrationControls, Scenario

MAX_BISECTIONS = 64
# guards against a gate that chatters inside a single base step
MAX_EVENTS_PER_STEP = 1000


class EventKind(str, enum.Enum):
    GATE_ON = "GateOn"
    GATE_OFF = "GateOff"
    EXTINCT_A = "ExtinctA"
    EXTINCT_V = "ExtinctV"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class Event:
    t: float
    kind: EventKind


@dataclass(frozen=True)
class Trajectory:
    """Sampled states over ``[0, t_end]`` plus the event log.

    ``samples`` are taken every ``sample_every`` base steps, with the final
    state at ``t_end`` always included.
    """

    samples: tuple[SystemState, ...]
    events: tuple[Event, ...] = ()
    scenario: Scenario | None = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.samples)

    def array(self) -> np.ndarray:
        """Samples as an ``(n, 5)`` array with columns ``t, h, x_A, x_V, R``."""
        return np.array([s.as_tuple() for s in self.samples], dtype=float).reshape(-1, 5)

    @property
    def t(self) -> np.ndarray:
        return self.array()[:, 0]

    @property
    def h(self) -> np.ndarray:
        return self.array()[:, 1]

    @property
    def x_A(self) -> np.ndarray:
        return self.array()[:, 2]

    @property
    def x_V(self) -> np.ndarray:
        return self.array()[:, 3]

    @property
    def R(self) -> np.ndarray:
        return self.array()[:, 4]

    @property
    def terminal(self) -> SystemState:
        return self.samples[-1]

    def events_of(self, kind: EventKind) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    def first_event(self, kind: EventKind) -> Event | None:
        for e in self.events:
            if e.kind == kind:
                return e
        return None


# -- steppers -----------------------------------------------------------------
#
# Steppers work on bare floats for speed. Signature:
#   stepper(h, x_A, x_V, R, dt, r, a, k_f, k_r, gate, a_present, eps)
#   -> (h, x_A, x_V, R)


def _settle(R_prev, h, x_A, x_V, R, eps):
    # absorb sub-epsilon negative roundoff; R is analytically non-increasing
    if -eps < h < 0.0:
        h = 0.0
    if -eps < x_A < 0.0:
        x_A = 0.0
    if -eps < x_V < 0.0:
        x_V = 0.0
    if R < 0.0:
        R = 0.0
    elif R > R_prev:
        R = R_prev
    return h, x_A, x_V, R


def _rk4(h, x_A, x_V, R, dt, r, a, k_f, k_r, gate, ap, eps):
    half = 0.5 * dt
    k1 = _deriv(h, x_A, x_V, R, r, a, k_f, k_r, gate, ap)
    k2 = _deriv(h + half * k1[0], x_A + half * k1[1], x_V + half * k1[2], R + half * k1[3],
                r, a, k_f, k_r, gate, ap)
    k3 = _deriv(h + half * k2[0], x_A + half * k2[1], x_V + half * k2[2], R + half * k2[3],
                r, a, k_f, k_r, gate, ap)
    k4 = _deriv(h + dt * k3[0], x_A + dt * k3[1], x_V + dt * k3[2], R + dt * k3[3],
                r, a, k_f, k_r, gate, ap)
    sixth = dt / 6.0
    h1 = h + sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    a1 = x_A + sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    v1 = x_V + sixth * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    R1 = R + sixth * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
    if not (math.isfinite(h1) and math.isfinite(a1) and math.isfinite(v1) and math.isfinite(R1)):
        _diagnose_rk4(h, x_A, x_V, R, dt, r, a, k_f, k_r, gate, ap)
    return _settle(R, h1, a1, v1, R1, eps)


def _diagnose_rk4(h, x_A, x_V, R, dt, r, a, k_f, k_r, gate, ap):
    half = 0.5 * dt
    y = (h, x_A, x_V, R)
    stage_offsets = (0.0, half, half, dt)
    k = (0.0, 0.0, 0.0, 0.0)
    for i, off in enumerate(stage_offsets, start=1):
        ys = tuple(yi + off * ki for yi, ki in zip(y, k))
        k = _deriv(*ys, r, a, k_f, k_r, gate, ap)
        if not all(math.isfinite(v) for v in ys + k):
            raise NumericalDomainError(f"non-finite value in RK4 stage {i} (state {ys}, slope {k})")
    raise NumericalDomainError("non-finite value in RK4 combination step")


def _euler(h, x_A, x_V, R, dt, r, a, k_f, k_r, gate, ap, eps):
    d = _deriv(h, x_A, x_V, R, r, a, k_f, k_r, gate, ap)
    h1 = h + dt * d[0]
    a1 = x_A + dt * d[1]
    v1 = x_V + dt * d[2]
    R1 = R + dt * d[3]
    if not (math.isfinite(h1) and math.isfinite(a1) and math.isfinite(v1) and math.isfinite(R1)):
        raise NumericalDomainError(f"non-finite value in Euler step from {(h, x_A, x_V, R)}")
    return _settle(R, h1, a1, v1, R1, eps)


Stepper = Callable[..., tuple[float, float, float, float]]


def _params_tuple(params: ModelParams):
    return params.r, params.a, params.k_f, params.k_r


def rk4_step(state: SystemState, params: ModelParams, dt: float, gate: int | None = None) -> SystemState:
    """Advance ``state`` by one classical RK4 step of length ``dt``.

    The caller is responsible for making sure no event falls inside the
    step (see :func:`locate_event`). The gate defaults to its value at the
    start of the step.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not all(math.isfinite(v) for v in state.as_tuple()):
        raise NumericalDomainError(f"non-finite state {state}")
    if gate is None:
        gate = facilitation_gate(state.x_A, params.A)
    out = _rk4(state.h, state.x_A, state.x_V, state.R, dt, *_params_tuple(params),
               gate, state.x_A != 0.0, params.epsilon_ext)
    return SystemState(state.t + dt, *out)


def euler_step(state: SystemState, params: ModelParams, dt: float, gate: int | None = None) -> SystemState:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if gate is None:
        gate = facilitation_gate(state.x_A, params.A)
    out = _euler(state.h, state.x_A, state.x_V, state.R, dt, *_params_tuple(params),
                 gate, state.x_A != 0.0, params.epsilon_ext)
    return SystemState(state.t + dt, *out)


# -- event detection ----------------------------------------------------------


def _crossings(y1, gate, frozen, A, eps, a_present, v_present):
    kinds = []
    if a_present:
        if not frozen and (1 if y1[1] - A > 0 else 0) != gate:
            kinds.append(EventKind.GATE_ON if gate == 0 else EventKind.GATE_OFF)
        if y1[1] < eps:
            kinds.append(EventKind.EXTINCT_A)
    if v_present and y1[2] < eps:
        kinds.append(EventKind.EXTINCT_V)
    return kinds


def _bisect(stepper, y0, span, pvals, gate, frozen, A, eps, tol, y_hi):
    """Shrink ``(0, span]`` around the earliest crossing; return ``(tau, y, kinds)``."""
    a_present = y0[1] != 0.0
    v_present = y0[2] != 0.0
    lo, hi = 0.0, span
    n = 0
    while hi - lo > tol:
        n += 1
        if n > MAX_BISECTIONS:
            raise EventLocalizationError(
                f"event not bracketed to {tol} within {MAX_BISECTIONS} bisections (bracket [{lo}, {hi}])"
            )
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise EventLocalizationError(
                f"event bracket [{lo}, {hi}] hit float resolution before reaching tolerance {tol}"
            )
        ym = stepper(*y0, mid, *pvals, gate, a_present, eps)
        if _crossings(ym, gate, frozen, A, eps, a_present, v_present):
            hi, y_hi = mid, ym
        else:
            lo = mid
    kinds = _crossings(y_hi, gate, frozen, A, eps, a_present, v_present)
    if not kinds:
        raise EventLocalizationError(f"lost event bracket at sub-step {hi}")
    return hi, y_hi, kinds


def locate_event(
    s0: SystemState,
    s1: SystemState,
    params: ModelParams,
    event_tol: float,
    *,
    gate: int | None = None,
    frozen_gate: bool = False,
    stepper: str = "rk4",
) -> tuple[float, EventKind] | None:
    """Find the earliest event between two consecutive step endpoints.

    Checks ``x_A - A`` (gate flip, unless ``frozen_gate``) and
    ``x_A - epsilon_ext``, ``x_V - epsilon_ext`` (extinction) for a sign
    change from ``s0`` to ``s1``. A population already below the cutoff at
    ``s0`` (but not yet zeroed) is reported as extinct at ``s0.t``.

    Returns ``(t_star, kind)`` or ``None``. The returned time is the late
    end of a bracket no wider than ``event_tol``. Simultaneous crossings
    are reported in the order gate, ExtinctA, ExtinctV.
    """
    eps = params.epsilon_ext
    if 0.0 < s0.x_A < eps:
        return s0.t, EventKind.EXTINCT_A
    if 0.0 < s0.x_V < eps:
        return s0.t, EventKind.EXTINCT_V
    if gate is None:
        gate = facilitation_gate(s0.x_A, params.A)
    y0 = (s0.h, s0.x_A, s0.x_V, s0.R)
    y1 = (s1.h, s1.x_A, s1.x_V, s1.R)
    a_present = s0.x_A != 0.0
    v_present = s0.x_V != 0.0
    if not _crossings(y1, gate, frozen_gate, params.A, eps, a_present, v_present):
        return None
    fn = _rk4 if stepper == "rk4" else _euler
    tau, _, kinds = _bisect(fn, y0, s1.t - s0.t, _params_tuple(params), gate,
                            frozen_gate, params.A, eps, event_tol, y1)
    return s0.t + tau, kinds[0]


# -- driver -------------------------------------------------------------------


def _drive(scenario: Scenario, stepper: Stepper, dt: float, n_steps: int, sample_every: int) -> Trajectory:
    p = scenario.params
    pvals = _params_tuple(p)
    r, a, k_f, k_r = pvals
    A, eps = p.A, p.epsilon_ext
    t_end = scenario.controls.t_end
    tol = scenario.controls.event_tol
    frozen = bool(scenario.gate_on_initial)

    h, x_A, x_V, R = 0.0, float(scenario.x_A0), float(scenario.x_V0), float(scenario.R0)
    events: list[Event] = []
    gate = facilitation_gate(x_A, A)
    if x_A < eps:
        events.append(Event(0.0, EventKind.EXTINCT_A))
        x_A = 0.0
    if x_V < eps:
        events.append(Event(0.0, EventKind.EXTINCT_V))
        x_V = 0.0
    if not frozen:
        gate = facilitation_gate(x_A, A)

    samples = [SystemState(0.0, h, x_A, x_V, R)]
    last = n_steps - 1
    for k in range(n_steps):
        t_k = k * dt
        span = dt if k < last else t_end - t_k
        a_present = x_A != 0.0
        v_present = x_V != 0.0
        y = stepper(h, x_A, x_V, R, span, r, a, k_f, k_r, gate, a_present, eps)
        if (
            (a_present and (y[1] < eps or (not frozen and (1 if y[1] - A > 0 else 0) != gate)))
            or (v_present and y[2] < eps)
        ):
            t = t_k
            remaining = span
            n_events = 0
            while True:
                y0 = (h, x_A, x_V, R)
                tau, y, kinds = _bisect(stepper, y0, remaining, pvals, gate, frozen, A, eps, tol, y)
                t += tau
                remaining -= tau
                h, x_A, x_V, R = y
                for kind in kinds:
                    if kind is EventKind.EXTINCT_A:
                        x_A = 0.0
                    elif kind is EventKind.EXTINCT_V:
                        x_V = 0.0
                    else:
                        gate = 1 - gate
                    events.append(Event(t, kind))
                if not frozen and gate != facilitation_gate(x_A, A):
                    gate = facilitation_gate(x_A, A)
                    events.append(Event(t, EventKind.GATE_ON if gate else EventKind.GATE_OFF))
                n_events += 1
                if n_events > MAX_EVENTS_PER_STEP:
                    raise EventLocalizationError(f"more than {MAX_EVENTS_PER_STEP} events in step at t={t_k}")
                if remaining <= 0.0:
                    break
                a_present = x_A != 0.0
                v_present = x_V != 0.0
                y = stepper(h, x_A, x_V, R, remaining, r, a, k_f, k_r, gate, a_present, eps)
                if not _crossings(y, gate, frozen, A, eps, a_present, v_present):
                    h, x_A, x_V, R = y
                    break
        else:
            h, x_A, x_V, R = y
        if k == last:
            samples.append(SystemState(t_end, h, x_A, x_V, R))
        elif (k + 1) % sample_every == 0:
            samples.append(SystemState((k + 1) * dt, h, x_A, x_V, R))
    return Trajectory(tuple(samples), tuple(events), scenario)


def _annotated(fn, scenario, *args):
    try:
        return fn(scenario, *args)
    except (NumericalDomainError, EventLocalizationError) as exc:
        raise type(exc)(f"scenario {scenario.name!r}: {exc}") from exc


def integrate(scenario: Scenario) -> Trajectory:
    """Integrate ``scenario`` over its season with RK4 and event splitting."""
    scenario.check()
    c = scenario.controls
    return _annotated(_drive, scenario, _rk4, c.dt, c.n_steps, c.sample_every)


def euler_oracle(scenario: Scenario, dt_fine: float) -> Trajectory:
    """Forward-Euler reference run with the same event and clamping rules.

    Output samples are placed on the same time grid as :func:`integrate`,
    so ``dt * sample_every`` must be an integer multiple of ``dt_fine``.
    """
    scenario.check()
    c = scenario.controls
    if not dt_fine <= c.dt / 10 * (1 + 1e-12):
        raise ValueError(f"dt_fine={dt_fine} must be at most dt/10={c.dt / 10}")
    ratio = c.dt * c.sample_every / dt_fine
    sample_every = round(ratio)
    if abs(ratio - sample_every) > 1e-6 * ratio:
        raise ValueError("dt * sample_every must be a multiple of dt_fine")
    n_steps = max(1, math.ceil(c.t_end / dt_fine - 1e-9))
    return _annotated(_drive, scenario, _euler, dt_fine, n_steps, sample_every)


# -- single-biotype reference -------------------------------------------------


def model1_rk4_step(h: float, x: float, dt: float, r: float, a: float) -> tuple[float, float]:
    """RK4 step of the single-biotype model, same arithmetic as :func:`rk4_step`."""
    half = 0.5 * dt
    k1 = model1_rhs(h, x, r, a)
    k2 = model1_rhs(h + half * k1[0], x + half * k1[1], r, a)
    k3 = model1_rhs(h + half * k2[0], x + half * k2[1], r, a)
    k4 = model1_rhs(h + dt * k3[0], x + dt * k3[1], r, a)
    sixth = dt / 6.0
    h1 = h + sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    x1 = x + sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    return h1, x1


def integrate_model1(x0: float, r: float, a: float, controls: IntegrationControls) -> np.ndarray:
    """Integrate ``dh/dt = a x, dx/dt = (r - h) x`` from ``h(0) = 0``.

    No extinction handling. Returns an ``(n, 3)`` array of ``t, h, x`` on
    the same sample grid as :func:`integrate`.
    """
    dt, n_steps, every, t_end = controls.dt, controls.n_steps, controls.sample_every, controls.t_end
    h, x = 0.0, float(x0)
    rows = [(0.0, h, x)]
    last = n_steps - 1
    for k in range(n_steps):
        span = dt if k < last else t_end - k * dt
        h, x = model1_rk4_step(h, x, span, r, a)
        if k == last:
            rows.append((t_end, h, x))
        elif (k + 1) % every == 0:
            rows.append(((k + 1) * dt, h, x))
    return np.array(rows)
