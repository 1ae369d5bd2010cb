"""Ecological verdicts from a trajectory: persistence, extinction, peaks."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from aphidsim.errors import InapplicableResultError
from aphidsim.integrator import EventKind, Trajectory
from aphidsim.model import SystemState


class OutcomeClass(str, enum.Enum):
    COEXISTENCE = "Coexistence"
    VIRULENT_ONLY = "VirulentOnly"
    AVIRULENT_ONLY = "AvirulentOnly"
    BOTH_EXTINCT = "BothExtinct"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Peak:
    t: float
    density: float


@dataclass(frozen=True)
class OutcomeSummary:
    """Season verdict for one run.

    A biotype that starts at zero density is reported extinct at ``t = 0``.
    Peaks are read off the output samples without interpolation.
    """

    classification: OutcomeClass
    peak_A: Peak
    peak_V: Peak
    extinct_A_at: float | None
    extinct_V_at: float | None
    terminal: SystemState
    cumulative_h_end: float


def _peak(t: np.ndarray, x: np.ndarray) -> Peak:
    i = int(np.argmax(x))
    return Peak(float(t[i]), float(x[i]))


def classify(trajectory: Trajectory) -> OutcomeSummary:
    if len(trajectory.samples) == 0:
        raise ValueError("cannot classify an empty trajectory")
    arr = trajectory.array()
    ext_A = trajectory.first_event(EventKind.EXTINCT_A)
    ext_V = trajectory.first_event(EventKind.EXTINCT_V)
    if ext_A is None and ext_V is None:
        cls = OutcomeClass.COEXISTENCE
    elif ext_A is None:
        cls = OutcomeClass.AVIRULENT_ONLY
    elif ext_V is None:
        cls = OutcomeClass.VIRULENT_ONLY
    else:
        cls = OutcomeClass.BOTH_EXTINCT
    terminal = trajectory.terminal
    return OutcomeSummary(
        classification=cls,
        peak_A=_peak(arr[:, 0], arr[:, 2]),
        peak_V=_peak(arr[:, 0], arr[:, 3]),
        extinct_A_at=None if ext_A is None else ext_A.t,
        extinct_V_at=None if ext_V is None else ext_V.t,
        terminal=terminal,
        cumulative_h_end=terminal.h,
    )


def _sample_interval(trajectory: Trajectory) -> float:
    if trajectory.scenario is not None:
        c = trajectory.scenario.controls
        return c.dt * c.sample_every
    t = trajectory.t
    if len(t) < 2:
        return 0.0
    return float(t[1] - t[0])


def peak_coincidence(trajectory: Trajectory, tol_steps: int = 2) -> bool:
    """Whether both biotypes peak within ``tol_steps`` output samples.

    Raises
    ------
    InapplicableResultError
        If either biotype went extinct during the run; the question has no
        answer then.
    """
    for kind in (EventKind.EXTINCT_A, EventKind.EXTINCT_V):
        ev = trajectory.first_event(kind)
        if ev is not None:
            raise InapplicableResultError(f"peak coincidence needs both biotypes to persist ({kind} at t={ev.t})")
    arr = trajectory.array()
    i_A = int(np.argmax(arr[:, 2]))
    i_V = int(np.argmax(arr[:, 3]))
    gap = abs(arr[i_A, 0] - arr[i_V, 0])
    return bool(gap <= tol_steps * _sample_interval(trajectory) * (1 + 1e-9))


@dataclass(frozen=True)
class PeakComparison:
    """Sign of ``b - a`` for each biotype's peak density (-1, 0 or +1)."""

    avirulent: int
    virulent: int
    delta_A: float
    delta_V: float

    @property
    def all_equal(self) -> bool:
        return self.avirulent == 0 and self.virulent == 0


def compare_peaks(a: OutcomeSummary, b: OutcomeSummary) -> PeakComparison:
    d_A = b.peak_A.density - a.peak_A.density
    d_V = b.peak_V.density - a.peak_V.density
    return PeakComparison(int(np.sign(d_A)), int(np.sign(d_V)), d_A, d_V)
