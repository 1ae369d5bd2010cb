"""Two-biotype soybean aphid population dynamics on aphid-resistant soybean.

Avirulent and virulent aphids share one plant whose resistance level is
eroded by feeding facilitation and by obviation of resistance. The package
integrates the model over a season, classifies who persists, and sweeps
initial conditions to map the regimes.
"""

from aphidsim.errors import (
    AphidSimError,
    EventLocalizationError,
    InapplicableResultError,
    NumericalDomainError,
    ParameterValidationError,
    ScenarioFileError,
)
from aphidsim.fileio import load_scenario, load_sweep_spec, write_scenario, write_sweep, write_timeseries
from aphidsim.integrator import (
    Event,
    EventKind,
    Trajectory,
    euler_oracle,
    integrate,
    integrate_model1,
    locate_event,
    rk4_step,
)
from aphidsim.model import (
    Derivative,
    ModelParams,
    SystemState,
    ValidationReport,
    facilitation_gate,
    rhs,
    validate_params,
)
from aphidsim.outcomes import OutcomeClass, OutcomeSummary, classify, compare_peaks, peak_coincidence
from aphidsim.presets import FIGURE_PRESETS, FigurePreset
from aphidsim.scenario import IntegrationControls, Scenario
from aphidsim.sweep import SweepAxis, SweepResult, SweepSpec, boundary_trace, run_sweep

__version__ = "0.1.0"
