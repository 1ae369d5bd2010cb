"""Exception hierarchy for aphidsim."""

from __future__ import annotations


class AphidSimError(Exception):
    """Base class for all package errors."""


class NumericalDomainError(AphidSimError, ValueError):
    """A state, rate or intermediate value left the finite real domain."""


class EventLocalizationError(AphidSimError, RuntimeError):
    """Bisection could not bracket an event crossing."""


class InapplicableResultError(AphidSimError, ValueError):
    """A query was made on a trajectory that does not meet its precondition."""


class ParameterValidationError(AphidSimError, ValueError):
    """Raised with a :class:`~aphidsim.model.ValidationReport` attached."""

    def __init__(self, report, context: str = ""):
        self.report = report
        msg = "; ".join(report.violations)
        if context:
            msg = f"{context}: {msg}"
        super().__init__(msg)


class ScenarioFileError(AphidSimError, ValueError):
    """Malformed or unknown content in a scenario / sweep file."""

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
