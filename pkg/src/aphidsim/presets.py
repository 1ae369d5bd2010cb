"""Built-in scenarios for the eighteen reference figure panels.

Each panel carries its initial densities and expected verdict. Paired
panels (1C/1D, 1E/1F, 2A/2B, 2C/2D, 2E/2F) are the same run plotted
twice. Figure 1 switches obviation of resistance off (``k_r = 0``);
figures 2 and 3 use both mechanisms.

Only qualitative expectations are stored here. The reference figures are
curves without numeric tables, and the facilitation / obviation rates used
to draw them were never reported.
"""

from __future__ import annotations

from dataclasses import dataclass

from aphidsim.outcomes import OutcomeClass, OutcomeSummary
from aphidsim.scenario import Scenario

# the virulent peak counts as "high" once it exceeds its start this many times over
HIGH_PEAK_FACTOR = 10.0


@dataclass(frozen=True)
class FigurePreset:
    """One figure panel with its expected verdict.

    Attributes:
        figure_id: Panel label, ``"1A"`` .. ``"3E"``.
        scenario: The run behind the panel.
        expected: Expected classification.
        notes: Short description used in reports.
        virulent_high_peak: Virulent peak must exceed ``HIGH_PEAK_FACTOR``
            times its initial density.
        virulent_dominates: Virulent peak must exceed avirulent peak.
        early_avirulent_extinction: Avirulent extinction must happen in the
            first half of the season.
    """

    figure_id: str
    scenario: Scenario
    expected: OutcomeClass
    notes: str = ""
    virulent_high_peak: bool = False
    virulent_dominates: bool = False
    early_avirulent_extinction: bool = False

    def check(self, summary: OutcomeSummary) -> list[str]:
        """Return human-readable mismatches between ``summary`` and the panel."""
        problems = []
        if summary.classification != self.expected:
            problems.append(f"classification {summary.classification} != expected {self.expected}")
        if self.virulent_high_peak:
            need = HIGH_PEAK_FACTOR * self.scenario.x_V0
            if not summary.peak_V.density > need:
                problems.append(f"virulent peak {summary.peak_V.density:.4g} not above {need:.4g}")
        if self.virulent_dominates and not summary.peak_V.density > summary.peak_A.density:
            problems.append(
                f"virulent peak {summary.peak_V.density:.4g} does not exceed avirulent peak {summary.peak_A.density:.4g}"
            )
        if self.early_avirulent_extinction:
            half = self.scenario.controls.t_end / 2
            if summary.extinct_A_at is None or not summary.extinct_A_at < half:
                problems.append(f"avirulent extinction at {summary.extinct_A_at} not before t_end/2={half}")
        return problems


def _scn(fig: str, x_A0: float, x_V0: float, **kw) -> Scenario:
    return Scenario(name=f"fig{fig}", x_A0=x_A0, x_V0=x_V0).with_values(**kw)


_C = OutcomeClass


def _build() -> dict[str, FigurePreset]:
    presets = [
        FigurePreset("1A", _scn("1A", 20, 0, k_r=0.0), _C.BOTH_EXTINCT,
                     "avirulent alone below threshold goes extinct"),
        FigurePreset("1B", _scn("1B", 40, 0, k_r=0.0), _C.AVIRULENT_ONLY,
                     "avirulent alone above threshold colonises"),
        FigurePreset("1C", _scn("1C", 25, 5, k_r=0.0), _C.VIRULENT_ONLY,
                     "avirulent extinct, virulent reaches a high peak", virulent_high_peak=True),
        FigurePreset("1D", _scn("1D", 25, 5, k_r=0.0), _C.VIRULENT_ONLY,
                     "avirulent extinct, virulent reaches a high peak", virulent_high_peak=True),
        FigurePreset("1E", _scn("1E", 25, 60, k_r=0.0), _C.COEXISTENCE,
                     "facilitation by many virulents sustains avirulents", virulent_dominates=True),
        FigurePreset("1F", _scn("1F", 25, 60, k_r=0.0), _C.COEXISTENCE,
                     "facilitation by many virulents sustains avirulents", virulent_dominates=True),
        FigurePreset("1G", _scn("1G", 40, 60, k_r=0.0), _C.COEXISTENCE,
                     "both above threshold, virulent peak higher", virulent_dominates=True),
        FigurePreset("2A", _scn("2A", 15, 10), _C.VIRULENT_ONLY,
                     "too few virulents to obviate resistance", early_avirulent_extinction=True),
        FigurePreset("2B", _scn("2B", 15, 10), _C.VIRULENT_ONLY,
                     "avirulent extinct early in the season", early_avirulent_extinction=True),
        FigurePreset("2C", _scn("2C", 15, 20), _C.COEXISTENCE, "obviation lets avirulents persist"),
        FigurePreset("2D", _scn("2D", 15, 20), _C.COEXISTENCE, "obviation lets avirulents persist"),
        FigurePreset("2E", _scn("2E", 15, 50), _C.COEXISTENCE, "faster obviation, higher avirulent peak"),
        FigurePreset("2F", _scn("2F", 15, 50), _C.COEXISTENCE, "faster obviation, higher avirulent peak"),
        FigurePreset("3A", _scn("3A", 35, 25), _C.COEXISTENCE, "both above resistance level, coexist"),
        FigurePreset("3B", _scn("3B", 50, 5), _C.COEXISTENCE, "both above resistance level, coexist"),
        FigurePreset("3C", _scn("3C", 50, 20), _C.COEXISTENCE, "both above resistance level, coexist"),
        FigurePreset("3D", _scn("3D", 50, 30), _C.COEXISTENCE, "both above resistance level, coexist"),
        FigurePreset("3E", _scn("3E", 50, 50), _C.COEXISTENCE, "both above resistance level, coexist"),
    ]
    return {p.figure_id: p for p in presets}


FIGURE_PRESETS: dict[str, FigurePreset] = _build()

# panels whose avirulent peak must rise strictly with the virulent start
INCREASING_AVIRULENT_PEAK = ("2A", "2C", "2E")


def get_preset(figure_id: str) -> FigurePreset:
    key = figure_id.strip().upper()
    try:
        return FIGURE_PRESETS[key]
    except KeyError:
        raise KeyError(f"unknown figure {figure_id!r}; choose from {', '.join(FIGURE_PRESETS)}") from None


def check_families(summaries: dict[str, OutcomeSummary]) -> list[str]:
    """Cross-panel checks over whatever panels are present in ``summaries``."""
    problems = []
    chain = [k for k in INCREASING_AVIRULENT_PEAK if k in summaries]
    for lo, hi in zip(chain, chain[1:]):
        if not summaries[hi].peak_A.density > summaries[lo].peak_A.density:
            problems.append(
                f"avirulent peak {hi} ({summaries[hi].peak_A.density:.4g}) not above {lo} "
                f"({summaries[lo].peak_A.density:.4g})"
            )
    return problems
