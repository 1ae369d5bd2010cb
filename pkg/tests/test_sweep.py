import numpy as np
import pytest

from aphidsim import (
    OutcomeClass,
    ParameterValidationError,
    Scenario,
    SweepAxis,
    SweepSpec,
    boundary_trace,
    classify,
    integrate,
    run_sweep,
)
from aphidsim.fileio import format_sweep
from aphidsim.sweep import SweepResult, boundary_segments


def _spec(a1, a2, workers=1, **base):
    return SweepSpec(Scenario(name="sw").with_values(**base), SweepAxis(*a1), SweepAxis(*a2), workers)


def _persists(x_A0):
    s = classify(integrate(Scenario(name="b", x_A0=x_A0, x_V0=0.0)))
    return s.classification is OutcomeClass.AVIRULENT_ONLY


def _bisect_threshold(lo=20.0, hi=40.0, tol=1e-3):
    assert not _persists(lo) and _persists(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if _persists(mid) else (mid, hi)
    return hi


def test_axis_values():
    assert SweepAxis("x_A0", 0.0, 60.0, 4).values() == [0.0, 20.0, 40.0, 60.0]
    vals = SweepAxis("x_A0", 0.0, 60.0, 50).values()
    assert len(vals) == 50 and vals[-1] == 60.0
    assert SweepAxis("k_f", 1e-3, 1e-3, 1).values() == [1e-3]


@pytest.mark.parametrize(
    "axis, msg",
    [
        (("h", 0.0, 1.0, 2), "not one of"),
        (("x_A0", 5.0, 1.0, 3), "min < max"),
        (("x_A0", 0.0, 1.0, 1), "min == max"),
        (("x_A0", 0.0, 1.0, 0), ">= 1"),
    ],
)
def test_axis_violations(axis, msg):
    assert any(msg in v for v in SweepAxis(*axis).violations())


def test_spec_rejects_same_target_twice():
    with pytest.raises(ParameterValidationError, match="targets must differ"):
        run_sweep(_spec(("x_A0", 0.0, 1.0, 2), ("x_A0", 0.0, 1.0, 2)))


def test_two_by_two_reproduces_first_figure():
    res = run_sweep(_spec(("x_A0", 20.0, 40.0, 2), ("x_V0", 0.0, 60.0, 2), k_r=0.0))
    assert res.shape == (2, 2)
    assert res.classifications().tolist() == [
        ["BothExtinct", "Coexistence"],
        ["AvirulentOnly", "Coexistence"],
    ]


def test_degenerate_axis():
    res = run_sweep(_spec(("k_r", 0.0, 0.0, 1), ("x_A0", 20.0, 40.0, 3)))
    assert res.shape == (1, 3)
    assert res.classifications()[0, 0] == "BothExtinct"
    assert res.classifications()[0, 2] == "AvirulentOnly"


def test_cell_independence():
    res = run_sweep(_spec(("x_A0", 10.0, 50.0, 3), ("x_V0", 0.0, 40.0, 3)))
    for i in range(3):
        for j in range(3):
            sc = Scenario(name="c", x_A0=res.axis1_values[i], x_V0=res.axis2_values[j])
            assert classify(integrate(sc)) == res.grid[i][j]


@pytest.mark.parametrize("workers", [2, 3])
def test_deterministic_across_worker_counts(workers):
    axes = (("x_A0", 0.0, 60.0, 5), ("x_V0", 0.0, 60.0, 4))
    serial = run_sweep(_spec(*axes, workers=1))
    parallel = run_sweep(_spec(*axes, workers=workers))
    assert format_sweep(parallel) == format_sweep(serial)
    assert parallel.grid == serial.grid


def test_invalid_cell_names_its_index():
    # k_f climbs past k_r partway along the axis
    spec = _spec(("k_f", 0.0, 1.5e-2, 4), ("x_A0", 20.0, 40.0, 2))
    with pytest.raises(ParameterValidationError, match=r"sweep cell \(2, 0\)"):
        run_sweep(spec)


def _fake_result(labels):
    labels = np.asarray(labels, dtype=object)
    n, m = labels.shape
    spec = _spec(("x_A0", 0.0, float(n), n), ("x_V0", 0.0, float(m), m))
    grid = tuple(
        tuple(_StubSummary(OutcomeClass(labels[i, j])) for j in range(m)) for i in range(n)
    )
    return SweepResult(spec, tuple(spec.axis1.values()), tuple(spec.axis2.values()), grid, ())


class _StubSummary:
    def __init__(self, cls):
        self.classification = cls


def test_boundary_checkerboard():
    res = _fake_result([["Coexistence", "BothExtinct"], ["BothExtinct", "Coexistence"]])
    assert boundary_trace(res, OutcomeClass.COEXISTENCE) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert len(boundary_segments(res, "Coexistence")) == 4


@pytest.mark.parametrize("cls", ["Coexistence", "VirulentOnly"])
def test_boundary_empty_for_uniform_grid(cls):
    res = _fake_result([["Coexistence"] * 3] * 3)
    assert boundary_trace(res, cls) == []
    assert boundary_segments(res, cls) == []


def test_boundary_segments_sit_between_grid_points():
    res = _fake_result([["Coexistence", "Coexistence"], ["BothExtinct", "BothExtinct"]])
    # axis1 points 0, 2 -> edge at 1
    assert sorted(boundary_segments(res, "Coexistence")) == [((1.0, -1.0), (1.0, 1.0)), ((1.0, 1.0), (1.0, 3.0))]


@pytest.fixture(scope="module")
def big_sweep():
    return run_sweep(_spec(("x_A0", 0.0, 60.0, 50), ("x_V0", 0.0, 60.0, 50)))


def test_threshold_oracle():
    assert _bisect_threshold() == pytest.approx(30.0, abs=1e-3)


@pytest.mark.slow
def test_fifty_by_fifty_boundary_near_threshold(big_sweep):
    threshold = _bisect_threshold()
    x_A = np.asarray(big_sweep.axis1_values)
    col = big_sweep.classifications()[:, 0]
    persists = col == "AvirulentOnly"
    # the x_V(0) = 0 column flips exactly once, at the oracle threshold
    assert np.count_nonzero(persists[1:] != persists[:-1]) == 1
    assert np.array_equal(persists, x_A >= threshold)
    i_hi = int(np.argmax(persists))
    assert x_A[i_hi - 1] < 30.0 < x_A[i_hi]
    cells = boundary_trace(big_sweep, OutcomeClass.AVIRULENT_ONLY)
    assert (i_hi - 1, 0) in cells and (i_hi, 0) in cells
    assert cells == sorted(cells)
