import math
import time

import pytest
from pydantic import ValidationError

from decohere.simulator import scenarios
from decohere.simulator.errors import DomainError, NoSolutionError, ParameterError
from decohere.simulator.models import (
    BathSpec,
    Column,
    CooperPairBoxParams,
    DecoherenceValue,
    IntegralResult,
    QuadratureConfig,
    ScenarioTable,
    SpectralDensity,
)
from decohere.simulator.scenarios import (
    DEFAULT_HALF_CYCLES,
    DEFAULT_TEMPERATURES,
    cooper_pair_box_bath,
    crossover_interval,
    free_curve,
    interval_sweep,
    solve_interval_for_suppression,
    temperature_sweep,
    time_series,
)

# ============================================================================
# ScenarioTable
# ============================================================================


def test_table_must_be_rectangular():
    with pytest.raises(ValidationError):
        ScenarioTable(name="x", columns=[Column(label="a"), Column(label="b")], rows=[[1.0]])


def test_table_rejects_missing_cells():
    with pytest.raises(ValidationError):
        ScenarioTable(name="x", columns=[Column(label="a")], rows=[[float("nan")]])


def test_table_flagged_cells():
    table = ScenarioTable(
        name="x",
        columns=[Column(label="a"), Column(label="b")],
        rows=[[1.0, 2.0], [3.0, 4.0]],
        flags=[[True, True], [True, False]],
    )
    assert table.flagged_cells() == [(1, 1)]
    assert table.column("b") == [2.0, 4.0]


# ============================================================================
# Cooper-pair box
# ============================================================================

def test_cpb_unit_conversion():
    bath = cooper_pair_box_bath(CooperPairBoxParams())
    assert bath.density.exponent == -1
    assert bath.density.uv_cutoff == pytest.approx(6.283e10, rel=1e-3)
    assert bath.density.ir_cutoff == pytest.approx(2 * math.pi * 100, rel=1e-12)
    assert bath.temperature == pytest.approx(7.60e9, rel=1e-3)
    assert bath.density.coupling == pytest.approx(1.161e17, rel=2e-3)


def test_cpb_anchor_interval():
    bath = cooper_pair_box_bath(CooperPairBoxParams())
    solution = solve_interval_for_suppression(bath, 1, 0.1, criterion="residual")
    assert 0.125e-9 <= solution.interval <= 0.5e-9
    assert solution.achieved == pytest.approx(0.1, rel=1e-3)


def test_cpb_looser_target_needs_longer_interval():
    bath = cooper_pair_box_bath(CooperPairBoxParams())
    tight = solve_interval_for_suppression(bath, 1, 0.1, criterion="residual")
    loose = solve_interval_for_suppression(bath, 1, 0.5, criterion="residual")
    assert loose.interval > tight.interval


# ============================================================================
# Time series
# ============================================================================

def test_time_series_zero_cycles(one_over_f_bath):
    table = time_series(one_over_f_bath, 0.025, 0)
    assert len(table.rows) == 1
    row = dict(zip(table.labels, table.rows[0]))
    assert row["t"] == 0.0
    assert row["gamma_free"] == row["gamma_pulsed"] == row["gamma_closed"] == 0.0


def test_time_series_fig1_one_over_f(one_over_f_bath):
    table = time_series(one_over_f_bath, 0.025, 100, QuadratureConfig())
    assert len(table.rows) == 101
    assert "gamma_closed" in table.labels
    assert table.flagged_cells() == []
    pulsed = table.column("gamma_pulsed")[40:]
    assert all(0.8 * 8.416e-4 <= value <= 1.2 * 8.416e-4 for value in pulsed)
    assert table.column("gamma_free")[-1] / table.column("gamma_pulsed")[-1] > 10
    assert all(flag == 1.0 for flag in table.column("converged"))


def test_time_series_ohmic_has_no_closed_form(ohmic_bath):
    table = time_series(ohmic_bath, 0.025, 5)
    assert "gamma_closed" not in table.labels
    assert table.column("N") == [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]


@pytest.mark.parametrize("bath_name", ["one_over_f_bath", "ohmic_bath"])
def test_time_series_stable_under_tighter_tolerances(request, quad, bath_name):
    bath = request.getfixturevalue(bath_name)
    tight = QuadratureConfig(abs_tol=quad.abs_tol / 2, rel_tol=quad.rel_tol / 2)
    base = time_series(bath, 0.025, 5, quad)
    refined = time_series(bath, 0.025, 5, tight)
    assert not base.flagged_cells() and not refined.flagged_cells()
    for label in ("gamma_free", "gamma_pulsed"):
        for a, b in zip(base.column(label), refined.column(label)):
            assert abs(a - b) <= quad.tolerance(a) + tight.tolerance(b)


def test_free_curve_grid(one_over_f_bath):
    table = free_curve(one_over_f_bath, 5.0, points=11)
    assert table.column("t")[0] == 0.0
    assert table.column("t")[-1] == pytest.approx(5.0)
    assert table.column("gamma_free")[0] == 0.0


# ============================================================================
# Temperature sweep
# ============================================================================

@pytest.fixture
def fig3_specs():
    one_over_f = SpectralDensity(exponent=-1, coupling=0.5, ir_cutoff=1.0, uv_cutoff=20.0)
    ohmic = SpectralDensity(exponent=1, coupling=0.1, ir_cutoff=1.0, uv_cutoff=20.0)
    return one_over_f, ohmic


def test_temperature_sweep_requires_integer_cycles(fig3_specs):
    with pytest.raises(ParameterError):
        temperature_sweep(*fig3_specs, 0.3, 4.0, [0.0])


def test_temperature_sweep_fig3(fig3_specs):
    table = temperature_sweep(*fig3_specs, 0.125, 4.0)
    assert len(table.rows) == len(DEFAULT_TEMPERATURES) == 30
    for label in ("coherence_free_1f", "coherence_pulsed_1f", "coherence_free_ohmic", "coherence_pulsed_ohmic"):
        curve = table.column(label)
        assert all(b <= a + 1e-12 for a, b in zip(curve, curve[1:]))
    for ratio_1f, ratio_ohmic in zip(table.column("ratio_1f"), table.column("ratio_ohmic")):
        assert ratio_1f <= ratio_ohmic
    for pulsed, free in zip(table.column("coherence_pulsed_1f"), table.column("coherence_free_1f")):
        assert pulsed >= free


def test_temperature_sweep_zero_temperature_row(fig3_specs):
    from decohere.simulator.decoherence import gamma_free

    table = temperature_sweep(*fig3_specs, 0.125, 4.0, [0.0])
    expected = math.exp(-gamma_free(BathSpec(density=fig3_specs[0]), 4.0).gamma)
    assert table.column("coherence_free_1f")[0] == expected


# ============================================================================
# Interval sweep
# ============================================================================

def test_default_half_cycles():
    assert DEFAULT_HALF_CYCLES[0] == 32
    assert DEFAULT_HALF_CYCLES[-1] == 3200
    assert all(a < b for a, b in zip(DEFAULT_HALF_CYCLES, DEFAULT_HALF_CYCLES[1:]))


def test_interval_sweep_fig4_one_over_f(fig4_one_over_f):
    table = interval_sweep(fig4_one_over_f, 10.0, 2.0, [32, 100, 1000])
    assert "gamma_closed" in table.labels
    assert table.column("dt") == pytest.approx([1 / 32, 0.01, 0.001])
    assert set(table.column("regime")) <= {0.0, 1.0, 2.0}


def test_interval_sweep_ohmic_enhancement(fig4_ohmic):
    table = interval_sweep(fig4_ohmic, 10.0, 2.0, [32])
    assert "gamma_closed" not in table.labels
    assert table.column("coherence_pulsed")[0] < table.column("coherence_free")[0]


def test_interval_sweep_fast_pulse_limit(fig4_one_over_f):
    # uv_cutoff * dt = 1e-3
    table = interval_sweep(fig4_one_over_f, 10.0, 2.0, [100000])
    assert table.column("gamma_pulsed")[0] < 1e-3


def test_interval_sweep_one_over_f_dominates_ohmic(fig4_one_over_f, fig4_ohmic):
    half_cycles = [32, 64, 200, 1000]
    one_over_f = interval_sweep(fig4_one_over_f, 10.0, 2.0, half_cycles).column("coherence_pulsed")
    ohmic = interval_sweep(fig4_ohmic, 10.0, 2.0, half_cycles).column("coherence_pulsed")
    assert all(a >= b for a, b in zip(one_over_f, ohmic))


@pytest.mark.parametrize("spec_name", ["fig4_one_over_f", "fig4_ohmic"])
def test_hot_bath_breaks_suppression(request, spec_name):
    spec = request.getfixturevalue(spec_name)
    half_cycles = [32, 100, 1000]
    cold = interval_sweep(spec, 10.0, 2.0, half_cycles).column("coherence_pulsed")
    hot = interval_sweep(spec, 1000.0, 2.0, half_cycles).column("coherence_pulsed")
    assert all(h < c for h, c in zip(hot, cold))


def test_interval_sweep_rejects_bad_cycles(fig4_one_over_f):
    with pytest.raises(ParameterError):
        interval_sweep(fig4_one_over_f, 10.0, 2.0, [0])


# ============================================================================
# Crossover
# ============================================================================

def test_crossover_ohmic(fig4_ohmic):
    result = crossover_interval(fig4_ohmic, 10.0, 2.0)
    assert result.found
    assert 0 < result.interval < math.pi / fig4_ohmic.uv_cutoff


def test_no_crossover_one_over_f(fig4_one_over_f):
    result = crossover_interval(fig4_one_over_f, 10.0, 2.0)
    assert not result.found
    assert result.reason


def test_crossover_degenerate_time(fig4_ohmic):
    result = crossover_interval(fig4_ohmic, 10.0, 0.0)
    assert not result.found


@pytest.mark.parametrize("temperature, total_time", [(10.0, 2.0), (10.0, 4.0), (1000.0, 2.0), (1000.0, 4.0)])
def test_crossover_only_for_ohmic(fig4_ohmic, fig4_one_over_f, temperature, total_time):
    ohmic = crossover_interval(fig4_ohmic, temperature, total_time)
    one_over_f = crossover_interval(fig4_one_over_f, temperature, total_time)
    assert not one_over_f.found
    if ohmic.found:
        assert 0 < ohmic.interval < math.pi / fig4_ohmic.uv_cutoff


# ============================================================================
# Interval solver
# ============================================================================

def test_solver_ratio_criterion(one_over_f_bath):
    solution = solve_interval_for_suppression(one_over_f_bath, 10, 0.05)
    assert solution.criterion == "ratio"
    assert solution.achieved == pytest.approx(0.05, rel=1e-3)
    assert 0 < solution.interval


def test_solver_targets_ordered(one_over_f_bath):
    small = solve_interval_for_suppression(one_over_f_bath, 10, 0.01)
    large = solve_interval_for_suppression(one_over_f_bath, 10, 0.05)
    assert large.interval > small.interval


def test_solver_rejects_target_outside_unit_interval(one_over_f_bath):
    with pytest.raises(DomainError):
        solve_interval_for_suppression(one_over_f_bath, 1, 1.5)


def test_solver_reports_missing_bracket(one_over_f_bath, monkeypatch):
    monkeypatch.setattr(scenarios, "SOLVE_MAX_DOUBLINGS", 0)
    monkeypatch.setattr(scenarios, "SOLVE_SCAN_POINTS", 4)
    with pytest.raises(NoSolutionError) as excinfo:
        solve_interval_for_suppression(one_over_f_bath, 1, 0.999, criterion="residual")
    assert excinfo.value.upper is not None
    assert excinfo.value.upper_value < 0.999


def test_solver_gives_up_on_unreachable_target_quickly():
    weak = BathSpec(density=SpectralDensity(exponent=-1, coupling=1e-6, ir_cutoff=1.0, uv_cutoff=80.0))
    started = time.perf_counter()
    with pytest.raises(NoSolutionError) as excinfo:
        solve_interval_for_suppression(weak, 1, 0.9, criterion="residual")
    assert time.perf_counter() - started < 60
    limit = 2 ** scenarios.SOLVE_MAX_DOUBLINGS * math.pi / 80.0
    assert excinfo.value.upper <= limit * (1 + 1e-12)
    assert excinfo.value.upper_value < 0.9


def test_solver_stops_expanding_when_quadrature_fails(one_over_f_bath, monkeypatch):
    edge = math.pi / one_over_f_bath.density.uv_cutoff
    beyond = []

    def fake_pulsed(bath, schedule, config=None):
        if schedule.interval > edge * (1 + 1e-9):
            beyond.append(schedule.interval)
        result = IntegralResult(
            value=1e-3, error_estimate=1.0, evaluations=1, converged=schedule.interval <= edge * (1 + 1e-9)
        )
        return DecoherenceValue(gamma=1e-3, time=schedule.total_time, result=result)

    monkeypatch.setattr(scenarios, "gamma_pulsed", fake_pulsed)
    with pytest.raises(NoSolutionError) as excinfo:
        solve_interval_for_suppression(one_over_f_bath, 1, 0.9, criterion="residual")
    assert len(beyond) == 1
    assert excinfo.value.upper == pytest.approx(edge)
