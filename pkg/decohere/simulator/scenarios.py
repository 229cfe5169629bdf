"""
Scenario runners: time series, temperature and interval sweeps, crossover
search, interval solving and the Cooper-pair-box parameter set.

Each sweep returns a ScenarioTable. Cells are independent; with
DECOHERE_WORKERS > 1 they run on a thread pool, and rows are always assembled
in grid order.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect

from . import settings, units
from .closed_form import check_validity, closed_form_value
from .decoherence import (
    gamma_free,
    gamma_pulsed,
    gamma_pulsed_relaxed,
    residual_decoherence,
)
from .errors import DomainError, NoSolutionError, ParameterError
from .models import (
    BathSpec,
    Column,
    CooperPairBoxParams,
    CrossoverResult,
    DecoherenceValue,
    IntervalSolution,
    PulseSchedule,
    QuadratureConfig,
    ScenarioTable,
    SpectralDensity,
)

logger = logging.getLogger(__name__)

# ============================================================================
# Configuration
# ============================================================================

DEFAULT_TEMPERATURES = np.geomspace(0.1, 1000.0, 30).tolist()
DEFAULT_HALF_CYCLES = np.unique(np.round(np.geomspace(32, 3200, 25)).astype(int)).tolist()

# Fraction of pi/uv_cutoff kept clear of the non-integrable edge in the crossover scan
CROSSOVER_EDGE_MARGIN = 1e-3
CROSSOVER_SCAN_POINTS = 48

SOLVE_SCAN_POINTS = 40
SOLVE_MAX_DOUBLINGS = 8
ROOT_RTOL = 1e-4

CRITERIA = ("ratio", "residual")


def _map_cells(func: Callable, items: Iterable) -> list:
    """Evaluate cells in order, on a thread pool when configured."""
    items = list(items)
    if settings.WORKERS > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=settings.WORKERS) as pool:
            return list(pool.map(func, items))
    return [func(item) for item in items]


def _flag_row(row: List[float], converged: List[bool]) -> Tuple[List[float], List[bool]]:
    """Append the companion converged column (1/0) to a row."""
    ok = all(converged)
    return row + [1.0 if ok else 0.0], converged + [True]


def _bath_metadata(bath: BathSpec) -> dict:
    spec = bath.density
    return {
        "nu": repr(spec.exponent),
        "gamma": repr(spec.coupling),
        "ir": repr(spec.ir_cutoff),
        "uv": repr(spec.uv_cutoff),
        "temp": repr(bath.temperature),
    }


def _summarize(table: ScenarioTable) -> ScenarioTable:
    flagged = table.flagged_cells()
    logger.info(
        f"{table.name}: {len(table.rows)} rows, "
        f"{'all converged' if not flagged else f'{len(flagged)} non-converged cells'}"
    )
    return table


# ============================================================================
# Cooper-pair box
# ============================================================================

def cooper_pair_box_bath(params: CooperPairBoxParams) -> BathSpec:
    """
    1/f bath of a Cooper-pair box in natural units.

    gamma = 2 (E_C/hbar)^2 alpha / e^2 with alpha = (noise_amplitude e)^2, so
    gamma has dimension omega^2; with the default parameters gamma ~ 1.16e17.
    """
    charging = units.micro_ev_to_angular(params.charging_energy_uev)
    alpha = (params.noise_amplitude * units.ELEMENTARY_CHARGE) ** 2
    coupling = 2.0 * charging ** 2 * alpha / units.ELEMENTARY_CHARGE ** 2
    density = SpectralDensity(
        exponent=-1.0,
        coupling=coupling,
        ir_cutoff=units.hertz_to_angular(params.ir_cutoff_hz),
        uv_cutoff=units.hertz_to_angular(params.uv_cutoff_hz),
    )
    return BathSpec(density=density, temperature=units.micro_ev_to_angular(params.temperature_uev))


# ============================================================================
# Time series
# ============================================================================

def _closed_form_applies(bath: BathSpec, interval: float) -> bool:
    spec = bath.density
    return spec.exponent == -1 and bath.temperature == 0 and spec.uv_cutoff * interval < math.pi


def time_series(
    bath: BathSpec,
    interval: float,
    max_half_cycles: int,
    config: Optional[QuadratureConfig] = None,
) -> ScenarioTable:
    """
    Gamma_0 and Gamma_P at the cycle completions t = 2 N dt, N = 0..max_half_cycles.

    A closed-form column is added for 1/f baths at T = 0 with uv_cutoff * dt < pi.
    """
    if interval <= 0:
        raise ParameterError(f"interval must be positive, got {interval}")
    if max_half_cycles < 0:
        raise ParameterError(f"max_half_cycles must be nonnegative, got {max_half_cycles}")
    config = config or QuadratureConfig()
    with_closed = _closed_form_applies(bath, interval)

    columns = [Column(label="t"), Column(label="N"), Column(label="gamma_free"), Column(label="gamma_pulsed")]
    if with_closed:
        columns.append(Column(label="gamma_closed"))
    columns += [Column(label="coherence_free"), Column(label="coherence_pulsed"), Column(label="converged")]

    def cell(n: int):
        if n == 0:
            free = pulsed = DecoherenceValue(gamma=0.0, time=0.0)
            closed = DecoherenceValue(gamma=0.0, time=0.0, method="closed_form")
        else:
            schedule = PulseSchedule(interval=interval, half_cycles=n)
            free = gamma_free(bath, schedule.total_time, config)
            pulsed = gamma_pulsed(bath, schedule, config)
            closed = closed_form_value(bath.density, schedule) if with_closed else None
        row = [2 * n * interval, float(n), free.gamma, pulsed.gamma]
        flags = [True, True, free.converged, pulsed.converged]
        if with_closed:
            row.append(closed.gamma)
            flags.append(True)
        row += [free.coherence_magnitude, pulsed.coherence_magnitude]
        flags += [free.converged, pulsed.converged]
        return _flag_row(row, flags)

    cells = _map_cells(cell, range(max_half_cycles + 1))
    metadata = _bath_metadata(bath)
    metadata.update({"dt": repr(interval), "nmax": str(max_half_cycles)})
    return _summarize(ScenarioTable(
        name="time_series",
        columns=columns,
        rows=[row for row, _ in cells],
        flags=[flags for _, flags in cells],
        metadata=metadata,
    ))


def free_curve(
    bath: BathSpec,
    max_time: float,
    points: int = 201,
    config: Optional[QuadratureConfig] = None,
) -> ScenarioTable:
    """Gamma_0 on a uniform grid over [0, max_time], for smooth free-evolution curves."""
    if max_time <= 0 or points < 2:
        raise ParameterError(f"need max_time > 0 and points >= 2, got {max_time}, {points}")
    config = config or QuadratureConfig()

    def cell(t: float):
        free = gamma_free(bath, t, config)
        return _flag_row([t, free.gamma, free.coherence_magnitude], [True, free.converged, free.converged])

    cells = _map_cells(cell, np.linspace(0.0, max_time, points).tolist())
    metadata = _bath_metadata(bath)
    metadata.update({"t": repr(max_time), "points": str(points)})
    return _summarize(ScenarioTable(
        name="free_curve",
        columns=[Column(label="t"), Column(label="gamma_free"), Column(label="coherence_free"),
                 Column(label="converged")],
        rows=[row for row, _ in cells],
        flags=[flags for _, flags in cells],
        metadata=metadata,
    ))


# ============================================================================
# Temperature sweep
# ============================================================================

def temperature_sweep(
    spec_one_over_f: SpectralDensity,
    spec_ohmic: SpectralDensity,
    interval: float,
    time: float,
    temperatures: Optional[Sequence[float]] = None,
    config: Optional[QuadratureConfig] = None,
) -> ScenarioTable:
    """
    Coherence of a 1/f and an Ohmic bath, with and without pulses, against T.

    Raises:
        ParameterError: If time is not 2 N dt for an integer N >= 1
    """
    schedule = PulseSchedule.from_total_time(time, interval)
    temperatures = list(DEFAULT_TEMPERATURES if temperatures is None else temperatures)
    if any(T < 0 for T in temperatures):
        raise ParameterError("temperatures must be nonnegative")
    config = config or QuadratureConfig()
    baths = [BathSpec(density=spec) for spec in (spec_one_over_f, spec_ohmic)]

    def cell(temperature: float):
        values = []
        for base in baths:
            bath = base.at_temperature(temperature)
            values.append((gamma_free(bath, time, config), gamma_pulsed(bath, schedule, config)))
        (free_1f, pulsed_1f), (free_ohm, pulsed_ohm) = values
        row = [
            temperature,
            free_1f.coherence_magnitude,
            pulsed_1f.coherence_magnitude,
            free_ohm.coherence_magnitude,
            pulsed_ohm.coherence_magnitude,
            pulsed_1f.gamma / free_1f.gamma,
            pulsed_ohm.gamma / free_ohm.gamma,
        ]
        flags = [
            True,
            free_1f.converged,
            pulsed_1f.converged,
            free_ohm.converged,
            pulsed_ohm.converged,
            free_1f.converged and pulsed_1f.converged,
            free_ohm.converged and pulsed_ohm.converged,
        ]
        return _flag_row(row, flags)

    cells = _map_cells(cell, temperatures)
    return _summarize(ScenarioTable(
        name="temperature_sweep",
        columns=[
            Column(label="T"),
            Column(label="coherence_free_1f"),
            Column(label="coherence_pulsed_1f"),
            Column(label="coherence_free_ohmic"),
            Column(label="coherence_pulsed_ohmic"),
            Column(label="ratio_1f"),
            Column(label="ratio_ohmic"),
            Column(label="converged"),
        ],
        rows=[row for row, _ in cells],
        flags=[flags for _, flags in cells],
        metadata={
            "dt": repr(interval),
            "t": repr(time),
            "n": str(schedule.half_cycles),
            "gamma": repr(spec_one_over_f.coupling),
            "gamma_ohmic": repr(spec_ohmic.coupling),
            "ir": repr(spec_one_over_f.ir_cutoff),
            "uv": repr(spec_one_over_f.uv_cutoff),
        },
    ))


# ============================================================================
# Interval sweep
# ============================================================================

def interval_sweep(
    spec: SpectralDensity,
    temperature: float,
    time: float,
    half_cycles: Optional[Sequence[int]] = None,
    config: Optional[QuadratureConfig] = None,
) -> ScenarioTable:
    """
    Coherence against the pulse interval dt = t / (2N) at fixed total time.

    Closed-form columns are included for 1/f baths when every dt keeps
    uv_cutoff * dt < pi; the regime column codes 0 valid, 1 marginal, 2 invalid.
    """
    if time <= 0:
        raise ParameterError(f"time must be positive, got {time}")
    half_cycles = list(DEFAULT_HALF_CYCLES if half_cycles is None else half_cycles)
    if not half_cycles or any(int(n) != n or n < 1 for n in half_cycles):
        raise ParameterError(f"half_cycles must be positive integers, got {half_cycles}")
    config = config or QuadratureConfig()
    bath = BathSpec(density=spec, temperature=temperature)
    schedules = [PulseSchedule(interval=time / (2 * int(n)), half_cycles=int(n)) for n in half_cycles]
    with_closed = spec.exponent == -1 and all(
        spec.uv_cutoff * s.interval < math.pi for s in schedules
    )
    free = gamma_free(bath, time, config)

    def cell(schedule: PulseSchedule):
        pulsed = gamma_pulsed(bath, schedule, config)
        row = [
            float(schedule.half_cycles),
            schedule.interval,
            pulsed.gamma,
            pulsed.coherence_magnitude,
            free.coherence_magnitude,
        ]
        flags = [True, True, pulsed.converged, pulsed.converged, free.converged]
        if with_closed:
            closed = closed_form_value(spec, schedule, temperature)
            row += [closed.gamma, closed.coherence_magnitude, float(check_validity(spec, schedule, temperature).code)]
            flags += [True, True, True]
        return _flag_row(row, flags)

    columns = [
        Column(label="N"),
        Column(label="dt"),
        Column(label="gamma_pulsed"),
        Column(label="coherence_pulsed"),
        Column(label="coherence_free"),
    ]
    if with_closed:
        columns += [Column(label="gamma_closed"), Column(label="coherence_closed"), Column(label="regime")]
    columns.append(Column(label="converged"))

    cells = _map_cells(cell, schedules)
    metadata = _bath_metadata(bath)
    metadata.update({"t": repr(time), "gamma_free": repr(free.gamma)})
    return _summarize(ScenarioTable(
        name="interval_sweep",
        columns=columns,
        rows=[row for row, _ in cells],
        flags=[flags for _, flags in cells],
        metadata=metadata,
    ))


# ============================================================================
# Crossover
# ============================================================================

def crossover_interval(
    spec: SpectralDensity,
    temperature: float,
    time: float,
    config: Optional[QuadratureConfig] = None,
) -> CrossoverResult:
    """
    Pulse interval where Gamma_P (continuous dt, total time held at t) meets Gamma_0(t).

    Scans (0, (1 - margin) pi/uv_cutoff] geometrically towards the edge and
    bisects the first sign change to relative width 1e-4. Absence is returned
    as a value with a reason.
    """
    if time <= 0:
        return CrossoverResult(reason=f"t = {time} <= 0: both factors vanish")
    config = config or QuadratureConfig()
    bath = BathSpec(density=spec, temperature=temperature)
    free = gamma_free(bath, time, config).gamma
    if free < 10 * config.abs_tol:
        return CrossoverResult(reason=f"Gamma_0({time:g}) = {free:.3e} is negligible", free_gamma=free)

    edge = math.pi / spec.uv_cutoff
    fractions = 1.0 - np.geomspace(1.0, CROSSOVER_EDGE_MARGIN, CROSSOVER_SCAN_POINTS)[1:]

    def excess(interval: float) -> float:
        return gamma_pulsed_relaxed(bath, interval, time, config).gamma - free

    previous = None
    for fraction in fractions:
        interval = float(fraction * edge)
        value = excess(interval)
        if previous is not None and previous[1] < 0 <= value:
            root = bisect(excess, previous[0], interval, xtol=1e-300, rtol=ROOT_RTOL)
            logger.info(f"crossover at dt = {root:.6e} (uv_cutoff * dt = {root * spec.uv_cutoff:.4f})")
            return CrossoverResult(interval=root, free_gamma=free, reason="continuous-dt relaxation")
        previous = (interval, value)

    return CrossoverResult(
        reason=(
            f"no sign change of Gamma_P - Gamma_0 for uv_cutoff * dt up to "
            f"{math.pi * (1 - CROSSOVER_EDGE_MARGIN):.6g}"
        ),
        free_gamma=free,
    )


# ============================================================================
# Interval solver
# ============================================================================

def _criterion_value(
    bath: BathSpec,
    schedule: PulseSchedule,
    criterion: str,
    config: QuadratureConfig,
) -> Tuple[Optional[float], bool]:
    """Criterion value at schedule (None where the ratio is undefined) and whether its quadratures converged."""
    pulsed = gamma_pulsed(bath, schedule, config)
    if criterion == "residual":
        return residual_decoherence(pulsed), pulsed.converged
    free = gamma_free(bath, schedule.total_time, config)
    if free.gamma < 10 * config.abs_tol:
        logger.debug(f"skipping dt = {schedule.interval:.3e}: Gamma_0 = {free.gamma:.3e} below the division guard")
        return None, free.converged
    return pulsed.gamma / free.gamma, pulsed.converged and free.converged


def solve_interval_for_suppression(
    bath: BathSpec,
    half_cycles: int,
    target: float,
    config: Optional[QuadratureConfig] = None,
    criterion: str = "ratio",
) -> IntervalSolution:
    """
    Pulse interval at which the suppression criterion reaches target.

    Criteria:
        ratio: Gamma_P(N, dt) / Gamma_0(2 N dt) = target
        residual: 1 - exp(-Gamma_P(N, dt)) = target

    The bracket is scanned geometrically over (1e-6, 1] * pi/uv_cutoff and the
    upper end doubled while no sign change shows up, at most up to
    2**SOLVE_MAX_DOUBLINGS * pi/uv_cutoff and only while the quadratures
    converge. The smallest root is returned; multiple_roots is set when the
    scan saw more than one crossing.

    Raises:
        DomainError: If target is not in (0, 1) or criterion is unknown
        NoSolutionError: If no bracket is found within the expansion limit
    """
    if not 0 < target < 1:
        raise DomainError(f"target must lie in (0, 1), got {target}")
    if criterion not in CRITERIA:
        raise DomainError(f"unknown criterion '{criterion}', expected one of {', '.join(CRITERIA)}")
    config = config or QuadratureConfig()

    def measure(interval: float) -> Tuple[Optional[float], bool]:
        schedule = PulseSchedule(interval=interval, half_cycles=half_cycles)
        value, converged = _criterion_value(bath, schedule, criterion, config)
        return (None if value is None else value - target), converged

    edge = math.pi / bath.density.uv_cutoff
    grid = np.geomspace(1e-6 * edge, edge, SOLVE_SCAN_POINTS).tolist()
    samples: List[Tuple[float, float]] = []
    for interval in grid:
        value, _ = measure(interval)
        if value is not None:
            samples.append((interval, value))

    upper = grid[-1]
    for _ in range(SOLVE_MAX_DOUBLINGS):
        if any(a[1] < 0 <= b[1] or a[1] >= 0 > b[1] for a, b in zip(samples, samples[1:])):
            break
        upper *= 2
        value, converged = measure(upper)
        logger.debug(f"expanding bracket to dt = {upper:.3e}")
        if not converged:
            logger.warning(f"quadrature did not converge at dt = {upper:.3e}; bracket expansion stopped")
            break
        if value is not None:
            samples.append((upper, value))

    changes = [
        (a, b) for a, b in zip(samples, samples[1:])
        if (a[1] < 0) != (b[1] < 0)
    ]
    if not changes:
        lower = samples[0] if samples else (grid[0], None)
        last = samples[-1] if samples else (upper, None)
        raise NoSolutionError(
            f"no dt brings the {criterion} criterion to {target}",
            lower=lower[0],
            upper=last[0],
            lower_value=None if lower[1] is None else lower[1] + target,
            upper_value=None if last[1] is None else last[1] + target,
        )

    (a, _), (b, _) = changes[0]

    def objective(interval: float) -> float:
        value, _ = measure(interval)
        if value is None:
            raise NoSolutionError(f"criterion undefined at dt = {interval:.3e} inside the bracket")
        return value

    root = bisect(objective, a, b, xtol=1e-300, rtol=ROOT_RTOL)
    achieved = objective(root) + target
    logger.info(f"solved dt = {root:.6e} ({criterion} = {achieved:.6g}, target {target})")
    return IntervalSolution(
        interval=root,
        criterion=criterion,
        target=target,
        achieved=achieved,
        multiple_roots=len(changes) > 1,
    )
