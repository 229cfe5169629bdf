"""
Adaptive Gauss-Kronrod quadrature for the decoherence integrals.

The band [ir_cutoff, uv_cutoff] is first cut at every removable singularity
(2n+1)pi/dt of the pulsed integrand and at a mesh that resolves the fastest
oscillation cos(w t); panels are then refined by bisecting the one with the
largest error estimate until the global estimate meets the tolerance.
"""

import heapq
import logging
import math
from typing import Callable, List, Optional, Tuple

import numpy as np

from .bath import density_at, thermal_factor
from .errors import DomainError
from .models import BathSpec, IntegralResult, PulseSchedule, QuadratureConfig

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]

# ============================================================================
# Configuration
# ============================================================================

# Half-width of the series band around each pole, in units of omega * dt
GUARD_BAND = 1e-6 * math.pi

# The band also shrinks to GUARD_PHASE / N so N * d stays small inside it
GUARD_PHASE = 1e-3

# Upper bound on the initial mesh; beyond it the mesh is coarsened
MAX_MESH_PANELS = 2 ** 18

# Extra log-spaced points per decade when the band spans more than two decades
POINTS_PER_DECADE = 8

# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.0,
    0.129484966168869693270611432679082,
    0.0,
    0.279705391489276667901467771423780,
    0.0,
    0.381830050505118944950369775488975,
    0.0,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.concatenate([_WG[:-1], _WG[::-1]])

_EPS = np.finfo(float).eps


# ============================================================================
# Partition
# ============================================================================

def singular_points(interval: float, ir_cutoff: float, uv_cutoff: float) -> List[float]:
    """Poles (2n+1)pi/dt of tan^2(w dt/2) strictly inside (ir_cutoff, uv_cutoff)."""
    first = max(0, math.ceil((ir_cutoff * interval / math.pi - 1) / 2))
    points = []
    n = first
    while True:
        omega = (2 * n + 1) * math.pi / interval
        if omega >= uv_cutoff:
            break
        if omega > ir_cutoff:
            points.append(omega)
        n += 1
    return points


def breakpoints(
    interval: Optional[float],
    total_time: float,
    ir_cutoff: float,
    uv_cutoff: float,
    resolution: int = 8,
) -> List[float]:
    """
    Sorted panel edges covering [ir_cutoff, uv_cutoff].

    Args:
        interval: Pulse interval dt, or None for the free integrand (no poles)
        total_time: Time t whose cos(w t) oscillation the mesh must resolve
        ir_cutoff: Lower band edge
        uv_cutoff: Upper band edge
        resolution: Mesh points per oscillation period 2 pi / t

    Returns:
        Endpoints, every interior pole and a uniform mesh of spacing at most
        2 pi / (resolution * t), with near-duplicate points merged
    """
    width = uv_cutoff - ir_cutoff
    panels = 1
    if total_time > 0:
        panels = max(1, math.ceil(width * resolution * total_time / (2 * math.pi)))
    if panels > MAX_MESH_PANELS:
        logger.warning(
            f"Oscillation mesh needs {panels} panels, capping at {MAX_MESH_PANELS}; "
            f"adaptive refinement has to resolve the rest"
        )
        panels = MAX_MESH_PANELS

    pieces = [np.linspace(ir_cutoff, uv_cutoff, panels + 1)]
    decades = math.log10(uv_cutoff / ir_cutoff)
    if decades > 2:
        pieces.append(np.geomspace(ir_cutoff, uv_cutoff, int(POINTS_PER_DECADE * decades) + 1))
    if interval is not None:
        pieces.append(np.asarray(singular_points(interval, ir_cutoff, uv_cutoff)))

    points = np.unique(np.concatenate(pieces))
    points = points[(points >= ir_cutoff) & (points <= uv_cutoff)]
    keep = np.concatenate(([True], np.diff(points) > 1e-12 * uv_cutoff))
    points = points[keep]
    points[0] = ir_cutoff
    points[-1] = uv_cutoff
    return points.tolist()


# ============================================================================
# Integrands
# ============================================================================

def _check_band(bath: BathSpec, omega: np.ndarray) -> None:
    spec = bath.density
    if np.any(omega < spec.ir_cutoff) or np.any(omega > spec.uv_cutoff):
        raise DomainError(
            f"omega outside the band [{spec.ir_cutoff}, {spec.uv_cutoff}]"
        )


def _scalar_or_array(omega, value: np.ndarray):
    return float(value) if np.ndim(omega) == 0 else value


def pulse_kernel(phase: np.ndarray, half_cycles: int) -> np.ndarray:
    """
    [1 - cos(2 N phase)] tan^2(phase / 2) = 2 sin^2(N phase) tan^2(phase / 2).

    Near a pole phase = (2k+1)pi + d the same quantity is 2 sin^2(N d) cot^2(d/2),
    which is used for |d| < pi/2; inside the guard band
    |d| < min(GUARD_BAND, GUARD_PHASE / N) the fourth-order series
    8N^2 [1 - (N^2/3 + 1/6) d^2 + (2N^4/45 + N^2/18 + 1/240) d^4] replaces it.
    The limit at the pole is 8 N^2.
    """
    phase = np.asarray(phase, dtype=float)
    n = float(half_cycles)
    k = np.rint((phase - math.pi) / (2 * math.pi))
    offset = phase - (2 * k + 1) * math.pi
    n2 = n * n
    d2 = offset * offset
    series = 8 * n2 * (1 - (n2 / 3 + 1 / 6) * d2 + (2 * n2 * n2 / 45 + n2 / 18 + 1 / 240) * d2 * d2)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        near = 2 * np.sin(n * offset) ** 2 / np.tan(offset / 2) ** 2
        far = 2 * np.sin(n * phase) ** 2 * np.tan(phase / 2) ** 2
    kernel = np.where(np.abs(offset) < math.pi / 2, near, far)
    band = min(GUARD_BAND, GUARD_PHASE / n)
    return np.where(np.abs(offset) < band, series, kernel)


def regularized_pulsed_integrand(omega, bath: BathSpec, schedule: PulseSchedule):
    """
    Pulsed integrand 4 coth(w/2T) I(w) [1 - cos w t_2N] tan^2(w dt/2) / w^2.

    Finite and continuous across every pole (2n+1)pi/dt: the zero of
    1 - cos(w t_2N) cancels the pole of tan^2, giving 32 N^2 coth I / w^2 there.

    Raises:
        DomainError: If omega lies outside [ir_cutoff, uv_cutoff]
    """
    w = np.asarray(omega, dtype=float)
    _check_band(bath, w)
    kernel = pulse_kernel(w * schedule.interval, schedule.half_cycles)
    value = 4 * thermal_factor(bath.temperature, w) * density_at(bath.density, w) * kernel / (w * w)
    return _scalar_or_array(omega, value)


def relaxed_pulsed_integrand(omega, bath: BathSpec, interval: float, total_time: float):
    """
    Pulsed integrand at an arbitrary total time t (not necessarily 2 N dt).

    Without the cancellation the poles are not removable, so the band must end
    below the first one.

    Raises:
        DomainError: If uv_cutoff * dt >= pi or omega is outside the band
    """
    if bath.density.uv_cutoff * interval >= math.pi:
        raise DomainError(
            f"relaxed pulsed integrand needs uv_cutoff * dt < pi, got {bath.density.uv_cutoff * interval}"
        )
    w = np.asarray(omega, dtype=float)
    _check_band(bath, w)
    oscillation = 2 * np.sin(w * total_time / 2) ** 2
    value = (
        4 * thermal_factor(bath.temperature, w) * density_at(bath.density, w)
        * oscillation * np.tan(w * interval / 2) ** 2 / (w * w)
    )
    return _scalar_or_array(omega, value)


def free_integrand(omega, bath: BathSpec, total_time: float):
    """
    Free-evolution integrand coth(w/2T) [1 - cos w t] I(w) / w^2.

    Raises:
        DomainError: If omega is outside the band or t < 0
    """
    if total_time < 0:
        raise DomainError(f"time must be nonnegative, got {total_time}")
    w = np.asarray(omega, dtype=float)
    _check_band(bath, w)
    oscillation = 2 * np.sin(w * total_time / 2) ** 2
    value = thermal_factor(bath.temperature, w) * oscillation * density_at(bath.density, w) / (w * w)
    return _scalar_or_array(omega, value)


# ============================================================================
# Integration
# ============================================================================

def _gauss_kronrod(f: Integrand, lower: np.ndarray, upper: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """K15 values and QUADPACK error estimates for a batch of panels."""
    center = 0.5 * (lower + upper)
    half = 0.5 * (upper - lower)
    nodes = center[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape)

    kronrod = fx @ KRONROD_WEIGHTS
    gauss = fx @ GAUSS_WEIGHTS
    resabs = np.abs(fx) @ KRONROD_WEIGHTS
    resasc = np.abs(fx - 0.5 * kronrod[:, None]) @ KRONROD_WEIGHTS

    value = half * kronrod
    error = np.abs(half * (kronrod - gauss))
    resabs = np.abs(half) * resabs
    resasc = np.abs(half) * resasc

    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200 * error / resasc) ** 1.5)
    error = np.where((resasc != 0) & (error != 0), scaled, error)
    error = np.maximum(error, 50 * _EPS * resabs)
    return value, error


def integrate(
    f: Integrand,
    points: List[float],
    config: Optional[QuadratureConfig] = None,
    label: str = "integrand",
) -> IntegralResult:
    """
    Adaptive Gauss-Kronrod integration over consecutive panels.

    Args:
        f: Vectorized integrand (array in, array out)
        points: Sorted panel edges (at least two)
        config: Tolerances and bisection budget
        label: Name used in log messages

    Returns:
        IntegralResult; converged is False when max_subdivisions bisections
        did not bring the error estimate under max(abs_tol, rel_tol*|value|)
    """
    config = config or QuadratureConfig()
    edges = np.asarray(points, dtype=float)
    lower, upper = edges[:-1], edges[1:]
    values, errors = _gauss_kronrod(f, lower, upper)
    evaluations = NODES.size * lower.size

    panels = [(float(a), float(b)) for a, b in zip(lower, upper)]
    panel_values = values.tolist()
    panel_errors = errors.tolist()
    heap = [(-e, i) for i, e in enumerate(panel_errors)]
    heapq.heapify(heap)

    bisections = 0
    total = math.fsum(panel_values)
    total_error = math.fsum(panel_errors)
    while bisections < config.max_subdivisions:
        if total_error <= config.tolerance(total):
            # Running sums drift; confirm with exact sums before stopping
            total = math.fsum(panel_values)
            total_error = math.fsum(panel_errors)
            if total_error <= config.tolerance(total):
                break
        _, index = heapq.heappop(heap)
        a, b = panels[index]
        mid = 0.5 * (a + b)
        if not a < mid < b:
            logger.debug(f"{label}: panel [{a}, {b}] is at floating point resolution")
            break
        halves, half_errors = _gauss_kronrod(f, np.array([a, mid]), np.array([mid, b]))
        evaluations += 2 * NODES.size
        bisections += 1

        total += float(halves[0] + halves[1]) - panel_values[index]
        total_error += float(half_errors[0] + half_errors[1]) - panel_errors[index]

        panels[index] = (a, mid)
        panel_values[index] = float(halves[0])
        panel_errors[index] = float(half_errors[0])
        panels.append((mid, b))
        panel_values.append(float(halves[1]))
        panel_errors.append(float(half_errors[1]))
        heapq.heappush(heap, (-panel_errors[index], index))
        heapq.heappush(heap, (-panel_errors[-1], len(panels) - 1))

    total = math.fsum(panel_values)
    total_error = math.fsum(panel_errors)
    converged = total_error <= config.tolerance(total)
    if not converged:
        logger.warning(
            f"{label}: no convergence after {bisections} bisections "
            f"(value={total:.6e}, error estimate={total_error:.3e})"
        )
    return IntegralResult(
        value=total,
        error_estimate=total_error,
        evaluations=evaluations,
        converged=converged,
    )
