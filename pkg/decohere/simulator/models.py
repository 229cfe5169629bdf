"""
Pydantic models for baths, pulse schedules, quadrature settings, results and
scenario tables.

All models are frozen: values are immutable after construction and may be
shared between threads. Natural units (hbar = k_B = 1) throughout; every
frequency is angular. The coupling gamma carries units of omega**(1 - nu) so
that the decoherence factors are dimensionless.
"""

import math
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from . import settings
from .errors import ParameterError


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)


# ============================================================================
# Bath and schedule
# ============================================================================

class SpectralDensity(_Frozen):
    """Power-law bath spectral density I(w) = gamma * w**nu with sudden cutoffs."""
    exponent: float = Field(description="nu; -1 for 1/f, +1 for Ohmic")
    coupling: float = Field(gt=0, description="gamma, units w**(1 - nu)")
    ir_cutoff: float = Field(gt=0)
    uv_cutoff: float

    @model_validator(mode="after")
    def _ordered_cutoffs(self) -> "SpectralDensity":
        if not self.ir_cutoff < self.uv_cutoff:
            raise ValueError(
                f"ir_cutoff ({self.ir_cutoff}) must be below uv_cutoff ({self.uv_cutoff})"
            )
        return self

    def scaled(self, factor: float) -> "SpectralDensity":
        """Same density with the coupling multiplied by factor."""
        return self.model_copy(update={"coupling": self.coupling * factor})


class BathSpec(_Frozen):
    """Spectral density plus bath temperature (T = 0 is exact)."""
    density: SpectralDensity
    temperature: float = Field(default=0.0, ge=0)

    @property
    def thermal_time(self) -> Optional[float]:
        """t_beta = 1/T, undefined (None) at zero temperature."""
        return 1.0 / self.temperature if self.temperature > 0 else None

    def at_temperature(self, temperature: float) -> "BathSpec":
        return BathSpec(density=self.density, temperature=temperature)


class PulseSchedule(_Frozen):
    """Periodic ideal pi-pulses at interval dt, evaluated after N full cycles."""
    interval: float = Field(gt=0, description="pulse interval dt")
    half_cycles: int = Field(ge=1, description="N; total time is 2 N dt")

    @property
    def total_time(self) -> float:
        return 2 * self.half_cycles * self.interval

    @classmethod
    def from_total_time(cls, total_time: float, interval: float, rel_tol: float = 1e-9) -> "PulseSchedule":
        """
        Schedule reaching total_time = 2 N interval.

        Raises:
            ParameterError: If total_time / (2 interval) is not an integer >= 1
        """
        if interval <= 0 or total_time <= 0:
            raise ParameterError(f"total_time ({total_time}) and interval ({interval}) must be positive")
        cycles = total_time / (2 * interval)
        half_cycles = round(cycles)
        if half_cycles < 1 or abs(cycles - half_cycles) > rel_tol * max(1.0, cycles):
            raise ParameterError(
                f"t = {total_time} is not 2*N*dt for integer N >= 1 (dt = {interval}, t/(2 dt) = {cycles})"
            )
        return cls(interval=interval, half_cycles=half_cycles)


class QubitSpec(BaseModel):
    """Qubit level splitting and initial coherence rho_01(0)."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    level_splitting: float = 0.0
    initial_coherence: complex = 1 + 0j

    @field_validator("initial_coherence", mode="before")
    @classmethod
    def _as_complex(cls, value):
        return complex(value)


# ============================================================================
# Quadrature
# ============================================================================

class QuadratureConfig(_Frozen):
    """Tolerances and partition policy for the adaptive panel quadrature."""
    abs_tol: float = Field(default_factory=lambda: settings.DEFAULT_ABS_TOL, gt=0)
    rel_tol: float = Field(default_factory=lambda: settings.DEFAULT_REL_TOL, gt=0)
    max_subdivisions: int = Field(default_factory=lambda: settings.DEFAULT_MAX_SUBDIVISIONS, ge=1)
    oscillation_resolution: int = Field(default_factory=lambda: settings.DEFAULT_OSCILLATION_RESOLUTION, ge=1)

    def tolerance(self, value: float) -> float:
        """Error budget for an integral of the given magnitude."""
        return max(self.abs_tol, self.rel_tol * abs(value))


class IntegralResult(_Frozen):
    value: float
    error_estimate: float = Field(ge=0)
    evaluations: int = Field(ge=0)
    converged: bool


# ============================================================================
# Decoherence values
# ============================================================================

class DecoherenceValue(_Frozen):
    """Decoherence exponent at a given time; coherence_magnitude is |rho_01(t)| / |rho_01(0)| = e^(-gamma)."""
    gamma: float = Field(ge=0)
    time: float = Field(ge=0)
    method: Literal["quadrature", "closed_form"] = "quadrature"
    result: Optional[IntegralResult] = None

    @computed_field
    @property
    def coherence_magnitude(self) -> float:
        return math.exp(-self.gamma)

    @property
    def converged(self) -> bool:
        return self.result is None or self.result.converged


class ApproximationValidity(_Frozen):
    """Regime of the closed-form approximations, with violated conditions."""
    regime: Literal["valid", "marginal", "invalid"]
    reasons: List[str] = Field(default_factory=list)

    @property
    def code(self) -> int:
        return {"valid": 0, "marginal": 1, "invalid": 2}[self.regime]


class CrossoverResult(_Frozen):
    """Pulse interval where pulsed and free decoherence cross, or why none was found."""
    interval: Optional[float] = None
    reason: str = ""
    free_gamma: float = 0.0

    @property
    def found(self) -> bool:
        return self.interval is not None


class IntervalSolution(_Frozen):
    """Pulse interval meeting a suppression target."""
    interval: float = Field(gt=0)
    criterion: Literal["ratio", "residual"]
    target: float
    achieved: float
    multiple_roots: bool = False


# ============================================================================
# Scenario output
# ============================================================================

class Column(_Frozen):
    label: str
    unit: str = "1"


class ScenarioTable(_Frozen):
    """
    Columnar sweep output.

    flags mirrors rows cell by cell (True = converged). Tables built by the
    scenarios module carry a companion `converged` column per row as well.
    """
    name: str
    columns: List[Column]
    rows: List[List[float]] = Field(default_factory=list)
    flags: List[List[bool]] = Field(default_factory=list)
    metadata: Dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _rectangular(self) -> "ScenarioTable":
        width = len(self.columns)
        for index, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {index} has {len(row)} cells, expected {width}")
            if not all(math.isfinite(cell) for cell in row):
                raise ValueError(f"row {index} has a missing (non-finite) cell")
        if self.flags and (
            len(self.flags) != len(self.rows) or any(len(f) != width for f in self.flags)
        ):
            raise ValueError("flags must have the same shape as rows")
        return self

    @property
    def labels(self) -> List[str]:
        return [c.label for c in self.columns]

    def column(self, label: str) -> List[float]:
        index = self.labels.index(label)
        return [row[index] for row in self.rows]

    def flagged_cells(self) -> List[tuple]:
        """(row, column) indices of non-converged cells."""
        return [
            (r, c)
            for r, row in enumerate(self.flags)
            for c, ok in enumerate(row)
            if not ok
        ]


class CooperPairBoxParams(_Frozen):
    """
    Cooper-pair-box parameter set in SI-style units.

    noise_amplitude is the charge-noise amplitude in units of e; the 1/f
    constant is alpha = (noise_amplitude * e)**2.
    """
    charging_energy_uev: float = Field(default=122.0, gt=0)
    noise_amplitude: float = Field(default=1.3e-3, gt=0)
    ir_cutoff_hz: float = Field(default=100.0, gt=0)
    uv_cutoff_hz: float = Field(default=10e9, gt=0)
    temperature_uev: float = Field(default=5.0, gt=0)
    half_cycles: int = Field(default=1, ge=1)


# ============================================================================
# Command line
# ============================================================================

Subcommand = Literal[
    "free", "pulsed", "timeseries", "freecurve", "tsweep",
    "isweep", "crossover", "solve", "presets", "info",
]


class RunConfig(_Frozen):
    """Parsed command line: one subcommand plus every parameter it may use."""
    subcommand: Subcommand
    preset: Optional[str] = None

    # bath (natural units)
    units: Literal["natural", "cpb"] = "natural"
    nu: Optional[float] = None
    gamma: Optional[float] = None
    gamma_ohmic: Optional[float] = None
    ir: Optional[float] = None
    uv: Optional[float] = None
    temp: Optional[float] = None

    # bath (Cooper-pair box, SI-style)
    ec_uev: Optional[float] = None
    alpha_e: Optional[float] = None
    ir_hz: Optional[float] = None
    uv_hz: Optional[float] = None
    kt_uev: Optional[float] = None

    # schedule
    dt: Optional[float] = None
    n: Optional[int] = None
    t: Optional[float] = None
    nmax: Optional[int] = None
    points: Optional[int] = None
    t_grid: Optional[List[float]] = None
    n_list: Optional[List[int]] = None

    # solve
    target: Optional[float] = None
    criterion: Literal["ratio", "residual"] = "ratio"
    closed_form: bool = False

    # quadrature overrides
    abs_tol: Optional[float] = None
    rel_tol: Optional[float] = None
    max_subdivisions: Optional[int] = None
    resolution: Optional[int] = None

    # output
    output: Optional[str] = None
    precision: int = Field(default=9, ge=1, le=17)

    @field_validator("t_grid", "n_list", mode="before")
    @classmethod
    def _split_list(cls, value):
        if isinstance(value, str):
            return [item for item in value.replace(" ", "").split(",") if item]
        return value

    def quadrature(self) -> QuadratureConfig:
        overrides = {
            "abs_tol": self.abs_tol,
            "rel_tol": self.rel_tol,
            "max_subdivisions": self.max_subdivisions,
            "oscillation_resolution": self.resolution,
        }
        return QuadratureConfig(**{k: v for k, v in overrides.items() if v is not None})
