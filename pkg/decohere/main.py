"""
Command-line front end for the decoherence simulator.
Parses parameters, presets and config files, dispatches to single evaluations
and scenarios, and writes CSV.

Usage:
    python -m decohere.main free --nu -1 --gamma 0.25 --ir 1 --uv 80 --temp 0 --t 5
    python -m decohere.main timeseries --preset fig1-1f --output fig1.csv
    python -m decohere.main solve --preset cpb

Exit codes: 0 success, 2 invalid parameters, 3 quadrature non-convergence in a
single evaluation, 4 I/O failure.
"""

# Load environment variables from .env file
from dotenv import load_dotenv
load_dotenv()

import argparse
import logging
import sys
from typing import Callable, Dict, List, NamedTuple, Optional, TextIO

from pydantic import ValidationError

from .simulator import settings
from .simulator.closed_form import check_validity, closed_form_value
from .simulator.decoherence import gamma_free, gamma_pulsed
from .simulator.errors import DecohereError, ParameterError
from .simulator.models import (
    BathSpec,
    Column,
    CooperPairBoxParams,
    PulseSchedule,
    RunConfig,
    ScenarioTable,
    SpectralDensity,
)
from .simulator.presets import get_available_presets, load_config_file, load_preset
from .simulator.scenarios import (
    cooper_pair_box_bath,
    crossover_interval,
    free_curve,
    interval_sweep,
    solve_interval_for_suppression,
    temperature_sweep,
    time_series,
)

logger = logging.getLogger("decohere")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_CONVERGED = 3
EXIT_IO = 4


class Outcome(NamedTuple):
    """Result of a subcommand: a table to write or plain text, and convergence."""
    table: Optional[ScenarioTable] = None
    text: Optional[str] = None
    converged: bool = True


# ============================================================================
# Argument parsing
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decohere",
        description="Qubit dephasing under periodic pi-pulse decoupling for power-law boson baths",
    )
    parser.add_argument("subcommand", choices=list(COMMANDS.keys()))
    parser.add_argument("--preset", help="Named parameter set (see the 'presets' subcommand)")
    parser.add_argument("--config", help="key=value file; overrides the preset, flags override it")

    bath = parser.add_argument_group("bath (natural units, hbar = k_B = 1)")
    bath.add_argument("--units", choices=["natural", "cpb"])
    bath.add_argument("--nu", type=float, help="Spectral exponent (-1 for 1/f, 1 for Ohmic)")
    bath.add_argument("--gamma", type=float, help="Coupling, units w^(1 - nu)")
    bath.add_argument("--gamma-ohmic", type=float, help="Ohmic coupling for tsweep (default: --gamma)")
    bath.add_argument("--ir", type=float, help="Infrared cutoff")
    bath.add_argument("--uv", type=float, help="Ultraviolet cutoff")
    bath.add_argument("--temp", type=float, help="Temperature (0 is exact)")

    cpb = parser.add_argument_group("Cooper-pair box (used with --units cpb)")
    cpb.add_argument("--ec-uev", type=float, help="Charging energy in micro-eV")
    cpb.add_argument("--alpha-e", type=float, help="Charge-noise amplitude in units of e")
    cpb.add_argument("--ir-hz", type=float, help="Infrared cutoff in Hz")
    cpb.add_argument("--uv-hz", type=float, help="Ultraviolet cutoff in Hz")
    cpb.add_argument("--kt-uev", type=float, help="k_B T in micro-eV")

    schedule = parser.add_argument_group("schedule")
    schedule.add_argument("--dt", type=float, help="Pulse interval")
    schedule.add_argument("--n", type=int, help="Half-cycle count N (t = 2 N dt)")
    schedule.add_argument("--t", type=float, help="Total time")
    schedule.add_argument("--nmax", type=int, help="Largest N for timeseries")
    schedule.add_argument("--points", type=int, help="Grid points for freecurve")
    schedule.add_argument("--t-grid", help="Comma-separated temperatures for tsweep")
    schedule.add_argument("--n-list", help="Comma-separated N values for isweep")

    solve = parser.add_argument_group("solve / closed form")
    solve.add_argument("--target", type=float, help="Suppression target in (0, 1)")
    solve.add_argument("--criterion", choices=["ratio", "residual"])
    solve.add_argument("--closed-form", action="store_true", default=None,
                       help="Also evaluate the 1/f closed form (pulsed)")

    quad = parser.add_argument_group("quadrature")
    quad.add_argument("--abs-tol", type=float)
    quad.add_argument("--rel-tol", type=float)
    quad.add_argument("--max-subdivisions", type=int)
    quad.add_argument("--resolution", type=int, help="Mesh points per oscillation period")

    output = parser.add_argument_group("output")
    output.add_argument("--output", help="CSV path (default: stdout)")
    output.add_argument("--precision", type=int, help="Significant digits (default: 9)")
    return parser


def parse_args(argv: Optional[List[str]] = None) -> RunConfig:
    """
    Build a RunConfig from flags, an optional config file and an optional preset.

    Precedence: flags > config file > preset > defaults.

    Raises:
        SystemExit: On unknown flags or malformed values (argparse, code 2)
        ParameterError: On unknown keys in a preset or config file
        ValidationError: On values violating RunConfig constraints
    """
    namespace = vars(build_parser().parse_args(argv))
    config_path = namespace.pop("config")
    flags = {k: v for k, v in namespace.items() if v is not None}

    file_values = load_config_file(config_path) if config_path else {}
    preset_id = flags.get("preset") or file_values.get("preset")
    preset_values = load_preset(preset_id) if preset_id else {}

    allowed = set(RunConfig.model_fields)
    for source, values in (("preset", preset_values), ("config file", file_values)):
        unknown = sorted(set(values) - allowed)
        if unknown:
            raise ParameterError(f"unknown key(s) in {source}: {', '.join(unknown)}")

    merged: Dict[str, object] = {**preset_values, **file_values, **flags}
    return RunConfig(**merged)


# ============================================================================
# CSV output
# ============================================================================

def format_number(value: float, precision: int) -> str:
    """Scientific notation with `precision` significant digits and a bare exponent (8.416e-4)."""
    mantissa, exponent = f"{value:.{precision - 1}e}".split("e")
    return f"{mantissa}e{int(exponent)}"


def _format_setting(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ",".join(_format_setting(item) for item in value)
    return str(value)


def metadata_line(config: RunConfig) -> str:
    """`# key=value ...` line with every set parameter (the output path excluded)."""
    pairs = [
        f"{name}={_format_setting(value)}"
        for name, value in config.model_dump().items()
        if value is not None and name != "output"
    ]
    return "# " + " ".join(pairs)


def parse_metadata_line(line: str) -> RunConfig:
    """Rebuild the RunConfig recorded in a metadata line."""
    body = line.strip()
    if not body.startswith("#"):
        raise ParameterError(f"not a metadata line: '{line.strip()}'")
    values = dict(pair.split("=", 1) for pair in body.lstrip("#").split())
    return RunConfig(**values)


def emit_csv(
    table: ScenarioTable,
    sink: TextIO,
    config: Optional[RunConfig] = None,
    precision: Optional[int] = None,
) -> int:
    """
    Write a table as CSV.

    Layout: header `label (unit),...`; parameter line `# key=value ...`;
    table metadata line; data rows; `# converged: all` or
    `# non-converged: (row,col) ...`. An empty table writes the header only.
    Lines end with LF.

    Returns:
        Number of bytes written (UTF-8)
    """
    if precision is None:
        precision = config.precision if config else 9
    lines = [",".join(f"{c.label} ({c.unit})" for c in table.columns)]
    if table.rows:
        if config is not None:
            lines.append(metadata_line(config))
        if table.metadata:
            lines.append(
                f"# table={table.name} "
                + " ".join(f"{k}={v}" for k, v in sorted(table.metadata.items()))
            )
        lines.extend(",".join(format_number(cell, precision) for cell in row) for row in table.rows)
        flagged = table.flagged_cells()
        if flagged:
            lines.append("# non-converged: " + " ".join(f"({r},{c})" for r, c in flagged))
        else:
            lines.append("# converged: all")

    text = "\n".join(lines) + "\n"
    sink.write(text)
    return len(text.encode("utf-8"))


# ============================================================================
# Parameter assembly
# ============================================================================

def _require(config: RunConfig, *names: str) -> None:
    missing = [name for name in names if getattr(config, name) is None]
    if missing:
        flags = ", ".join("--" + name.replace("_", "-") for name in missing)
        raise ParameterError(f"{config.subcommand} needs {flags}")


def _density(config: RunConfig, exponent: Optional[float] = None, coupling: Optional[float] = None) -> SpectralDensity:
    _require(config, "ir", "uv")
    if exponent is None:
        _require(config, "nu")
    if coupling is None:
        _require(config, "gamma")
    return SpectralDensity(
        exponent=config.nu if exponent is None else exponent,
        coupling=config.gamma if coupling is None else coupling,
        ir_cutoff=config.ir,
        uv_cutoff=config.uv,
    )


def _cpb_params(config: RunConfig) -> CooperPairBoxParams:
    fields = {
        "charging_energy_uev": config.ec_uev,
        "noise_amplitude": config.alpha_e,
        "ir_cutoff_hz": config.ir_hz,
        "uv_cutoff_hz": config.uv_hz,
        "temperature_uev": config.kt_uev,
        "half_cycles": config.n,
    }
    return CooperPairBoxParams(**{k: v for k, v in fields.items() if v is not None})


def _bath(config: RunConfig) -> BathSpec:
    if config.units == "cpb":
        return cooper_pair_box_bath(_cpb_params(config))
    return BathSpec(density=_density(config), temperature=config.temp or 0.0)


def _schedule(config: RunConfig) -> PulseSchedule:
    _require(config, "dt")
    if config.n is not None:
        return PulseSchedule(interval=config.dt, half_cycles=config.n)
    _require(config, "t")
    return PulseSchedule.from_total_time(config.t, config.dt)


# ============================================================================
# Subcommands
# ============================================================================

def cmd_free(config: RunConfig) -> Outcome:
    _require(config, "t")
    bath = _bath(config)
    value = gamma_free(bath, config.t, config.quadrature())
    table = ScenarioTable(
        name="free",
        columns=[Column(label="t"), Column(label="gamma_free"), Column(label="coherence_free")],
        rows=[[config.t, value.gamma, value.coherence_magnitude]],
        flags=[[True, value.converged, value.converged]],
    )
    return Outcome(table=table, converged=value.converged)


def cmd_pulsed(config: RunConfig) -> Outcome:
    bath = _bath(config)
    schedule = _schedule(config)
    closed = None
    if config.closed_form:
        closed = closed_form_value(bath.density, schedule, bath.temperature)
    value = gamma_pulsed(bath, schedule, config.quadrature())

    columns = [Column(label="N"), Column(label="dt"), Column(label="t"),
               Column(label="gamma_pulsed"), Column(label="coherence_pulsed")]
    row = [float(schedule.half_cycles), schedule.interval, schedule.total_time,
           value.gamma, value.coherence_magnitude]
    if closed is not None:
        columns += [Column(label="gamma_closed"), Column(label="coherence_closed"), Column(label="regime")]
        row += [closed.gamma, closed.coherence_magnitude,
                float(check_validity(bath.density, schedule, bath.temperature).code)]
    flags = [True] * len(row)
    flags[3] = flags[4] = value.converged
    table = ScenarioTable(name="pulsed", columns=columns, rows=[row], flags=[flags])
    return Outcome(table=table, converged=value.converged)


def cmd_timeseries(config: RunConfig) -> Outcome:
    _require(config, "dt", "nmax")
    bath = _bath(config)
    return Outcome(table=time_series(bath, config.dt, config.nmax, config.quadrature()))


def cmd_freecurve(config: RunConfig) -> Outcome:
    _require(config, "t")
    bath = _bath(config)
    return Outcome(table=free_curve(bath, config.t, config.points or 201, config.quadrature()))


def cmd_tsweep(config: RunConfig) -> Outcome:
    _require(config, "dt", "t", "gamma")
    spec_one_over_f = _density(config, exponent=-1.0)
    spec_ohmic = _density(config, exponent=1.0, coupling=config.gamma_ohmic or config.gamma)
    table = temperature_sweep(
        spec_one_over_f, spec_ohmic, config.dt, config.t, config.t_grid, config.quadrature()
    )
    return Outcome(table=table)


def cmd_isweep(config: RunConfig) -> Outcome:
    _require(config, "t")
    spec = _density(config)
    table = interval_sweep(spec, config.temp or 0.0, config.t, config.n_list, config.quadrature())
    return Outcome(table=table)


def cmd_crossover(config: RunConfig) -> Outcome:
    _require(config, "t")
    spec = _density(config)
    result = crossover_interval(spec, config.temp or 0.0, config.t, config.quadrature())
    rows = []
    if result.found:
        rows = [[result.interval, result.interval * spec.uv_cutoff, result.free_gamma]]
    else:
        logger.warning(f"no crossover: {result.reason}")
    table = ScenarioTable(
        name="crossover",
        columns=[Column(label="dt_crossover"), Column(label="uv_dt"), Column(label="gamma_free")],
        rows=rows,
        flags=[[True] * 3 for _ in rows],
        metadata={"continuous_dt_relaxation": "true"},
    )
    return Outcome(table=table)


def cmd_solve(config: RunConfig) -> Outcome:
    _require(config, "target")
    bath = _bath(config)
    solution = solve_interval_for_suppression(
        bath, config.n or 1, config.target, config.quadrature(), config.criterion
    )
    table = ScenarioTable(
        name="solve",
        columns=[Column(label="dt"), Column(label="achieved"), Column(label="target"),
                 Column(label="multiple_roots")],
        rows=[[solution.interval, solution.achieved, solution.target, float(solution.multiple_roots)]],
        flags=[[True] * 4],
        metadata={"criterion": solution.criterion},
    )
    return Outcome(table=table)


def cmd_presets(config: RunConfig) -> Outcome:
    lines = [f"{p['id']}\t{p['file']}\t{p['exists']}" for p in get_available_presets()]
    return Outcome(text="\n".join(lines) + "\n")


def cmd_info(config: RunConfig) -> Outcome:
    lines = [f"{key}={value}" for key, value in settings.get_settings_info().items()]
    return Outcome(text="\n".join(lines) + "\n")


# Subcommand registry
COMMANDS: Dict[str, Callable[[RunConfig], Outcome]] = {
    "free": cmd_free,
    "pulsed": cmd_pulsed,
    "timeseries": cmd_timeseries,
    "freecurve": cmd_freecurve,
    "tsweep": cmd_tsweep,
    "isweep": cmd_isweep,
    "crossover": cmd_crossover,
    "solve": cmd_solve,
    "presets": cmd_presets,
    "info": cmd_info,
}

SINGLE_EVALUATIONS = {"free", "pulsed"}


# ============================================================================
# Entry point
# ============================================================================

def _write(outcome: Outcome, config: RunConfig) -> None:
    def write_to(sink: TextIO) -> None:
        if outcome.table is not None:
            emit_csv(outcome.table, sink, config)
        else:
            sink.write(outcome.text or "")

    if config.output:
        with open(config.output, "w", encoding="utf-8", newline="") as sink:
            write_to(sink)
    else:
        write_to(sys.stdout)


def run(config: RunConfig) -> int:
    """
    Execute a parsed configuration.

    Returns:
        Exit code: 0 success, 2 invalid parameters, 3 non-convergence of a
        single evaluation, 4 I/O failure
    """
    try:
        outcome = COMMANDS[config.subcommand](config)
        _write(outcome, config)
    except (ValidationError, DecohereError) as e:
        logger.error(f"invalid parameters: {e}")
        return EXIT_INVALID
    except OSError as e:
        logger.error(f"I/O failure: {e}")
        return EXIT_IO

    if config.subcommand in SINGLE_EVALUATIONS and not outcome.converged:
        logger.error("quadrature did not converge; the value written is the best estimate")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL, logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INVALID
    except (ValidationError, DecohereError) as e:
        logger.error(f"invalid parameters: {e}")
        return EXIT_INVALID
    except OSError as e:
        logger.error(f"I/O failure: {e}")
        return EXIT_IO
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
