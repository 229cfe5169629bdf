"""
Runtime configuration for the decoherence simulator.

Configuration via environment variables (a .env file is honoured, see main.py):
- DECOHERE_PRESETS_DIR: Directory with preset files (default: packaged presets/)
- DECOHERE_ABS_TOL: Quadrature absolute tolerance (default: 1e-10)
- DECOHERE_REL_TOL: Quadrature relative tolerance (default: 1e-8)
- DECOHERE_MAX_SUBDIVISIONS: Maximum panel bisections per integral (default: 32768)
- DECOHERE_OSCILLATION_RESOLUTION: Mesh points per oscillation period (default: 8)
- DECOHERE_WORKERS: Threads used for sweep cells (default: 1, sequential)
- DECOHERE_LOG_LEVEL: Logging level name (default: WARNING)
"""

from pathlib import Path
from typing import Dict
import os

# ============================================================================
# Configuration
# ============================================================================

PACKAGED_PRESETS_DIR = Path(__file__).parent.parent / "presets"

DEFAULT_ABS_TOL = float(os.getenv("DECOHERE_ABS_TOL", "1e-10"))
DEFAULT_REL_TOL = float(os.getenv("DECOHERE_REL_TOL", "1e-8"))
DEFAULT_MAX_SUBDIVISIONS = int(os.getenv("DECOHERE_MAX_SUBDIVISIONS", str(2 ** 15)))
DEFAULT_OSCILLATION_RESOLUTION = int(os.getenv("DECOHERE_OSCILLATION_RESOLUTION", "8"))

WORKERS = max(1, int(os.getenv("DECOHERE_WORKERS", "1")))
LOG_LEVEL = os.getenv("DECOHERE_LOG_LEVEL", "WARNING").upper()


def presets_dir() -> Path:
    """
    Directory holding preset files.

    Read at call time so DECOHERE_PRESETS_DIR can be changed after import.
    """
    override = os.getenv("DECOHERE_PRESETS_DIR")
    return Path(override) if override else PACKAGED_PRESETS_DIR


# ============================================================================
# Settings Info (for debugging/logging)
# ============================================================================

def get_settings_info() -> Dict[str, str]:
    """Get the effective simulator configuration."""
    return {
        "presets_dir": str(presets_dir()),
        "abs_tol": repr(DEFAULT_ABS_TOL),
        "rel_tol": repr(DEFAULT_REL_TOL),
        "max_subdivisions": str(DEFAULT_MAX_SUBDIVISIONS),
        "oscillation_resolution": str(DEFAULT_OSCILLATION_RESOLUTION),
        "workers": str(WORKERS),
        "log_level": LOG_LEVEL,
    }
