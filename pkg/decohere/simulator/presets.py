"""
Preset management for named parameter sets.

Presets are flat key=value files (with `#` comments) stored in
decohere/presets/, or in DECOHERE_PRESETS_DIR when set. Keys are RunConfig
field names; the same parser reads --config files.
"""

from pathlib import Path
from typing import Dict, List

from . import settings
from .errors import ParameterError, PresetNotFoundError


# Preset registry mapping preset IDs to filenames
PRESET_REGISTRY: Dict[str, str] = {
    "fig1-1f": "fig1-1f.cfg",
    "fig1-ohmic": "fig1-ohmic.cfg",
    "fig3": "fig3.cfg",
    "fig4-t10": "fig4-t10.cfg",
    "fig4-t1000": "fig4-t1000.cfg",
    "cpb": "cpb.cfg",
}


def parse_key_values(text: str, source: str = "<string>") -> Dict[str, str]:
    """
    Parse flat key=value lines.

    Blank lines and lines starting with `#` are skipped; trailing `# ...`
    comments are stripped. Keys are normalized to RunConfig field names
    (dashes become underscores).

    Raises:
        ParameterError: On a line without `=` or an empty key
    """
    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{source}:{number}: expected key=value, got '{raw.strip()}'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ParameterError(f"{source}:{number}: empty key")
        values[key.replace("-", "_").lower()] = value
    return values


def load_config_file(path: Path) -> Dict[str, str]:
    """
    Read a key=value config file.

    Raises:
        ParameterError: If the file does not exist or is malformed
    """
    path = Path(path)
    if not path.is_file():
        raise ParameterError(f"Config file not found: {path}")
    return parse_key_values(path.read_text(encoding="utf-8"), source=str(path))


def get_available_presets() -> List[Dict[str, str]]:
    """
    Get list of available presets with their metadata.

    Returns:
        List of dicts: [{"id": "fig1-1f", "file": "...", "exists": "yes"}]
    """
    directory = settings.presets_dir()
    return [
        {
            "id": preset_id,
            "file": filename,
            "exists": "yes" if (directory / filename).exists() else "no",
        }
        for preset_id, filename in PRESET_REGISTRY.items()
    ]


def load_preset(preset_id: str) -> Dict[str, str]:
    """
    Load the parameters of a registered preset.

    Args:
        preset_id: ID of the preset (e.g., "fig1-1f")

    Returns:
        Raw key=value pairs

    Raises:
        PresetNotFoundError: If preset_id is not registered
        ParameterError: If the preset file doesn't exist
    """
    preset_id = preset_id.lower().strip()
    if preset_id not in PRESET_REGISTRY:
        raise PresetNotFoundError(
            f"Unknown preset: '{preset_id}'. "
            f"Available presets: {', '.join(PRESET_REGISTRY.keys())}"
        )

    filepath = settings.presets_dir() / PRESET_REGISTRY[preset_id]
    if not filepath.exists():
        raise ParameterError(f"Preset file not found: {filepath}")
    return load_config_file(filepath)
