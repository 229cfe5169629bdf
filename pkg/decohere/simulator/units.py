"""
SI constants and conversions into natural units (hbar = k_B = 1).

Frequencies in the core are angular (rad/s once converted); energies and
temperatures become angular frequencies through hbar. This is the only module
that knows about SI.
"""

import math

import scipy.constants as const

# CODATA values
HBAR = const.hbar                   # J s
ELEMENTARY_CHARGE = const.e         # C
BOLTZMANN = const.k                 # J/K
ELECTRON_VOLT = const.electron_volt  # J
MICRO_ELECTRON_VOLT = const.micro * ELECTRON_VOLT


def energy_to_angular(energy_joule: float) -> float:
    """Energy E in joule -> E/hbar in rad/s."""
    return energy_joule / HBAR


def micro_ev_to_angular(energy_uev: float) -> float:
    """Energy in micro-electron-volt -> rad/s (1 ueV ~ 1.519e9 rad/s)."""
    return energy_to_angular(energy_uev * MICRO_ELECTRON_VOLT)


def hertz_to_angular(frequency_hz: float) -> float:
    """Cyclic frequency in Hz -> angular frequency in rad/s."""
    return 2.0 * math.pi * frequency_hz


def kelvin_to_angular(temperature_k: float) -> float:
    """Temperature in kelvin -> k_B T / hbar in rad/s."""
    return BOLTZMANN * temperature_k / HBAR
