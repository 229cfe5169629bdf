import os

import hypothesis
import numpy as np
import pytest

from decohere.simulator.models import BathSpec, QuadratureConfig, SpectralDensity

np.seterr(all="warn")

hypothesis.settings.register_profile("ci", max_examples=25, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture
def one_over_f():
    """1/f density of the fig1-1f preset."""
    return SpectralDensity(exponent=-1, coupling=0.25, ir_cutoff=1.0, uv_cutoff=80.0)


@pytest.fixture
def ohmic():
    """Ohmic density of the fig1-ohmic preset."""
    return SpectralDensity(exponent=1, coupling=0.05, ir_cutoff=1.0, uv_cutoff=10.0)


@pytest.fixture
def one_over_f_bath(one_over_f):
    return BathSpec(density=one_over_f, temperature=0.0)


@pytest.fixture
def ohmic_bath(ohmic):
    return BathSpec(density=ohmic, temperature=0.0)


@pytest.fixture
def fig4_one_over_f():
    return SpectralDensity(exponent=-1, coupling=0.5, ir_cutoff=0.01, uv_cutoff=100.0)


@pytest.fixture
def fig4_ohmic():
    return SpectralDensity(exponent=1, coupling=0.5, ir_cutoff=0.01, uv_cutoff=100.0)


@pytest.fixture
def quad():
    return QuadratureConfig()
