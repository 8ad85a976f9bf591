"""dampo: exact-diagonalisation toolkit for the damped quantum oscillator.

Units: hbar = k_B = 1 throughout; one frequency unit is chosen per run and
the mass is an explicit parameter.
"""

from ._core import backend_name
from .bath import MemoryKernel, OhmicBath
from .dynamics import EvolutionSeries
from .fano import CouplingSpectrum, FanoCoefficients
from .oracle import DiscreteBath
from .spectral import (
    OscillatorParams,
    ParametricDensity,
    SpectralDensity,
    TabulatedDensity,
    ValidationReport,
    make_parametric_density,
)
from .states import DiagonalForm, GaussianState

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "MemoryKernel",
    "OhmicBath",
    "EvolutionSeries",
    "CouplingSpectrum",
    "FanoCoefficients",
    "DiscreteBath",
    "OscillatorParams",
    "ParametricDensity",
    "SpectralDensity",
    "TabulatedDensity",
    "ValidationReport",
    "make_parametric_density",
    "GaussianState",
    "DiagonalForm",
    "__version__",
]
