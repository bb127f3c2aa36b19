"""
Higher-order-operator cavity optomechanics: Langevin coefficient matrices,
steady states, noise spectra, resonance shifts and stability maps.
"""

__version__ = "1.0.0"


# This section allows us to import using e.g. `from optomech import OmParams`,
# rather than `from optomech.parameters import OmParams`.

from .configdict import ConfigDict
from .formalisms import CoeffSystem, Formalism, build_system
from .frozen import Frozen, FrozenMeta
from .logging import OmLogger
from .parameters import OmParams, derive_rates, params_from_fixture
from .runner import SweepRunner
from .spectra import FrequencyGrid, SpectrumResult
from .stability import Stability, StabilityMap, phase_map
from .steady import SteadyState, state_from_nbar, steady_state
from .timedomain import PulseResult, evolve_pulsed

__all__ = [
    "CoeffSystem",
    "ConfigDict",
    "Formalism",
    "FrequencyGrid",
    "Frozen",
    "FrozenMeta",
    "OmLogger",
    "OmParams",
    "PulseResult",
    "SpectrumResult",
    "Stability",
    "StabilityMap",
    "SteadyState",
    "SweepRunner",
    "build_system",
    "derive_rates",
    "evolve_pulsed",
    "params_from_fixture",
    "phase_map",
    "state_from_nbar",
    "steady_state"
]
