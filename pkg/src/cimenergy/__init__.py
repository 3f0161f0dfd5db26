"""Energy and efficiency models for CNN inference on digital, analog and optical processors."""

__version__ = "0.1.0"

from .errors import (CimEnergyError, ConfigurationError, DomainError, InvalidArgumentError,
                     ParseError, UnsupportedWorkloadError)
from .primitives import EnergyRates, GammaConstants, TechProcess, energy_rates, tech_process
from .tally import EnergyTally
from .workload import ConvLayerSpec, MatmulDims, NetworkSpec, read_network, workload_stats

__all__ = [
    "CimEnergyError", "ConfigurationError", "DomainError", "InvalidArgumentError",
    "ParseError", "UnsupportedWorkloadError", "EnergyRates", "GammaConstants",
    "TechProcess", "energy_rates", "tech_process", "EnergyTally", "ConvLayerSpec",
    "MatmulDims", "NetworkSpec", "read_network", "workload_stats",
]
