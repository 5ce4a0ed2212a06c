"""Self-induced back-action optical trapping in nanophotonic cavities."""

__version__ = "0.1.0"

from .model import (CavityMode, ModeProfile, NumericsError, ParticleSpec,
                    SIBlock, TrapConfiguration, UnitSystem, ValidationError,
                    config_from_dict, config_to_dict, load_config,
                    validate_configuration)

__all__ = [
    "CavityMode", "ModeProfile", "NumericsError", "ParticleSpec", "SIBlock",
    "TrapConfiguration", "UnitSystem", "ValidationError", "config_from_dict",
    "config_to_dict", "load_config", "validate_configuration", "__version__",
]
