"""Dressed-state description of strongly driven tunneling doublets.

The analytic side lives in :mod:`.four_level`; the exact numerical
experiment (quartic double well, truncated-basis propagation) in
:mod:`.quartic` and :mod:`.propagator`.
"""
from .config import ExperimentConfig, parse_config
from .errors import ConfigError, ConvergenceError, GaugeError, NumericalError
from .four_level import (
    BareParams,
    RenormalizedParams,
    analytic_amplitudes,
    compose_solution,
    renormalize,
    validate_regime,
)
from .experiment import ExperimentResult, run_experiment
from .propagator import DriveConfig, PopulationSeries, propagate, propagate_four_level
from .quartic import QuarticConfig, Spectrum, extract_four_level, solve_spectrum

__version__ = "0.1.0"

__all__ = [
    "BareParams",
    "ConfigError",
    "ConvergenceError",
    "DriveConfig",
    "ExperimentConfig",
    "ExperimentResult",
    "GaugeError",
    "NumericalError",
    "PopulationSeries",
    "QuarticConfig",
    "RenormalizedParams",
    "Spectrum",
    "analytic_amplitudes",
    "compose_solution",
    "extract_four_level",
    "parse_config",
    "propagate",
    "propagate_four_level",
    "renormalize",
    "run_experiment",
    "solve_spectrum",
    "validate_regime",
]
