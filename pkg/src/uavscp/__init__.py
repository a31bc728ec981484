"""Secure connection probability of a ground link with a UAV jammer and UAV eavesdroppers."""

from .analytic import ScpResult, f_gamma2, interference_limited, s1, s2, s3, scp
from .los import PiecewiseLoS, exact_los_probability, fit_piecewise, piecewise_los_probability, reference_fit
from .mc import McEstimate, simulate_scp
from .scene import ENVIRONMENTS, ConfigError, Environment, NetworkConfig, get_environment, load_config

__all__ = [
    "ENVIRONMENTS", "ConfigError", "Environment", "McEstimate", "NetworkConfig", "PiecewiseLoS",
    "ScpResult", "exact_los_probability", "f_gamma2", "fit_piecewise", "get_environment",
    "interference_limited", "load_config", "piecewise_los_probability", "reference_fit", "s1",
    "s2", "s3", "scp", "simulate_scp",
]

__version__ = "0.1.0"
