"""Planar orthogonal polynomials for Gaussian weights with point singularities,
and the equivalent multiple orthogonal polynomials of type II."""
from .errors import PlanarMOPError
from .moments import MomentTables
from .polynomials import solve_multiple, solve_planar, staircase
from .weight import WeightConfig, load_config, validate_config

__all__ = [
    "MomentTables",
    "PlanarMOPError",
    "WeightConfig",
    "load_config",
    "solve_multiple",
    "solve_planar",
    "staircase",
    "validate_config",
]
__version__ = "0.1.0"
