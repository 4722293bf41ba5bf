"""One-dimensional Hughes evacuation model with affine cost.

Particle (follow-the-leader) approximation, a Godunov oracle for the
discontinuous-flux problem, and sweeps over the cost slope and the datum.
"""

from .density import PiecewiseConstantDensity, l1_distance, make_density, total_mass, total_variation
from .ftl import Trajectory, atomize, detect_crossings, evacuation_time, integrate, reconstruct_density
from .model import ModelParams, validate_model
from .turning import turning_index, turning_point

__all__ = [
    "ModelParams", "validate_model", "PiecewiseConstantDensity", "make_density", "total_mass",
    "l1_distance", "total_variation", "turning_point", "turning_index", "atomize", "integrate",
    "reconstruct_density", "evacuation_time", "detect_crossings", "Trajectory",
]
__version__ = "0.1.0"
