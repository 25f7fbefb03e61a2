"""Riemannian game dynamics on the probability simplex."""
from .dynamics import DynamicsSpec, speed, vector_field
from .errors import GeoflowError
from .estimator import GameFlow
from .games import PopulationGame, matching_game
from .hessian import HessianPotential, bregman, entropy, potential_p
from .integrator import IntegratorConfig, Trajectory, integrate
from .metrics import MetricField, euclidean, log_barrier, prep, shahshahani
from .scenario import Scenario

__all__ = ["DynamicsSpec", "GameFlow", "GeoflowError", "HessianPotential", "IntegratorConfig", "MetricField",
           "PopulationGame", "Scenario", "Trajectory", "bregman", "entropy", "euclidean", "integrate",
           "log_barrier", "matching_game", "potential_p", "prep", "shahshahani", "speed", "vector_field"]

__version__ = "0.1.0"
