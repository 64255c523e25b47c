"""Quasi-potentials of boundary-driven conservation laws.

Static functionals, fluctuation paths built from entropy solutions and their
reversals, a discrete action, and verification suites.
"""
from .model import asep, classify, cubic, load_model, make_spec, stationary_set
from .fields import Profile, SpaceTimeField
from .staticfn import optimal_F, quasi_potential_static
from .action import total_action
from .paths import build_path

__all__ = ["asep", "classify", "cubic", "load_model", "make_spec", "stationary_set", "Profile",
           "SpaceTimeField", "optimal_F", "quasi_potential_static", "total_action", "build_path"]
__version__ = "0.1.0"
