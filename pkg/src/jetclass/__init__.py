"""Jet classification of singular points of planar vector fields."""

__version__ = "0.1.0"

from .classify import (ClassLabel, LinearClass, Tolerances, bt_reduce, classify_germ, classify_linear,
                       focus_values, rotation_normalize, sn_normal_form, sn_reduce)
from .centralizer import ad_matrix, centralizer_dim, orbit_codim
from .degeneracy import (gk_point_bound, gk_sum_bound, imag_resultant, multiplicity,
                         nonhyperbolic_test)
from .errors import (BackendMismatchError, InsufficientOrderError, JetError, PreconditionError,
                     SingularLinearPartError)
from .family import FamilySpec, GridSpec, ScanSettings, audit_main_theorem, scan, singular_points_at
from .jets import DiffeoJet, JetBasisIndex, PolyVF, bracket, compose, invert_jet, pushforward

__all__ = [
    "__version__",
    "PolyVF", "DiffeoJet", "JetBasisIndex", "bracket", "pushforward", "compose", "invert_jet",
    "ClassLabel", "LinearClass", "Tolerances", "classify_linear", "rotation_normalize",
    "focus_values", "sn_reduce", "sn_normal_form", "bt_reduce", "classify_germ",
    "ad_matrix", "centralizer_dim", "orbit_codim",
    "nonhyperbolic_test", "imag_resultant", "multiplicity", "gk_point_bound", "gk_sum_bound",
    "FamilySpec", "GridSpec", "ScanSettings", "singular_points_at", "scan", "audit_main_theorem",
    "JetError", "BackendMismatchError", "SingularLinearPartError", "PreconditionError",
    "InsufficientOrderError",
]
