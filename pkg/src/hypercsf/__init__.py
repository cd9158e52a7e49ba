"""Curve shortening flow solitons on the hyperbolic plane.

Integration of the reduced three-dimensional system, reconstruction of the
curves on the hyperboloid, their isometric and direct flows, qualitative
diagnostics, and the disk and half-plane models.
"""
__version__ = "0.1.0"

from .errors import HyperCSFError, InputError, NumericalError
from .minkowski import CausalKind, IsometryKind, classify, lorentz_cross, minkowski_inner
from .soliton_ode import FamilyKind, SolitonParams, Trajectory, integrate, integrate_state
from .frame import FramedCurve, reconstruct
from .analysis import qualitative_report

__all__ = [
    "CausalKind", "FamilyKind", "FramedCurve", "HyperCSFError", "InputError",
    "IsometryKind", "NumericalError", "SolitonParams", "Trajectory", "classify",
    "integrate", "integrate_state", "lorentz_cross", "minkowski_inner",
    "qualitative_report", "reconstruct",
]
