"""Two-valued (sign-ambiguous) harmonic functions on R^n, n >= 3, branching
along a codimension-2 ellipsoid: construction in modified ellipsoidal
coordinates, far-field quadric asymptotics and their inversion, an n = 3
contour-integral cross-check, and the special-Lagrangian neck limit.
"""

from .asymptotics import (InversionResult, QuadricAsymptote, coefficients,
                          invert, phi_gradient_check, scaling_check)
from .ellipsoidal import (FocalRoots, HalfAxes, SheetPoint, branch_coordinate,
                          focal_roots, from_cartesian, metric_diagonal,
                          metric_orthogonality_report, sym_identity_check,
                          to_cartesian)
from .errors import (BranchProximityError, ContinuationError, NumericFailure,
                     PreconditionError)
from .harmonic import (BranchExpansion, HarmonicFamily, InnerIntegralTable,
                       branch_coefficient, continue_along_path, evaluate,
                       evaluate_at, f0, f0_limit, f2i, gradient,
                       harmonic_family, harmonicity_report)
from .lawlor import (NeckParams, NeckPoint, angle_match, angles,
                     convergence_harness, fiber_nonvanishing, limit_profiles,
                     potential, project, small_angle_params)
from .numerics import (QuadratureResult, fd_laplacian, fd_laplacian_richardson,
                       find_root_bracketed, integrate_finite,
                       integrate_semi_infinite)
from .report import VerificationReport
from .twistor import TwistorParams, compare_to_harmonic
from .twistor import coefficients as twistor_coefficients
from .twistor import evaluate as twistor_evaluate

__version__ = "0.1.0"

__all__ = [
    "BranchExpansion", "BranchProximityError", "ContinuationError",
    "FocalRoots", "HalfAxes", "HarmonicFamily", "InnerIntegralTable",
    "InversionResult",
    "NeckParams", "NeckPoint", "NumericFailure", "PreconditionError",
    "QuadratureResult", "QuadricAsymptote", "SheetPoint",
    "VerificationReport", "TwistorParams",
    "angle_match", "angles", "branch_coefficient", "branch_coordinate",
    "coefficients", "compare_to_harmonic", "continue_along_path",
    "convergence_harness", "evaluate", "evaluate_at", "f0", "f0_limit",
    "f2i", "fd_laplacian", "fd_laplacian_richardson", "fiber_nonvanishing",
    "find_root_bracketed", "focal_roots", "from_cartesian", "gradient",
    "harmonic_family", "harmonicity_report", "integrate_finite",
    "integrate_semi_infinite", "invert", "limit_profiles",
    "metric_diagonal", "metric_orthogonality_report", "phi_gradient_check",
    "potential", "project", "scaling_check", "small_angle_params",
    "sym_identity_check", "to_cartesian", "twistor_coefficients",
    "twistor_evaluate",
]
