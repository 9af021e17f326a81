"""Numerical toolkit for the fractional length and nonlocal curvature of
compact curves in R^n (n >= 3).

Core entry points: ``make_curve`` / ``load_curve`` build curves,
``len_sigma`` and ``limit_sweep`` estimate the window-relative fractional
length, ``kappa_sigma`` / ``el_residual`` estimate the nonlocal curvature
vector, and the ``verify`` module cross-checks the closed-form geometric
factors by finite differences.
"""

__version__ = "0.1.0"

from .curvature import CurvatureResult, el_integrand, el_residual, kappa_sigma
from .curves import Curve, load_curve, make_curve, parse_curve_file, scale_curve, transform_curve
from .discs import (
    Disc,
    DiscClass,
    Hit,
    Window,
    boundary_meets_window,
    canonical_hit,
    classify_disc,
    hyperplane_crossings,
)
from .errors import (
    ConfigError,
    CurveSpecError,
    InvalidDimensionError,
    PreconditionError,
    QuadratureError,
)
from .geometry import ball_volume, measure_uperp2, sample_perp_pair, sphere_area
from .length import EstimatorResult, LimitSweepRow, len_sigma, limit_constant, limit_sweep
from .verify import (
    JacobianReport,
    ManifoldPoint,
    closed_form_jacobian,
    fd_gram_jacobian,
    normal_vector_m,
    verify_lemma_int,
    verify_map,
)

__all__ = [
    "__version__",
    "Curve",
    "CurvatureResult",
    "Disc",
    "DiscClass",
    "EstimatorResult",
    "Hit",
    "JacobianReport",
    "LimitSweepRow",
    "ManifoldPoint",
    "Window",
    "ball_volume",
    "boundary_meets_window",
    "canonical_hit",
    "classify_disc",
    "closed_form_jacobian",
    "ConfigError",
    "CurveSpecError",
    "el_integrand",
    "el_residual",
    "fd_gram_jacobian",
    "hyperplane_crossings",
    "InvalidDimensionError",
    "kappa_sigma",
    "len_sigma",
    "limit_constant",
    "limit_sweep",
    "load_curve",
    "make_curve",
    "measure_uperp2",
    "normal_vector_m",
    "parse_curve_file",
    "PreconditionError",
    "QuadratureError",
    "sample_perp_pair",
    "scale_curve",
    "sphere_area",
    "transform_curve",
    "verify_lemma_int",
    "verify_map",
]
