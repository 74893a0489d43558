"""Truncated planar moment problems and exponential kernels of planar shapes."""

__version__ = "0.1.0"

from .kernel import (  # noqa: E402
    Annulus,
    Disk,
    PreconditionError,
    closed_form_kernel,
    eval_exponential_kernel,
    transform_kernel,
)
from .lproblem import (  # noqa: E402
    LProblemConfig,
    chebyshev_bounds,
    critical_L,
    extremal_reconstruct,
    krein_margin,
    moments_of_sign,
    normalize_bounds,
)
from .quadrature import QuadratureConfig, compute_moments, integrate_region  # noqa: E402
from .semialgebraic import MomentVector, Poly2, SemiAlgebraicSet, X, Y  # noqa: E402

__all__ = [
    "Annulus",
    "Disk",
    "LProblemConfig",
    "MomentVector",
    "Poly2",
    "PreconditionError",
    "QuadratureConfig",
    "SemiAlgebraicSet",
    "X",
    "Y",
    "__version__",
    "chebyshev_bounds",
    "closed_form_kernel",
    "compute_moments",
    "critical_L",
    "eval_exponential_kernel",
    "extremal_reconstruct",
    "integrate_region",
    "krein_margin",
    "moments_of_sign",
    "normalize_bounds",
    "transform_kernel",
]
