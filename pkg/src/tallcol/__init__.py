"""Tallest self-supporting column.

The optimal area profile is found by peeling the similarity singularity
at the tip, shooting backward along the stable manifold of the resulting
autonomous system, and reconstructing ``a, b, theta``. An independent
Sturm-Liouville discretization checks the result.
"""
__version__ = "0.1.0"

from .dynamics import AsState, BoundaryKind  # noqa: E402
from .oracle import DiscreteShape, optimality_residual, sturm_liouville_lambda, torque_residual  # noqa: E402
from .reconstruct import ColumnProfile, MaterialSpec, dimensional_design, profile, volume  # noqa: E402
from .shooting import (  # noqa: E402
    NoCrossing,
    ShootingError,
    ShootingOptions,
    Solution,
    StepFailure,
    integrate_backward,
    lambda_sensitivity,
    richardson_extrapolate,
)

__all__ = [
    "__version__",
    "AsState",
    "BoundaryKind",
    "ColumnProfile",
    "DiscreteShape",
    "MaterialSpec",
    "NoCrossing",
    "ShootingError",
    "ShootingOptions",
    "Solution",
    "StepFailure",
    "dimensional_design",
    "integrate_backward",
    "lambda_sensitivity",
    "optimality_residual",
    "profile",
    "richardson_extrapolate",
    "sturm_liouville_lambda",
    "torque_residual",
    "volume",
]
