from .fitting import DecayFit, fit_decay
from .linalg import SingularSystemError, solve_linear_system
from .quadrature import QuadratureError, adaptive_integrate, improper_integrate
from .radial import (
    GridTooCoarseError,
    LogPowerSeries,
    RadialGrid,
    RadialProfile,
    SumSource,
    apply_radial_polyharmonic,
    integration_by_parts_gap,
    laplacian_expansion,
)
from .piecewise import PiecewiseBall, solve_piecewise_dirichlet
from .spectral import BallPoly, RadialGradient, dirichlet_energy, solve_polyharmonic_dirichlet

__all__ = [
    "BallPoly",
    "DecayFit",
    "GridTooCoarseError",
    "LogPowerSeries",
    "PiecewiseBall",
    "QuadratureError",
    "RadialGradient",
    "RadialGrid",
    "RadialProfile",
    "SingularSystemError",
    "SumSource",
    "adaptive_integrate",
    "apply_radial_polyharmonic",
    "dirichlet_energy",
    "fit_decay",
    "improper_integrate",
    "integration_by_parts_gap",
    "laplacian_expansion",
    "solve_linear_system",
    "solve_piecewise_dirichlet",
    "solve_polyharmonic_dirichlet",
]
