from .differentiation import (
    DiffConfig,
    differentiate,
    fit_polynomial,
    richardson_derivative,
    window_nodes,
)
from .quadrature import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    TransformResult,
    combine,
    integrate_adaptive,
    integrate_log_singular,
    integrate_to_infinity,
)

__all__ = [
    "DEFAULT_QUADRATURE",
    "DiffConfig",
    "QuadratureConfig",
    "TransformResult",
    "combine",
    "differentiate",
    "fit_polynomial",
    "integrate_adaptive",
    "integrate_log_singular",
    "integrate_to_infinity",
    "richardson_derivative",
    "window_nodes",
]
