"""Direct and inverse conversion formulas for Khabibullin's integral
inequalities, with a numerical checker for the conjecture that links them.

    g(t) = int_0^t A_n(y/t) q(y) dy,        A_n(x) = int_x^1 (1 - y)^n dy / y
    q(t) = d^(n+1)/dt^(n+1) [ t^(n+1) g'(t) / n! ]
"""

from .conjecture import (
    ConjectureParams,
    ConjectureReport,
    check,
    conclusion_lhs,
    conclusion_rhs,
    extremal_family,
    extremal_q,
    mix_family,
    premise_lhs,
    sweep,
)
from .errors import (
    ConditioningError,
    ConfigurationError,
    DomainError,
    EvaluationError,
    GridTransformError,
    KhabError,
    OutOfRangeError,
)
from .funcspace import (
    PowerLawMix,
    SampledFunction,
    TransformConstant,
    closed_form_inverse,
    closed_form_transform,
    evaluate,
    load_function,
    transform_constant,
)
from .inverse import InverseConfig, cumulative_q, inverse_transform, roundtrip_residual
from .kernel import (
    KernelEvalConfig,
    kernel_derivative,
    kernel_derivative_at_one,
    kernel_partials,
    kernel_value,
)
from .numerics import (
    DiffConfig,
    QuadratureConfig,
    TransformResult,
    differentiate,
    integrate_adaptive,
    integrate_log_singular,
    integrate_to_infinity,
)
from .transform import (
    IntegrabilityReport,
    derivative_consistency,
    direct_transform,
    direct_transform_grid,
    g_prime,
    integrability_check,
    tilde_g,
    tilde_g_derivative,
)

__version__ = "0.1.0"

__all__ = sorted(
    name for name, obj in globals().items()
    if not name.startswith("_") and getattr(obj, "__module__", "").startswith("khabconv")
)
