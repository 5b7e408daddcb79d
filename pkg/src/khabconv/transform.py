"""Direct conversion q -> g and the derivative cascade of g.

    g(t)        = int_0^t A_n(y/t) q(y) dy
    t^(n+1) g'(t) = int_0^t (t - y)^n q(y) dy            (call it G(t))
    G^(k)(t)    = n!/(n-k)! int_0^t (t - y)^(n-k) q(y) dy,  k = 0..n

All integrals run over (0, t] with a possibly singular q at 0 and go through
geometric-panel quadrature.  t = 0 is rejected.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError, EvaluationError, GridTransformError
from .funcspace import SampledFunction
from .kernel import check_order, kernel_value
from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    TransformResult,
    integrate_log_singular,
)
from .numerics.differentiation import _difference

log = logging.getLogger(__name__)

_TINY = 1e-300
_MAX_FAILED_FRACTION = 0.1


def _check_t(t) -> float:
    t = float(t)
    if not (t > 0.0 and math.isfinite(t)):
        raise DomainError(f"t must be positive and finite, got {t}")
    return t


def direct_transform(
    q: Callable, t: float, n: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> TransformResult:
    """g(t) = int_0^t A_n(y/t) q(y) dy."""
    n = check_order(n)
    t = _check_t(t)

    def integrand(y):
        x = np.minimum(y / t, 1.0)
        return kernel_value(n, x) * q(y)

    return integrate_log_singular(integrand, t, cfg)


def direct_transform_grid(
    q: Callable,
    grid: Sequence[float],
    n: int,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    interpolation: Literal["cubic", "linear"] = "cubic",
) -> SampledFunction:
    """Sample g on a grid.

    Points whose quadrature fails or does not converge get NaN and are listed
    in ``failed``; more than 10% failures raises :class:`GridTransformError`.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.empty_like(grid)
    failed = []
    for i, t in enumerate(grid):
        try:
            res = direct_transform(q, t, n, cfg)
        except EvaluationError as exc:
            log.warning("direct transform failed at t=%g: %s", t, exc)
            values[i] = np.nan
            failed.append(i)
            continue
        values[i] = res.value
        if not res.converged:
            log.warning("direct transform did not converge at t=%g", t)
            values[i] = np.nan
            failed.append(i)
    if len(failed) > _MAX_FAILED_FRACTION * grid.size:
        raise GridTransformError(f"{len(failed)} of {grid.size} grid points failed")
    if grid.size < 4:
        interpolation = "linear"
    return SampledFunction(grid, values, interpolation, tuple(failed))


def tilde_g_result(
    q: Callable, t: float, n: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> TransformResult:
    return tilde_g_derivative_result(q, t, n, 0, cfg)


def tilde_g(q: Callable, t: float, n: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """G(t) = t^(n+1) g'(t) = int_0^t (t - y)^n q(y) dy."""
    return tilde_g_result(q, t, n, cfg).value


def tilde_g_derivative_result(
    q: Callable, t: float, n: int, k: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> TransformResult:
    n = check_order(n)
    t = _check_t(t)
    if isinstance(k, bool) or int(k) != k or not 0 <= k <= n:
        raise DomainError(f"cascade order k must be in [0, {n}], got {k!r}")
    k = int(k)
    power = n - k
    scale = math.factorial(n) / math.factorial(power)

    def integrand(y):
        return (t - y) ** power * q(y)

    res = integrate_log_singular(integrand, t, cfg)
    return TransformResult(
        value=scale * res.value,
        error_estimate=scale * res.error_estimate,
        converged=res.converged,
        subdivisions_used=res.subdivisions_used,
        diverged=res.diverged,
    )


def tilde_g_derivative(
    q: Callable, t: float, n: int, k: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """k-th derivative of G: n!/(n-k)! int_0^t (t - y)^(n-k) q(y) dy.

    k = n gives n! times the running integral of q.
    """
    return tilde_g_derivative_result(q, t, n, k, cfg).value


def g_prime_result(
    q: Callable, t: float, n: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> TransformResult:
    t = _check_t(t)
    res = tilde_g_result(q, t, n, cfg)
    scale = t ** -(n + 1)
    return TransformResult(
        value=res.value * scale,
        error_estimate=res.error_estimate * scale,
        converged=res.converged,
        subdivisions_used=res.subdivisions_used,
        diverged=res.diverged,
    )


def g_prime(q: Callable, t: float, n: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """g'(t) = t^-(n+1) int_0^t (t - y)^n q(y) dy.

    This is the derivative of the kernel integral with dA_n(y/t)/dt =
    (t - y)^n / t^(n+1) under the integral sign, q(y) included.
    """
    return g_prime_result(q, t, n, cfg).value


@dataclass(frozen=True)
class IntegrabilityReport:
    q_integral: TransformResult
    log_weighted_integral: TransformResult
    verdict: Literal["finite", "suspect-divergent"]

    @property
    def finite(self) -> bool:
        return self.verdict == "finite"


def integrability_check(
    q: Callable, t: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> IntegrabilityReport:
    """Numerical check that int_0^t q and int_0^t |ln y| q are finite.

    A diagnostic only: convergence on a finite panel sequence is evidence,
    not proof.
    """
    t = _check_t(t)
    plain = integrate_log_singular(q, t, cfg)
    weighted = integrate_log_singular(lambda y: np.abs(np.log(y)) * q(y), t, cfg)
    ok = plain.converged and weighted.converged
    return IntegrabilityReport(plain, weighted, "finite" if ok else "suspect-divergent")


def derivative_consistency(
    q: Callable,
    t: float,
    n: int,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    rel_step: float = 1e-2,
) -> tuple[float, float, float]:
    """Compare g' from its integral formula with a difference quotient of g.

    The numeric side is a central difference of ``direct_transform`` with step
    ``rel_step * t``, Richardson-extrapolated twice (error O(h^6)).
    Returns (analytic, numeric, rel_err).
    """
    t = _check_t(t)
    analytic = g_prime(q, t, n, cfg)

    def g(ts):
        return np.array([direct_transform(q, float(s), n, cfg).value for s in np.atleast_1d(ts)])

    h = rel_step * t
    d = [_difference(g, t, 1, h / 2**i, 0) for i in range(3)]
    r1 = [(4.0 * d[i + 1] - d[i]) / 3.0 for i in range(2)]
    numeric = (16.0 * r1[1] - r1[0]) / 15.0
    rel_err = abs(analytic - numeric) / max(abs(analytic), _TINY)
    if analytic == 0.0 and numeric == 0.0:
        rel_err = 0.0
    return analytic, numeric, rel_err
