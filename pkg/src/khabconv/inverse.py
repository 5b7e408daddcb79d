"""Inverse conversion g -> q.

    q(t) = d^(n+1)/dt^(n+1) [ t^(n+1) g'(t) / n! ]

Power-law mixes are inverted exactly.  Anything else goes through one local
least-squares polynomial fit p of g: the product t^(n+1) p'(t) is again a
polynomial, so the remaining n + 1 derivatives are exact and only the fit
itself carries error.  The result is a fixed linear combination w . y of the
window samples y, which gives a cheap noise estimate ||w||_2 * sigma with
sigma the fit residual (or rounding level, whichever is larger).
"""

from __future__ import annotations

import logging
import math
import warnings
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.polynomial import chebyshev as C

from .errors import ConditioningError, ConfigurationError, DomainError
from .funcspace import PowerLawMix, SampledFunction, closed_form_inverse
from .kernel import check_order
from .numerics import DEFAULT_QUADRATURE, DiffConfig, QuadratureConfig
from .numerics.differentiation import window_nodes
from .numerics.quadrature import _evaluate
from .transform import direct_transform_grid

log = logging.getLogger(__name__)

_EPS = np.finfo(float).eps
_TINY = 1e-300
CONDITIONING_WARN_ORDER = 8


class ConditioningWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class InverseConfig:
    """Settings for the inverse.

    ``diff=None`` means the default window for the kernel order: 2(n + 4) + 1
    log-uniform points of half-width 10% and a fit of degree n + 3 + extra_degree.
    Degree n + 3 alone leaves truncation errors near 1e-2 for g ~ t^(1/2);
    four extra degrees bring that to ~1e-5 without letting noise take over.
    A :class:`ConditioningError` is raised when the noise estimate exceeds
    both ``max_noise_ratio * |q_hat|`` and ``noise_floor``; with the default
    ratio of 1 that means the estimate carries no significant digit.
    """

    diff: DiffConfig | None = None
    mode: Literal["analytic-if-possible", "numeric-only"] = "analytic-if-possible"
    extra_degree: int = 4
    max_noise_ratio: float = 1.0
    noise_floor: float = 1e-8

    def __post_init__(self):
        if self.mode not in ("analytic-if-possible", "numeric-only"):
            raise ConfigurationError(f"unknown inverse mode {self.mode!r}")
        if self.extra_degree < 0:
            raise ConfigurationError("extra_degree must be non-negative")

    def diff_for(self, n: int) -> DiffConfig:
        if self.diff is not None:
            if self.diff.fit_degree < n + 3:
                raise ConfigurationError(
                    f"fit_degree {self.diff.fit_degree} < n + 3 = {n + 3}"
                )
            return self.diff
        degree = n + 3 + self.extra_degree
        return DiffConfig(window_points=max(2 * (n + 4) + 1, degree + 1), fit_degree=degree)


DEFAULT_INVERSE = InverseConfig()


@dataclass(frozen=True)
class InverseResult:
    t: float
    q_hat: float
    noise_estimate: float
    method: Literal["analytic", "numeric"]
    amplification: float = field(default=0.0)


def _inverse_functional(n: int, degree: int, center: float, half: float, z0: float) -> np.ndarray:
    """Row vector l with q_hat = l . a for Chebyshev coefficients a (in z)."""
    xpow = C.chebpow([center, half], n + 1)
    scale = 1.0 / (math.factorial(n) * half ** (n + 2))
    ell = np.empty(degree + 1)
    for j in range(degree + 1):
        e = np.zeros(degree + 1)
        e[j] = 1.0
        h = C.chebmul(xpow, C.chebder(e))
        ell[j] = scale * C.chebval(z0, C.chebder(h, n + 1)) if h.size > n + 1 else 0.0
    return ell


def _cumulative_functional(n: int, degree: int, center: float, half: float, z0: float) -> np.ndarray:
    """Like _inverse_functional but stops one derivative short (gives int_0^t q)."""
    xpow = C.chebpow([center, half], n + 1)
    scale = 1.0 / (math.factorial(n) * half ** (n + 1))
    ell = np.empty(degree + 1)
    for j in range(degree + 1):
        e = np.zeros(degree + 1)
        e[j] = 1.0
        h = C.chebmul(xpow, C.chebder(e))
        ell[j] = scale * C.chebval(z0, C.chebder(h, n)) if h.size > n else 0.0
    return ell


def _window(g, t: float, n: int, diff: DiffConfig):
    """Sample points and values used for the local fit."""
    if isinstance(g, SampledFunction):
        grid = g.grid
        m = diff.window_points
        if grid.size < m:
            raise DomainError(f"need at least {m} samples, have {grid.size}")
        if t < grid[0] or t > grid[-1]:
            raise DomainError(f"t={t} outside sampled range [{grid[0]}, {grid[-1]}]")
        i = int(np.argmin(np.abs(grid - t)))
        start = i - m // 2
        if start < 0 or start + m > grid.size:
            raise DomainError(
                f"t={t} is within {m // 2} samples of the grid edge; window does not fit"
            )
        x = grid[start:start + m]
        y = g.values[start:start + m]
        if not np.isfinite(y).all():
            raise DomainError("window contains failed (non-finite) samples")
        return x, y
    x = window_nodes(t, diff)
    return x, _evaluate(g, x)


def _fit_functional(x, y, t, n, degree, functional):
    lo, hi = float(x[0]), float(x[-1])
    center, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    z = (x - center) / half
    vander = C.chebvander(z, degree)
    if np.linalg.matrix_rank(vander) < degree + 1:
        raise ConfigurationError("rank-deficient fit")
    pinv = np.linalg.pinv(vander)
    coef = pinv @ y
    weights = functional(n, degree, center, half, (t - center) / half) @ pinv
    resid = y - vander @ coef
    dof = max(x.size - degree - 1, 1)
    sigma = max(math.sqrt(float(resid @ resid) / dof), 4.0 * _EPS * float(np.max(np.abs(y))))
    value = float(weights @ y)
    noise = float(np.linalg.norm(weights)) * sigma
    amplification = float(np.sum(np.abs(weights))) * float(np.max(np.abs(y)) or 1.0)
    return value, noise, amplification


def inverse_transform_result(
    g, t: float, n: int, cfg: InverseConfig = DEFAULT_INVERSE
) -> InverseResult:
    n = check_order(n)
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t}")
    if isinstance(g, PowerLawMix) and cfg.mode == "analytic-if-possible":
        q = closed_form_inverse(g, n)
        value = q(t)
        return InverseResult(t, value, 4.0 * _EPS * abs(value), "analytic")
    if n + 2 > CONDITIONING_WARN_ORDER:
        warnings.warn(
            f"inverse needs {n + 2} derivatives of g; expect strong noise amplification",
            ConditioningWarning,
            stacklevel=2,
        )
    diff = cfg.diff_for(n)
    x, y = _window(g, t, n, diff)
    value, noise, amp = _fit_functional(x, y, t, n, diff.fit_degree, _inverse_functional)
    noisy = noise > cfg.max_noise_ratio * abs(value) and noise > cfg.noise_floor
    if not math.isfinite(value) or noisy:
        raise ConditioningError(
            f"inverse at t={t} is noise dominated (q_hat={value:.3g}, noise={noise:.3g})"
        )
    if n + 2 > CONDITIONING_WARN_ORDER:
        log.warning("t=%g: noise amplification %.3g, noise estimate %.3g", t, amp, noise)
    return InverseResult(t, value, noise, "numeric", amp)


def inverse_transform(g, t: float, n: int, cfg: InverseConfig = DEFAULT_INVERSE) -> float:
    """q(t) recovered from g via d^(n+1)/dt^(n+1) (t^(n+1) g'(t) / n!).

    ``g`` is a PowerLawMix (exact path unless ``cfg.mode == "numeric-only"``),
    a SampledFunction (the fit window is the ``window_points`` samples nearest
    t) or any callable (sampled on log-uniform nodes across t(1 +- 10%)).
    """
    return inverse_transform_result(g, t, n, cfg).q_hat


def cumulative_q(g, t: float, n: int, cfg: InverseConfig = DEFAULT_INVERSE) -> float:
    """int_0^t q = (1/n!) d^n/dt^n (t^(n+1) g'(t)) from the same kind of local fit.

    Differentiating this once more is an alternative route to q.
    """
    n = check_order(n)
    t = float(t)
    if isinstance(g, PowerLawMix) and cfg.mode == "analytic-if-possible":
        q = closed_form_inverse(g, n)
        return float(sum(c * t ** (b + 1.0) / (b + 1.0) for c, b in q.terms))
    diff = cfg.diff_for(n)
    x, y = _window(g, t, n, diff)
    value, _, _ = _fit_functional(x, y, t, n, diff.fit_degree, _cumulative_functional)
    return value


def inverse_on_grid(
    g, points: Sequence[float], n: int, cfg: InverseConfig = DEFAULT_INVERSE
) -> list[InverseResult]:
    return [inverse_transform_result(g, float(t), n, cfg) for t in points]


def interior_points(grid: np.ndarray, window_points: int) -> np.ndarray:
    """Grid points far enough from both edges for a centred window."""
    margin = window_points // 2
    if grid.size <= 2 * margin:
        return grid[:0]
    return grid[margin:grid.size - margin]


def roundtrip_residual(
    q: Callable,
    grid: Sequence[float],
    n: int,
    cfg: InverseConfig = DEFAULT_INVERSE,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Max relative error of q -> g -> q_hat at interior grid points.

    In analytic mode with a PowerLawMix q, both legs use the closed forms;
    otherwise g is sampled on the grid by quadrature and inverted numerically.
    """
    n = check_order(n)
    grid = np.asarray(grid, dtype=float)
    if isinstance(q, PowerLawMix) and cfg.mode == "analytic-if-possible":
        from .funcspace import closed_form_transform

        g = closed_form_transform(q, n)
        points = grid
    else:
        g = direct_transform_grid(q, grid, n, quad)
        points = interior_points(grid, cfg.diff_for(n).window_points)
    worst = 0.0
    for t in points:
        q_hat = inverse_transform(g, t, n, cfg)
        truth = float(q(t))
        err = abs(q_hat - truth)
        if err == 0.0:
            continue
        worst = max(worst, err / max(abs(truth), _TINY))
    return worst
