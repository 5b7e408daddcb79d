"""High-order numerical differentiation.

:func:`differentiate` fits a least-squares polynomial to samples around the
point and differentiates the fit exactly.  :func:`richardson_derivative` is
the classical alternative (difference quotient plus Richardson
extrapolation) and serves as an independent check of the fitting route.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.polynomial import Chebyshev

from ..errors import ConfigurationError, DomainError
from .quadrature import _evaluate

MAX_DERIVATIVE_ORDER = 14


@dataclass(frozen=True)
class DiffConfig:
    window_points: int = 21
    fit_degree: int = 8
    grid_spacing_rule: Literal["log-uniform", "uniform"] = "log-uniform"
    half_width: float = 0.1

    def __post_init__(self):
        if self.fit_degree < 1 or self.window_points < self.fit_degree + 1:
            raise ConfigurationError("need fit_degree >= 1 and window_points >= fit_degree + 1")
        if self.grid_spacing_rule not in ("log-uniform", "uniform"):
            raise ConfigurationError(f"unknown grid spacing rule {self.grid_spacing_rule!r}")
        if not 0.0 < self.half_width < 1.0:
            raise ConfigurationError("half_width must lie in (0, 1)")

    @classmethod
    def for_order(cls, order: int, **kwargs) -> "DiffConfig":
        degree = order + 4
        return cls(window_points=2 * degree + 1, fit_degree=degree, **kwargs)


def window_nodes(t: float, cfg: DiffConfig) -> np.ndarray:
    lo, hi = t * (1.0 - cfg.half_width), t * (1.0 + cfg.half_width)
    if cfg.grid_spacing_rule == "log-uniform":
        return np.geomspace(lo, hi, cfg.window_points)
    return np.linspace(lo, hi, cfg.window_points)


def fit_polynomial(x: np.ndarray, y: np.ndarray, degree: int) -> Chebyshev:
    """Least-squares Chebyshev fit on the span of x; raises on rank deficiency."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < degree + 1 or np.unique(x).size < degree + 1:
        raise ConfigurationError(
            f"cannot fit degree {degree} to {np.unique(x).size} distinct nodes"
        )
    poly, (_, rank, _, _) = Chebyshev.fit(x, y, degree, full=True)
    if rank < degree + 1:
        raise ConfigurationError(f"rank-deficient fit (rank {rank} < {degree + 1})")
    return poly


def differentiate(f: Callable, t: float, order: int, cfg: DiffConfig | None = None) -> float:
    """d^order f / dt^order at t from an exactly differentiated polynomial fit.

    Nodes span [t(1 - h), t(1 + h)] with h = ``cfg.half_width``.
    """
    if order < 1 or order > MAX_DERIVATIVE_ORDER:
        raise DomainError(f"derivative order must be in [1, {MAX_DERIVATIVE_ORDER}]")
    if not t > 0:
        raise DomainError("differentiation point must be positive")
    cfg = cfg or DiffConfig.for_order(order)
    if cfg.fit_degree < order:
        raise ConfigurationError("fit_degree must be at least the derivative order")
    x = window_nodes(float(t), cfg)
    poly = fit_polynomial(x, _evaluate(f, x), cfg.fit_degree)
    return float(poly.deriv(order)(t))


def _difference(f: Callable, x: float, order: int, h: float, one_sided: int) -> float:
    """order-th difference quotient of f at x with step h.

    one_sided = 0 gives the central stencil, +1 forward, -1 backward.
    """
    j = np.arange(order + 1)
    weights = np.array([(-1) ** (order - i) * math.comb(order, i) for i in j], dtype=float)
    if one_sided == 0:
        nodes = x + (j - order / 2.0) * h
    elif one_sided > 0:
        nodes = x + j * h
    else:
        nodes = x - (order - j) * h
    values = _evaluate(f, nodes)
    return float(weights @ values) / h**order


def richardson_derivative(
    f: Callable,
    x: float,
    order: int,
    h: float,
    levels: int = 6,
    one_sided: int = 0,
) -> tuple[float, float]:
    """Difference quotient of the given order, Richardson-extrapolated over
    steps h, h/2, ..., h/2^(levels-1).

    Central stencils have an error series in h^2, one-sided ones in h.
    Returns (estimate, error) where error is the change across the last level.
    """
    if order == 0:
        value = float(_evaluate(f, np.array([x]))[0])
        return value, 0.0
    power = 2 if one_sided == 0 else 1
    table = [[_difference(f, x, order, h / 2**i, one_sided)] for i in range(levels)]
    for i in range(1, levels):
        for j in range(1, i + 1):
            factor = 2.0 ** (power * j)
            prev = table[i][j - 1]
            table[i].append(prev + (prev - table[i - 1][j - 1]) / (factor - 1.0))
    best = table[-1][-1]
    err = abs(best - table[-2][-1]) if levels > 1 else float("inf")
    return best, err
