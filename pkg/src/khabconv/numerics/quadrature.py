"""Gauss-Legendre panel quadrature.

Three drivers share one panel rule:

* :func:`integrate_adaptive` - global adaptive bisection on a finite interval.
* :func:`integrate_log_singular` - geometric panels ``[b r^(k+1), b r^k]``
  marching toward an integrable singularity at 0 (``|ln y|`` or ``y^beta``
  with ``beta > -1``).
* :func:`integrate_to_infinity` - the above plus the substitution ``t = 1/u``
  for the tail ``[T, inf)``.

Every panel is integrated with an ``order``-point rule on the whole panel and
on both halves; the halves are returned and their difference from the whole
is the error estimate.
"""

from __future__ import annotations

import heapq
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, EvaluationError

_EPS = np.finfo(float).eps
_WARMUP_PANELS = 40
_DECAY_WINDOW = 10
_QUIET_PANELS = 3


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 500
    geometric_ratio: float = 0.5
    order: int = 15
    max_panels: int = 1000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ConfigurationError("tolerances must be positive")
        if self.max_subdivisions < 1 or self.max_panels < 1:
            raise ConfigurationError("max_subdivisions and max_panels must be >= 1")
        if not 0.0 < self.geometric_ratio < 1.0:
            raise ConfigurationError("geometric_ratio must lie in (0, 1)")
        if self.order < 10:
            raise ConfigurationError("panel rule order must be at least 10")

    def tolerance(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class TransformResult:
    value: float
    error_estimate: float
    converged: bool
    subdivisions_used: int = 0
    diverged: bool = False

    def __float__(self) -> float:
        return self.value

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "converged": self.converged,
            "diverged": self.diverged,
            "subdivisions_used": self.subdivisions_used,
        }


def combine(*parts: TransformResult) -> TransformResult:
    """Sum independent pieces of one integral."""
    return TransformResult(
        value=math.fsum(p.value for p in parts),
        error_estimate=sum(p.error_estimate for p in parts),
        converged=all(p.converged for p in parts),
        subdivisions_used=sum(p.subdivisions_used for p in parts),
        diverged=any(p.diverged for p in parts),
    )


_RULES: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _rule(order: int):
    if order not in _RULES:
        _RULES[order] = np.polynomial.legendre.leggauss(order)
    return _RULES[order]


def _evaluate(f: Callable, x: np.ndarray) -> np.ndarray:
    """Evaluate f on an array of points, vectorized when f allows it."""
    try:
        with np.errstate(all="ignore"):
            y = f(x)
        y = np.asarray(y, dtype=float)
        if y.shape != x.shape:
            y = np.broadcast_to(y, x.shape)
    except (TypeError, ValueError):
        y = np.array([float(f(float(v))) for v in x.ravel()]).reshape(x.shape)
    if np.isnan(y).any():
        bad = x[np.isnan(y)].ravel()[0]
        raise EvaluationError(f"integrand returned NaN at {bad!r}")
    return y


def _panels(f: Callable, lo: np.ndarray, hi: np.ndarray, order: int):
    """Whole-panel and two-half estimates for a batch of panels.

    Returns (fine, err, fine_left, fine_right) where fine is the two-half
    estimate and err = |fine - whole| plus a roundoff floor.
    """
    nodes, weights = _rule(order)
    mid = 0.5 * (lo + hi)
    bounds = [(lo, hi), (lo, mid), (mid, hi)]
    xs = []
    for a, b in bounds:
        c = 0.5 * (a + b)
        h = 0.5 * (b - a)
        xs.append(c[:, None] + h[:, None] * nodes[None, :])
    x = np.concatenate(xs, axis=1)
    y = _evaluate(f, x)
    m = len(nodes)
    sums = []
    abs_sums = []
    for i, (a, b) in enumerate(bounds):
        block = y[:, i * m:(i + 1) * m]
        h = 0.5 * (b - a)
        sums.append(h * (block @ weights))
        abs_sums.append(h * (np.abs(block) @ weights))
    whole, left, right = sums
    fine = left + right
    floor = 50.0 * _EPS * (abs_sums[1] + abs_sums[2])
    err = np.abs(fine - whole) + floor
    return fine, err, left, right


def integrate_adaptive(
    f: Callable, a: float, b: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> TransformResult:
    """Integrate f over [a, b] by global adaptive bisection.

    Non-convergence within ``cfg.max_subdivisions`` splits is reported through
    ``converged=False``, not raised.
    """
    a = float(a)
    b = float(b)
    if not a < b:
        raise ConfigurationError(f"integration bounds must satisfy a < b, got [{a}, {b}]")
    fine, err, _, _ = _panels(f, np.array([a]), np.array([b]), cfg.order)
    # heap of (-err, lo, hi, value)
    heap = [(-float(err[0]), a, b, float(fine[0]))]
    total = float(fine[0])
    total_err = float(err[0])
    splits = 0
    while total_err > cfg.tolerance(total) and splits < cfg.max_subdivisions:
        neg_err, lo, hi, value = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            heapq.heappush(heap, (neg_err, lo, hi, value))
            break
        cfine, cerr, _, _ = _panels(f, np.array([lo, mid]), np.array([mid, hi]), cfg.order)
        for lo_c, hi_c, v, e in ((lo, mid, cfine[0], cerr[0]), (mid, hi, cfine[1], cerr[1])):
            heapq.heappush(heap, (-float(e), lo_c, hi_c, float(v)))
        splits += 1
        total = math.fsum(item[3] for item in heap)
        total_err = sum(-item[0] for item in heap)
    return TransformResult(
        value=total,
        error_estimate=total_err,
        converged=total_err <= cfg.tolerance(total),
        subdivisions_used=splits,
    )


def integrate_log_singular(
    f: Callable, b: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> TransformResult:
    """Integrate f over (0, b] when f may blow up like |ln y| or y^beta at 0.

    Panels ``[b r^(k+1), b r^k]`` (r = ``cfg.geometric_ratio``) are summed from
    the top down until, for three consecutive panels, the contribution plus
    the geometric extrapolation of everything below it falls under
    ``min(abs_tol, rel_tol * |partial sum|)``.  That extrapolated tail is added
    to the result.  Once past a warm-up of 40
    panels, a contribution that is no smaller than the one 10 panels earlier
    marks the integral as divergent.  That test is a heuristic: it cannot
    separate y^-1 from y^(-1 + tiny).
    """
    b = float(b)
    if not b > 0.0:
        raise ConfigurationError(f"upper limit must be positive, got {b}")
    r = cfg.geometric_ratio
    block = 32
    contributions: list[float] = []
    errors: list[float] = []
    total = 0.0
    quiet = 0
    splits = 0
    diverged = False
    done = False
    k = 0
    while not done and k < cfg.max_panels:
        count = min(block, cfg.max_panels - k)
        idx = np.arange(k, k + count)
        hi = b * r**idx
        lo = b * r ** (idx + 1)
        keep = lo > 0.0
        if not keep.all():
            # ran into underflow: nothing further is representable
            hi, lo, idx = hi[keep], lo[keep], idx[keep]
            done = True
            if idx.size == 0:
                break
        fine, err, _, _ = _panels(f, lo, hi, cfg.order)
        for j in range(idx.size):
            value, e = float(fine[j]), float(err[j])
            if e > 1e-3 * cfg.tolerance(value):
                sub = integrate_adaptive(f, float(lo[j]), float(hi[j]), cfg)
                value, e = sub.value, sub.error_estimate
                splits += sub.subdivisions_used
            contributions.append(value)
            errors.append(e)
            total += value
            k += 1
            threshold = min(cfg.abs_tol, cfg.rel_tol * abs(total))
            remaining = abs(value) + abs(_tail_estimate(contributions[-2:]))
            quiet = quiet + 1 if remaining <= threshold else 0
            if quiet >= _QUIET_PANELS:
                done = True
                break
            if k > _WARMUP_PANELS and abs(value) >= abs(contributions[-1 - _DECAY_WINDOW]):
                diverged = True
                done = True
                break
    tail = 0.0 if diverged else _tail_estimate(contributions)
    value = math.fsum(contributions) + tail
    err_total = math.fsum(errors) + abs(tail)
    converged = (not diverged) and done and err_total <= cfg.tolerance(value)
    return TransformResult(
        value=value,
        error_estimate=err_total,
        converged=converged,
        subdivisions_used=splits + len(contributions),
        diverged=diverged,
    )


def _tail_estimate(contributions: list[float]) -> float:
    """Geometric extrapolation of the panels not summed (signed)."""
    if len(contributions) < 2:
        return 0.0
    last = contributions[-1]
    prev = contributions[-2]
    if last == 0.0 or prev == 0.0 or abs(last) >= abs(prev) or last * prev < 0:
        return 0.0
    rho = last / prev
    return last * rho / (1.0 - rho)


def integrate_to_infinity(
    f: Callable, a: float = 0.0, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> TransformResult:
    """Integrate f over [a, inf).

    The tail [T, inf) with T = max(a, 1) is mapped to (0, 1/T] by t = 1/u and
    handled by :func:`integrate_log_singular`, so algebraic decay of f turns
    into an integrable endpoint singularity.  For a = 0 the piece (0, 1] is
    also treated as log-singular.
    """
    a = float(a)
    if a < 0.0:
        raise ConfigurationError(f"lower limit must be non-negative, got {a}")
    parts = []
    split = max(a, 1.0)
    if a == 0.0:
        parts.append(integrate_log_singular(f, split, cfg))
    elif a < split:
        parts.append(integrate_adaptive(f, a, split, cfg))

    def mapped(u):
        t = 1.0 / u
        with np.errstate(over="ignore", invalid="ignore"):
            return _evaluate(f, np.asarray(t, dtype=float)) * t * t

    parts.append(integrate_log_singular(mapped, 1.0 / split, cfg))
    return combine(*parts)
