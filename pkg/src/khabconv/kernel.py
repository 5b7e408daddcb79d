"""The kernel A_n(x) = int_x^1 (1 - y)^n dy / y and its derivatives.

Two representations are used::

    A_n(x) = -ln x - sum_{m=1}^{n} (1 - x)^m / m         (closed form)
    A_n(x) = sum_{m=n+1}^{inf} (1 - x)^m / m             (series)

The closed form loses all relative accuracy as x -> 1 because it subtracts
two nearly equal numbers, so the series is used once 1 - x drops below
``KernelEvalConfig.series_switch_threshold``.  The series keeps full relative
precision there, which matters for finite differences taken at x = 1.
For larger n the closed form also cancels further from 1 (A_12(0.5) is about
2e-5 against ln 2), so beyond the threshold the series is still used wherever
the closed form has lost more than four bits and the series converges quickly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

MAX_ORDER = 12

# closed-form results below this fraction of -ln x are recomputed by series
_CANCELLATION_RATIO = 1.0 / 16.0
# ... provided 1 - x is at most this (keeps the series under ~800 terms)
_SERIES_U_MAX = 0.95


@dataclass(frozen=True)
class KernelEvalConfig:
    series_switch_threshold: float = 0.5
    series_tolerance: float = 1e-16

    def __post_init__(self):
        if not 0.0 < self.series_switch_threshold < 1.0:
            raise DomainError("series_switch_threshold must lie in (0, 1)")
        if not self.series_tolerance > 0.0:
            raise DomainError("series_tolerance must be positive")


DEFAULT_KERNEL_CONFIG = KernelEvalConfig()


def check_order(n) -> int:
    """Validate a kernel order and return it as a plain int."""
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"kernel order must be an integer, got {n!r}")
    n = int(n)
    if not 0 <= n <= MAX_ORDER:
        raise DomainError(f"kernel order must be in [0, {MAX_ORDER}], got {n}")
    return n


def _as_unit_interval(x):
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr > 1.0):
        raise DomainError("kernel argument must lie in (0, 1]")
    return arr


def _series_terms(n: int, u_max: float, tol: float) -> int:
    """Number of series terms past m = n so the remainder is below tol relative
    to the leading term u^(n+1)/(n+1)."""
    lead = u_max ** (n + 1) / (n + 1)
    m = n + 1
    while u_max ** (m + 1) / ((m + 1) * (1.0 - u_max)) > tol * lead:
        m += 1
    return m - n


def _series(n: int, u: np.ndarray, tol: float) -> np.ndarray:
    if u.size == 0:
        return np.zeros_like(u)
    count = _series_terms(n, float(u.max()), tol)
    # Horner in u for sum_{j<count} u^j / (n + 1 + j)
    acc = np.zeros_like(u)
    for j in range(count - 1, -1, -1):
        acc = acc * u + 1.0 / (n + 1 + j)
    return u ** (n + 1) * acc


def _closed_form(n: int, x: np.ndarray) -> np.ndarray:
    u = 1.0 - x
    acc = np.zeros_like(x)
    for m in range(n, 0, -1):
        acc = acc * u + 1.0 / m
    return -np.log(x) - u * acc


def kernel_value(n: int, x, config: KernelEvalConfig = DEFAULT_KERNEL_CONFIG):
    """Evaluate A_n(x) for x in (0, 1].

    Accepts a scalar or an array.  A_n(1) is exactly zero.
    """
    n = check_order(n)
    arr = _as_unit_interval(x)
    flat = np.atleast_1d(arr).astype(float, copy=True).ravel()
    out = np.zeros_like(flat)
    u = 1.0 - flat
    near_one = (u < config.series_switch_threshold) & (flat < 1.0)
    far = u >= config.series_switch_threshold
    if near_one.any():
        out[near_one] = _series(n, u[near_one], config.series_tolerance)
    if far.any():
        out[far] = _closed_form(n, flat[far])
        redo = far & (u <= _SERIES_U_MAX)
        redo[redo] = out[redo] < -_CANCELLATION_RATIO * np.log(flat[redo])
        if redo.any():
            out[redo] = _series(n, u[redo], config.series_tolerance)
    out = np.maximum(out, 0.0)
    if np.ndim(arr) == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def kernel_value_series(n: int, x, tol: float = 1e-14):
    """Series-only evaluation of A_n(x), meant for x in [0.5, 1)."""
    n = check_order(n)
    arr = _as_unit_interval(x)
    flat = np.atleast_1d(arr).astype(float).ravel()
    out = _series(n, 1.0 - flat, tol)
    if np.ndim(arr) == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def kernel_value_closed(n: int, x):
    """Closed-form-only evaluation of A_n(x); inaccurate in relative terms near x = 1."""
    n = check_order(n)
    arr = _as_unit_interval(x)
    out = _closed_form(n, np.atleast_1d(arr).astype(float))
    if np.ndim(arr) == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def kernel_derivative(n: int, x):
    """dA_n/dx = -(1 - x)^n / x."""
    n = check_order(n)
    arr = _as_unit_interval(x)
    out = -((1.0 - arr) ** n) / arr
    if np.ndim(arr) == 0:
        return float(out)
    return out


def kernel_partials(n: int, y, t):
    """Partial derivatives of A_n(y/t) with respect to y and t.

    Returns ``(d_dy, d_dt)`` with d_dy = -(t - y)^n / (t^n y) and
    d_dt = (t - y)^n / t^(n + 1).  Requires 0 < y <= t.
    """
    n = check_order(n)
    y = np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(y <= 0.0) or np.any(t <= 0.0) or np.any(y > t):
        raise DomainError("kernel_partials requires 0 < y <= t")
    ratio = (t - y) / t
    d_dy = -(ratio**n) / y
    d_dt = ratio**n / t
    if d_dy.ndim == 0:
        return float(d_dy), float(d_dt)
    return d_dy, d_dt


def kernel_derivative_at_one(n: int, k: int) -> float:
    """k-th derivative of A_n at x = 1, which vanishes for k = 0..n."""
    n = check_order(n)
    if isinstance(k, bool) or int(k) != k or not 0 <= k <= n:
        raise DomainError(f"derivative order must be in [0, {n}], got {k!r}")
    return 0.0


def kernel_log_offset(n: int) -> float:
    """Limit of A_n(x) + ln x as x -> 0, i.e. minus the n-th harmonic number."""
    n = check_order(n)
    return -math.fsum(1.0 / m for m in range(1, n + 1))
