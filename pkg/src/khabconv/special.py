"""Gamma-function ratios needed by the power-law closed forms.

Only positive real arguments occur.  Products are used wherever one argument
is an integer, since they are exact up to rounding in every factor.
"""

from __future__ import annotations

import math


def rising_factorial(a: float, m: int) -> float:
    """(a)_m = a (a + 1) ... (a + m - 1) = Gamma(a + m) / Gamma(a)."""
    out = 1.0
    for i in range(m):
        out *= a + i
    return out


def beta_int(a: float, m: int) -> float:
    """B(a, m) for integer m >= 1: (m - 1)! / (a (a + 1) ... (a + m - 1))."""
    if m < 1:
        raise ValueError("second argument must be a positive integer")
    return math.factorial(m - 1) / rising_factorial(a, m)


def beta(a: float, b: float) -> float:
    """Euler Beta function for positive arguments."""
    if a <= 0 or b <= 0:
        raise ValueError("beta requires positive arguments")
    if float(b).is_integer():
        return beta_int(a, int(b))
    if float(a).is_integer():
        return beta_int(b, int(a))
    if a + b < 170.0:
        return math.gamma(a) * math.gamma(b) / math.gamma(a + b)
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))
