"""Function representations for q and g.

``PowerLawMix`` is a finite sum of c * t^beta.  The direct transform maps
t^beta to C(n, beta) t^(beta + 1) and the inverse undoes it, so mixes give
exact answers in both directions and serve as the reference class for the
numerical routes.  ``SampledFunction`` holds grid samples with linear or
cubic-spline interpolation and no extrapolation.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, OutOfRangeError
from .kernel import check_order
from .special import beta_int, rising_factorial


@dataclass(frozen=True)
class PowerLawMix:
    """sum_j c_j t^beta_j with every beta_j > -1."""

    terms: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        terms = tuple((float(c), float(b)) for c, b in self.terms)
        for c, b in terms:
            if not (math.isfinite(c) and math.isfinite(b)):
                raise DomainError("power-law terms must be finite")
            if b <= -1.0:
                raise DomainError(f"exponent {b} <= -1 makes the integrals near 0 diverge")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def single(cls, c: float, beta: float) -> "PowerLawMix":
        return cls(((c, beta),))

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms], dtype=float)

    @property
    def exponents(self) -> np.ndarray:
        return np.array([b for _, b in self.terms], dtype=float)

    def is_nonnegative(self) -> bool:
        return all(c >= 0.0 for c, _ in self.terms)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for c, b in self.terms:
            out = out + c * t**b
        if out.ndim == 0:
            return float(out)
        return out

    def scaled(self, factor: float) -> "PowerLawMix":
        return PowerLawMix(tuple((factor * c, b) for c, b in self.terms))

    def __add__(self, other: "PowerLawMix") -> "PowerLawMix":
        return PowerLawMix(self.terms + other.terms)

    def to_json(self) -> dict:
        return {"terms": [{"c": c, "beta": b} for c, b in self.terms]}

    @classmethod
    def from_json(cls, data: dict) -> "PowerLawMix":
        try:
            terms = data["terms"]
            return cls(tuple((float(t["c"]), float(t["beta"])) for t in terms))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed power-law JSON: {exc}") from exc


@dataclass(frozen=True)
class SampledFunction:
    grid: np.ndarray
    values: np.ndarray
    interpolation: Literal["cubic", "linear"] = "cubic"
    failed: tuple[int, ...] = ()
    _spline: CubicSpline | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float).copy()
        values = np.asarray(self.values, dtype=float).copy()
        if grid.ndim != 1 or grid.shape != values.shape:
            raise DomainError("grid and values must be 1-d arrays of equal length")
        if grid.size == 0 or np.any(grid <= 0.0) or np.any(np.diff(grid) <= 0.0):
            raise DomainError("grid must be non-empty, positive and strictly increasing")
        if self.interpolation not in ("cubic", "linear"):
            raise DomainError(f"unknown interpolation {self.interpolation!r}")
        if self.interpolation == "cubic" and grid.size < 4:
            raise DomainError("cubic interpolation needs at least 4 grid points")
        grid.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if self.interpolation == "cubic" and np.isfinite(values).all():
            object.__setattr__(self, "_spline", CubicSpline(grid, values))

    def __len__(self) -> int:
        return self.grid.size

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.grid[0], self.grid[-1]
        if np.any(t < lo) or np.any(t > hi):
            raise OutOfRangeError(f"evaluation point outside sampled range [{lo}, {hi}]")
        if self.interpolation == "linear":
            out = np.interp(t, self.grid, self.values)
        elif self._spline is None:
            raise DomainError("cannot interpolate samples containing non-finite values")
        else:
            out = self._spline(t)
        if np.ndim(out) == 0:
            return float(out)
        return out

    @classmethod
    def from_function(cls, f, grid, interpolation="cubic") -> "SampledFunction":
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.asarray(f(grid), dtype=float), interpolation)

    def to_csv(self, value_name: str = "value") -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", value_name])
        for t, v in zip(self.grid, self.values):
            writer.writerow([format_float(t), format_float(v)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, interpolation="cubic") -> "SampledFunction":
        """Read a CSV with a header; column ``t`` plus the first other column
        (or one named ``value``) supply the samples."""
        rows = list(csv.reader(io.StringIO(text)))
        rows = [r for r in rows if r and any(cell.strip() for cell in r)]
        if not rows:
            raise DomainError("empty CSV")
        header = [h.strip() for h in rows[0]]
        if "t" not in header or len(header) < 2:
            raise DomainError("CSV needs a header with a 't' column and a value column")
        ti = header.index("t")
        if "value" in header:
            vi = header.index("value")
        else:
            vi = next(i for i in range(len(header)) if i != ti)
        try:
            grid = [float(r[ti]) for r in rows[1:]]
            values = [float(r[vi]) for r in rows[1:]]
        except (ValueError, IndexError) as exc:
            raise DomainError(f"malformed CSV row: {exc}") from exc
        return cls(np.array(grid), np.array(values), interpolation)


def format_float(x: float) -> str:
    """Locale-independent 17-significant-digit rendering."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def evaluate(f, t):
    """Value of a PowerLawMix or SampledFunction at t > 0."""
    if np.any(np.asarray(t) <= 0):
        raise DomainError("evaluation point must be positive")
    return f(t)


@dataclass(frozen=True)
class TransformConstant:
    n: int
    beta: float
    value: float


def transform_constant(n: int, beta: float) -> TransformConstant:
    """C(n, beta) = int_0^1 A_n(x) x^beta dx.

    Integrating by parts against A_n' = -(1 - x)^n / x collapses the termwise
    sum 1/(beta+1)^2 - sum_m B(beta+1, m+1)/m into B(beta + 1, n + 1)/(beta + 1),
    which is evaluated as a finite product and has no cancellation.
    """
    n = check_order(n)
    beta = float(beta)
    if not beta > -1.0:
        raise DomainError(f"transform constant needs beta > -1, got {beta}")
    a = beta + 1.0
    return TransformConstant(n, beta, beta_int(a, n + 1) / a)


def transform_constant_termwise(n: int, beta: float) -> float:
    """The same constant from termwise integration of the closed-form kernel."""
    n = check_order(n)
    a = float(beta) + 1.0
    if not a > 0:
        raise DomainError("beta must exceed -1")
    return 1.0 / a**2 - math.fsum(beta_int(a, m + 1) / m for m in range(1, n + 1))


def closed_form_transform(q: PowerLawMix, n: int) -> PowerLawMix:
    """Exact direct transform: c t^beta -> c C(n, beta) t^(beta + 1)."""
    n = check_order(n)
    return PowerLawMix(
        tuple((c * transform_constant(n, b).value, b + 1.0) for c, b in q.terms)
    )


def inverse_coefficient(n: int, gamma: float) -> float:
    """Multiplier taking c t^gamma in g to the matching term of q.

    gamma Gamma(n + gamma + 1) / (n! Gamma(gamma)) = gamma (gamma)_(n+1) / n!.
    """
    return gamma * rising_factorial(gamma, n + 1) / math.factorial(n)


def closed_form_inverse(g: PowerLawMix, n: int) -> PowerLawMix:
    """Exact inverse transform: c t^gamma -> c gamma (gamma)_(n+1) / n! t^(gamma - 1)."""
    n = check_order(n)
    terms = []
    for c, gamma in g.terms:
        if not gamma > 0.0:
            raise DomainError(f"inverse needs every exponent of g to be positive, got {gamma}")
        terms.append((c * inverse_coefficient(n, gamma), gamma - 1.0))
    return PowerLawMix(tuple(terms))


def load_function(spec: str | Path, interpolation: str = "cubic"):
    """Load a PowerLawMix (JSON file or inline JSON) or a SampledFunction (CSV)."""
    text = str(spec).strip()
    if text.startswith("{"):
        return PowerLawMix.from_json(json.loads(text))
    path = Path(spec)
    content = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json" or content.lstrip().startswith("{"):
        try:
            data = json.loads(content)
        except json.JSONDecodeError as exc:
            raise DomainError(f"invalid JSON in {path}: {exc}") from exc
        return PowerLawMix.from_json(data)
    return SampledFunction.from_csv(content, interpolation)
