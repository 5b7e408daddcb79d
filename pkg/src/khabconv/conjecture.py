"""Numerical checks of Khabibullin's pair of integral inequalities.

For alpha > 0, n >= 1 and q >= 0 the premise

    int_0^t A_(n-1)(y/t) q(y) dy <= t^alpha      for every t > 0

is supposed to imply

    int_0^inf q(t) ln(1 + t^(-2 alpha)) dt <= pi alpha prod_(k=1)^(n-1) (1 + alpha/k).

The premise uses kernel order n - 1, one below the order of the conversion
formulas; :func:`premise_lhs` applies the shift so callers pass the same n
everywhere.  "Every t" is checked on a finite grid only.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import DomainError, KhabError
from .funcspace import PowerLawMix, transform_constant
from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    TransformResult,
    integrate_to_infinity,
)
from .transform import direct_transform

log = logging.getLogger(__name__)

Verdict = Literal["consistent", "premise-violated", "bound-exceeded", "inconclusive"]

DEFAULT_TOL_PREMISE = 1e-9
DEFAULT_TOL_RATIO = 1e-3


def default_grid() -> np.ndarray:
    return np.geomspace(1e-2, 1e2, 200)


@dataclass(frozen=True)
class ConjectureParams:
    alpha: float
    n: int

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class PremiseMargin:
    t: float
    lhs: float
    t_alpha: float
    margin: float


@dataclass
class ConjectureReport:
    params: ConjectureParams
    premise_margins: list[PremiseMargin]
    premise_ok: bool
    conclusion_value: TransformResult | None
    bound: float
    ratio: float
    verdict: Verdict
    family_id: str = ""
    tol_premise: float = DEFAULT_TOL_PREMISE
    tol_ratio: float = DEFAULT_TOL_RATIO
    notes: list[str] = field(default_factory=list)
    diverged: bool = False

    def to_dict(self) -> dict:
        return {
            "alpha": self.params.alpha,
            "n": self.params.n,
            "family_id": self.family_id,
            "premise_margins": [
                {"t": m.t, "lhs": m.lhs, "t_alpha": m.t_alpha, "margin": m.margin}
                for m in self.premise_margins
            ],
            "premise_ok": self.premise_ok,
            "conclusion_value": (
                None if self.conclusion_value is None else self.conclusion_value.to_dict()
            ),
            "bound": self.bound,
            "ratio": self.ratio,
            "verdict": self.verdict,
            "tol_premise": self.tol_premise,
            "tol_ratio": self.tol_ratio,
            "premise_check": "finite grid surrogate for all t > 0",
            "diverged": self.diverged,
            "notes": list(self.notes),
        }

    def summary_row(self) -> dict:
        return {
            "alpha": self.params.alpha,
            "n": self.params.n,
            "family_id": self.family_id,
            "premise_ok": self.premise_ok,
            "ratio": self.ratio,
            "verdict": self.verdict,
        }


def premise_lhs_result(
    q: Callable, t: float, p: ConjectureParams, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> TransformResult:
    return direct_transform(q, t, p.n - 1, cfg)


def premise_lhs(
    q: Callable, t: float, p: ConjectureParams, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """int_0^t A_(n-1)(y/t) q(y) dy."""
    return premise_lhs_result(q, t, p, cfg).value


def log_weight(t, alpha: float):
    """ln(1 + t^(-2 alpha)) without overflow at either end."""
    t = np.asarray(t, dtype=float)
    small = t < 1.0
    safe = np.where(small, t, 1.0)
    large = np.where(small, 1.0, t)
    with np.errstate(divide="ignore"):
        below = -2.0 * alpha * np.log(safe) + np.log1p(safe ** (2.0 * alpha))
    above = np.log1p(large ** (-2.0 * alpha))
    out = np.where(small, below, above)
    if out.ndim == 0:
        return float(out)
    return out


def conclusion_lhs(
    q: Callable, alpha: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> TransformResult:
    """int_0^inf q(t) ln(1 + t^(-2 alpha)) dt."""
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    return integrate_to_infinity(lambda t: q(t) * log_weight(t, alpha), 0.0, cfg)


def conclusion_rhs(p: ConjectureParams) -> float:
    """pi alpha prod_(k=1)^(n-1) (1 + alpha / k)."""
    prod = 1.0
    for k in range(1, p.n):
        prod *= 1.0 + p.alpha / k
    return math.pi * p.alpha * prod


def extremal_q(p: ConjectureParams) -> PowerLawMix:
    """The power law t^(alpha-1) / C(n-1, alpha-1), which meets the premise with
    equality at every t."""
    beta = p.alpha - 1.0
    c = transform_constant(p.n - 1, beta).value
    return PowerLawMix.single(1.0 / c, beta)


def _check_nonnegative(q: Callable, grid: np.ndarray) -> None:
    if isinstance(q, PowerLawMix):
        if not q.is_nonnegative():
            raise DomainError("q must be non-negative: negative power-law coefficient")
        return
    values = np.asarray(q(grid), dtype=float)
    if np.any(values < 0.0):
        raise DomainError("q takes negative values on the grid")


def check(
    q: Callable,
    p: ConjectureParams,
    t_grid: Sequence[float] | None = None,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    tol_premise: float = DEFAULT_TOL_PREMISE,
    tol_ratio: float = DEFAULT_TOL_RATIO,
    family_id: str = "",
) -> ConjectureReport:
    """Evaluate both inequalities for q and classify the outcome.

    The premise holds on the grid if every margin t^alpha - lhs is at least
    ``-tol_premise * t^alpha``.  Any quadrature divergence or non-convergence
    makes the verdict ``inconclusive``.
    """
    grid = default_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    if grid.size == 0:
        raise DomainError("t grid must not be empty")
    if np.any(grid <= 0.0):
        raise DomainError("t grid must be positive (t = 0 is excluded)")
    _check_nonnegative(q, grid)
    bound = conclusion_rhs(p)
    notes = []
    margins = []
    quadrature_ok = True
    diverged = False
    for t in grid:
        res = premise_lhs_result(q, float(t), p, cfg)
        diverged = diverged or res.diverged
        if not res.converged:
            quadrature_ok = False
            notes.append(f"premise quadrature did not converge at t={float(t)!r}")
        t_alpha = float(t) ** p.alpha
        margins.append(PremiseMargin(float(t), res.value, t_alpha, t_alpha - res.value))
    premise_ok = all(m.margin >= -tol_premise * m.t_alpha for m in margins)
    conclusion = conclusion_lhs(q, p.alpha, cfg)
    if not conclusion.converged:
        quadrature_ok = False
        notes.append("conclusion integral did not converge" + (" (diverges)" if conclusion.diverged else ""))
    diverged = diverged or conclusion.diverged
    ratio = conclusion.value / bound
    if not quadrature_ok:
        verdict: Verdict = "inconclusive"
    elif not premise_ok:
        verdict = "premise-violated"
    elif ratio > 1.0 + tol_ratio:
        verdict = "bound-exceeded"
    else:
        verdict = "consistent"
    return ConjectureReport(
        params=p,
        premise_margins=margins,
        premise_ok=premise_ok,
        conclusion_value=conclusion,
        bound=bound,
        ratio=ratio,
        verdict=verdict,
        family_id=family_id,
        tol_premise=tol_premise,
        tol_ratio=tol_ratio,
        notes=notes,
        diverged=diverged,
    )


Family = Callable[[ConjectureParams], Iterable[tuple[str, Callable]]]


def extremal_family(scales: Sequence[float] = (1.0,)) -> Family:
    """Family yielding scale * extremal_q(p) for each scale."""

    def family(p: ConjectureParams):
        base = extremal_q(p)
        for s in scales:
            fid = "extremal" if s == 1.0 else f"extremal*{s:g}"
            yield fid, base.scaled(s)

    return family


def mix_family(mixes: Sequence[PowerLawMix], names: Sequence[str] | None = None) -> Family:
    """Fixed list of power-law mixes, the same for every (alpha, n)."""
    names = list(names) if names is not None else [f"mix{i}" for i in range(len(mixes))]

    def family(p: ConjectureParams):
        return list(zip(names, mixes))

    return family


def _failed_report(p: ConjectureParams, fid: str, exc: Exception) -> ConjectureReport:
    return ConjectureReport(
        params=p,
        premise_margins=[],
        premise_ok=False,
        conclusion_value=None,
        bound=conclusion_rhs(p),
        ratio=float("nan"),
        verdict="inconclusive",
        family_id=fid,
        notes=[f"{type(exc).__name__}: {exc}"],
    )


def sweep(
    alphas: Sequence[float],
    ns: Sequence[int],
    family: Family,
    t_grid: Sequence[float] | None = None,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    tol_premise: float = DEFAULT_TOL_PREMISE,
    tol_ratio: float = DEFAULT_TOL_RATIO,
    max_workers: int | None = None,
) -> list[ConjectureReport]:
    """One report per (alpha, n, family member), ordered by that triple.

    A failing cell yields an ``inconclusive`` report carrying the error
    message; the sweep carries on.  With ``max_workers`` > 1 cells run on a
    thread pool, and the output order is unchanged.
    """
    cells = []
    for alpha in alphas:
        for n in ns:
            p = ConjectureParams(alpha, n)
            try:
                members = list(family(p))
            except (KhabError, ArithmeticError, ValueError) as exc:
                cells.append((p, "family", None, exc))
                continue
            for fid, q in members:
                cells.append((p, fid, q, None))

    def run(cell):
        p, fid, q, exc = cell
        if exc is not None:
            return _failed_report(p, fid, exc)
        try:
            return check(q, p, t_grid, cfg, tol_premise, tol_ratio, fid)
        except (KhabError, ArithmeticError, ValueError) as err:
            log.warning("sweep cell alpha=%g n=%d %s failed: %s", p.alpha, p.n, fid, err)
            return _failed_report(p, fid, err)

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(run, cells))
    return [run(c) for c in cells]
