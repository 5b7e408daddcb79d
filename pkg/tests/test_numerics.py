import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from khabconv.errors import ConfigurationError, DomainError, EvaluationError
from khabconv.numerics import (
    DiffConfig,
    QuadratureConfig,
    TransformResult,
    combine,
    differentiate,
    fit_polynomial,
    integrate_adaptive,
    integrate_log_singular,
    integrate_to_infinity,
    richardson_derivative,
    window_nodes,
)

CFG = QuadratureConfig()

ADAPTIVE_CASES = [
    (lambda x: np.ones_like(x), 0.0, 1.0, 1.0),
    (lambda x: x**2, 0.0, 3.0, 9.0),
    (np.sin, 0.0, math.pi, 2.0),
    (lambda x: np.exp(-x) * np.cos(5 * x), 0.0, 4.0, (1 - math.exp(-4) * (math.cos(20) - 5 * math.sin(20))) / 26),
]

LOG_SINGULAR_CASES = [
    (lambda y: np.ones_like(y), 1.0, 1.0),
    (lambda y: -np.log(y), 1.0, 1.0),
    (lambda y: -y * np.log(y), 1.0, 0.25),
    (lambda y: y**-0.5, 4.0, 4.0),
    (lambda y: np.log(y) ** 2, 1.0, 2.0),
    (lambda y: y**-0.9, 1.0, 10.0),
]

INFINITY_CASES = [
    (lambda t: np.exp(-t), 1.0),
    (lambda t: np.log1p(1.0 / t**2), math.pi),
    (lambda t: np.zeros_like(t), 0.0),
    (lambda t: 1.0 / (1.0 + t**2), math.pi / 2),
]


def _honest(res: TransformResult, truth: float) -> None:
    assert res.converged
    assert res.error_estimate >= 0.0
    assert abs(res.value - truth) <= max(3.0 * res.error_estimate, 1e-15 * max(1.0, abs(truth)))


class TestIntegrateAdaptive:
    @pytest.mark.parametrize("f,a,b,truth", ADAPTIVE_CASES)
    def test_examples(self, f, a, b, truth):
        res = integrate_adaptive(f, a, b, CFG)
        assert res.value == pytest.approx(truth, rel=1e-10, abs=1e-12)
        _honest(res, truth)

    def test_scalar_only_integrand(self):
        res = integrate_adaptive(lambda x: math.exp(x), 0.0, 1.0, CFG)
        assert res.value == pytest.approx(math.e - 1.0, rel=1e-12)

    def test_non_convergence_is_reported(self):
        cfg = QuadratureConfig(max_subdivisions=1)
        res = integrate_adaptive(lambda x: np.abs(x - 0.3141) ** 0.1, 0.0, 1.0, cfg)
        assert not res.converged
        assert res.subdivisions_used == 1

    def test_nan_raises(self):
        with pytest.raises(EvaluationError):
            integrate_adaptive(lambda x: np.full_like(x, np.nan), 0.0, 1.0, CFG)

    def test_bad_bounds(self):
        with pytest.raises(ConfigurationError):
            integrate_adaptive(np.sin, 1.0, 1.0, CFG)

    @pytest.mark.parametrize("c", [0.5, 2.0, 10.0])
    def test_scaling(self, c):
        f = lambda x: np.exp(-x) * (1 + x**2)
        base = integrate_adaptive(f, 0.2, 3.0, CFG).value
        scaled = integrate_adaptive(lambda x: f(c * x), 0.2 / c, 3.0 / c, CFG).value * c
        assert scaled == pytest.approx(base, rel=1e-10)

    def test_converged_bound(self):
        res = integrate_adaptive(lambda x: np.sqrt(x), 0.0, 2.0, CFG)
        assert res.converged
        assert res.error_estimate <= CFG.tolerance(res.value)


class TestIntegrateLogSingular:
    @pytest.mark.parametrize("f,b,truth", LOG_SINGULAR_CASES)
    def test_examples(self, f, b, truth):
        res = integrate_log_singular(f, b, CFG)
        assert res.value == pytest.approx(truth, rel=1e-10, abs=1e-12)
        _honest(res, truth)
        assert not res.diverged

    @pytest.mark.parametrize("f", [lambda y: 1.0 / y, lambda y: y**-1.2, lambda y: y**-1.0 / np.abs(np.log(y / 2))])
    def test_divergence_detected(self, f):
        res = integrate_log_singular(f, 1.0, CFG)
        assert not res.converged
        assert res.diverged or res.error_estimate > CFG.tolerance(res.value)

    def test_hard_divergence_flag(self):
        for f in (lambda y: 1.0 / y, lambda y: y**-1.2):
            assert integrate_log_singular(f, 1.0, CFG).diverged

    def test_agrees_with_adaptive_on_smooth(self):
        f = lambda y: np.cos(y) * np.exp(y)
        a = integrate_adaptive(f, 0.0, 2.0, CFG)
        b = integrate_log_singular(f, 2.0, CFG)
        assert abs(a.value - b.value) <= a.error_estimate + b.error_estimate + 1e-12

    def test_zero_integrand(self):
        res = integrate_log_singular(lambda y: np.zeros_like(y), 3.0, CFG)
        assert res.value == 0.0 and res.converged

    def test_converged_bound(self):
        res = integrate_log_singular(lambda y: -np.log(y) * y**-0.5, 1.0, CFG)
        assert res.value == pytest.approx(4.0, rel=1e-10)
        assert res.error_estimate <= CFG.tolerance(res.value)

    def test_bad_limit(self):
        with pytest.raises(ConfigurationError):
            integrate_log_singular(np.cos, 0.0, CFG)


class TestIntegrateToInfinity:
    @pytest.mark.parametrize("f,truth", INFINITY_CASES)
    def test_examples(self, f, truth):
        res = integrate_to_infinity(f, 0.0, CFG)
        assert res.value == pytest.approx(truth, rel=1e-10, abs=1e-12)
        _honest(res, truth)

    def test_positive_lower_limit(self):
        res = integrate_to_infinity(lambda t: t**-2, 0.5, CFG)
        assert res.value == pytest.approx(2.0, rel=1e-10)
        res = integrate_to_infinity(lambda t: np.exp(-t), 3.0, CFG)
        assert res.value == pytest.approx(math.exp(-3.0), rel=1e-10)

    def test_divergent_tail(self):
        res = integrate_to_infinity(lambda t: np.ones_like(t), 0.0, CFG)
        assert res.diverged and not res.converged

    def test_negative_lower_limit(self):
        with pytest.raises(ConfigurationError):
            integrate_to_infinity(np.exp, -1.0, CFG)


class TestCombineAndConfig:
    def test_combine(self):
        a = TransformResult(1.0, 1e-12, True, 3)
        b = TransformResult(2.0, 2e-12, False, 4, diverged=True)
        c = combine(a, b)
        assert c.value == 3.0 and c.error_estimate == pytest.approx(3e-12)
        assert not c.converged and c.diverged and c.subdivisions_used == 7

    @pytest.mark.parametrize(
        "kwargs",
        [{"rel_tol": 0.0}, {"abs_tol": -1.0}, {"max_subdivisions": 0}, {"geometric_ratio": 1.0}, {"order": 5}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigurationError):
            QuadratureConfig(**kwargs)

    def test_to_dict(self):
        d = TransformResult(1.5, 0.0, True).to_dict()
        assert d["value"] == 1.5 and d["converged"] is True


class TestDifferentiate:
    def test_examples(self):
        assert differentiate(lambda t: t**2, 1.0, 1) == pytest.approx(2.0, abs=1e-9)
        assert differentiate(lambda t: t**4, 1.0, 3) == pytest.approx(24.0, abs=1e-8)
        for order in (1, 2, 4):
            assert differentiate(lambda t: np.full_like(t, 7.0), 2.5, order) == pytest.approx(0.0, abs=1e-6)

    @pytest.mark.parametrize("j", range(0, 9))
    def test_exact_on_monomials(self, j):
        cfg = DiffConfig(window_points=21, fit_degree=8)
        for order in range(1, 4):
            expected = math.perm(j, order) if order <= j else 0.0
            assert differentiate(lambda t: t**j, 1.0, order, cfg) == pytest.approx(expected, abs=1e-9)

    def test_smooth_function(self):
        assert differentiate(np.exp, 1.0, 5) == pytest.approx(math.e, rel=1e-5)
        assert differentiate(np.log, 2.0, 2) == pytest.approx(-0.25, rel=1e-6)

    def test_uniform_rule(self):
        cfg = DiffConfig(window_points=15, fit_degree=7, grid_spacing_rule="uniform")
        assert differentiate(np.sin, 1.0, 2, cfg) == pytest.approx(-math.sin(1.0), rel=1e-7)
        assert np.allclose(np.diff(window_nodes(1.0, cfg), 2), 0.0, atol=1e-15)

    def test_window_nodes(self):
        x = window_nodes(2.0, DiffConfig())
        assert x[0] == pytest.approx(1.8) and x[-1] == pytest.approx(2.2)
        assert np.allclose(np.diff(np.log(x), 2), 0.0, atol=1e-14)

    def test_errors(self):
        with pytest.raises(DomainError):
            differentiate(np.exp, 1.0, 0)
        with pytest.raises(DomainError):
            differentiate(np.exp, -1.0, 1)
        with pytest.raises(ConfigurationError):
            differentiate(np.exp, 1.0, 5, DiffConfig(window_points=9, fit_degree=3))
        with pytest.raises(ConfigurationError):
            DiffConfig(window_points=4, fit_degree=4)
        with pytest.raises(ConfigurationError):
            fit_polynomial(np.ones(10), np.ones(10), 3)


class TestRichardson:
    @pytest.mark.parametrize("one_sided", [-1, 0, 1])
    def test_exp(self, one_sided):
        for order in (1, 2, 3):
            est, err = richardson_derivative(np.exp, 0.5, order, 0.05, levels=6, one_sided=one_sided)
            assert est == pytest.approx(math.exp(0.5), rel=1e-6)
            assert err < 1e-5

    def test_order_zero(self):
        assert richardson_derivative(np.exp, 0.0, 0, 0.1) == (1.0, 0.0)

    @given(st.integers(1, 3), st.floats(0.2, 3.0))
    @settings(max_examples=30, deadline=None)
    def test_agrees_with_polynomial_fit(self, order, t):
        f = lambda x: np.sin(x) + x**3
        est, _ = richardson_derivative(f, t, order, 0.05 * t)
        assert est == pytest.approx(differentiate(f, t, order), rel=1e-5, abs=1e-6)
