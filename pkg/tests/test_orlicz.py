import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modkant.errors import ConfigurationError, DivergenceError, DomainError
from modkant.kernels import absolute_moment0, bspline, fejer, kernel_l1_norm
from modkant.operators import ExactSupport, HalfWidth, OperatorParams, evaluate
from modkant.orlicz import (
    Exponential,
    LogPower,
    Power,
    composite_rule,
    delta2_probe,
    error_metrics,
    eta_eval,
    luxemburg_norm,
    modular,
    parse_eta,
)
from modkant.signals import builtin_signal, constant_signal, signal_integrate, signal_lp_norm

F1 = builtin_signal("f1")
F2 = builtin_signal("f2")
ETAS = [Power(1.0), Power(2.0), Power(3.5), LogPower(1.0, 1.0), LogPower(2.0, 0.5), Exponential(1.0), Exponential(2.0)]


class TestEta:
    def test_values(self):
        assert eta_eval(Power(2.0), 3.0) == 9.0
        assert eta_eval(LogPower(1.0, 1.0), 0.0) == 0.0
        assert eta_eval(Exponential(1.0), 1.0) == pytest.approx(math.e - 1, rel=1e-15)
        assert eta_eval(LogPower(1.0, 1.0), 1.0) == pytest.approx(math.log(math.e + 1), rel=1e-15)

    def test_expm1_accuracy_for_small_u(self):
        assert eta_eval(Exponential(1.0), 1e-12) == pytest.approx(1e-12, rel=1e-10)

    def test_negative_argument(self):
        with pytest.raises(DomainError):
            eta_eval(Power(2.0), -1.0)

    @pytest.mark.parametrize("text,expected", [
        ("l1", Power(1.0)), ("power:2", Power(2.0)), ("llogl", LogPower(1.0, 1.0)),
        ("logpower:2:0.5", LogPower(2.0, 0.5)), ("exp", Exponential(1.0)), ("exp:2", Exponential(2.0)),
    ])
    def test_parse(self, text, expected):
        assert parse_eta(text) == expected

    @pytest.mark.parametrize("text", ["power", "power:0.5", "gauss:1", "logpower:1"])
    def test_parse_errors(self, text):
        with pytest.raises(ConfigurationError):
            parse_eta(text)

    @pytest.mark.parametrize("eta", ETAS, ids=lambda e: e.name)
    def test_log_matches_direct(self, eta):
        u = np.array([1e-3, 0.5, 2.0, 7.0])
        np.testing.assert_allclose(eta.log(u), np.log(eta(u)), rtol=1e-12)


@pytest.mark.parametrize("eta", ETAS, ids=lambda e: e.name)
@settings(max_examples=60, deadline=None)
@given(u=st.floats(0, 20), v=st.floats(0, 20))
def test_eta_is_a_young_function(eta, u, v):
    assert eta(0.0) == 0.0
    lo, hi = sorted((u, v))
    assert eta(lo) <= eta(hi)
    if hi > 1e-100:
        assert eta(hi) > 0
    assert eta(0.5 * (u + v)) <= 0.5 * (eta(u) + eta(v)) * (1 + 1e-12) + 1e-300


class TestModular:
    def test_l1_of_f1(self):
        assert modular(Power(1.0), F1, 1.0, (-2, 2), 400) == pytest.approx(2.0, abs=1e-8)

    def test_l2_scaled(self):
        assert modular(Power(2.0), F1, 2.0, (-2, 2), 400) == pytest.approx(8.0, abs=1e-7)

    @pytest.mark.parametrize("eta", ETAS, ids=lambda e: e.name)
    def test_zero(self, eta):
        assert modular(eta, constant_signal(0.0), 3.0) == 0.0

    def test_lambda_positive(self):
        with pytest.raises(ConfigurationError):
            modular(Power(1.0), F1, 0.0)

    def test_composite_rule_integrates_exactly(self):
        nodes, weights = composite_rule(-1.0, 3.0, 7)
        assert weights @ nodes ** 5 == pytest.approx((3.0 ** 6 - 1.0) / 6, rel=1e-13)
        assert weights.sum() == pytest.approx(4.0, rel=1e-15)

    def test_llogl_of_f1(self):
        # 2 * lam * log(e + lam) on the support
        assert modular(LogPower(1.0, 1.0), F1, 0.5, (-2, 2), 400) == pytest.approx(math.log(math.e + 0.5), rel=1e-12)


class TestLuxemburg:
    def test_l2_of_f1(self):
        assert luxemburg_norm(Power(2.0), F1, (-2, 2), 400) == pytest.approx(math.sqrt(2), abs=1e-6)

    def test_l1_of_f1(self):
        assert luxemburg_norm(Power(1.0), F1) == pytest.approx(2.0, abs=1e-6)

    def test_zero(self):
        assert luxemburg_norm(Exponential(1.0), constant_signal(0.0)) == 0.0

    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
    @pytest.mark.parametrize("signal", [F1, F2], ids=["f1", "f2"])
    def test_power_matches_lp(self, p, signal):
        assert luxemburg_norm(Power(p), signal) == pytest.approx(signal_lp_norm(signal, p, (-20, 20)), abs=1e-6)

    @pytest.mark.parametrize("eta", ETAS, ids=lambda e: e.name)
    @pytest.mark.parametrize("signal", [F1, F2], ids=["f1", "f2"])
    def test_unit_modular_at_norm(self, eta, signal):
        norm = luxemburg_norm(eta, signal)
        assert modular(eta, signal, 1.0 / norm) <= 1 + 1e-6

    @pytest.mark.parametrize("eta", ETAS, ids=lambda e: e.name)
    @pytest.mark.parametrize("c", [0.5, 2.0, 10.0])
    def test_homogeneous(self, eta, c):
        base = luxemburg_norm(eta, F2)
        assert luxemburg_norm(eta, c * F2) == pytest.approx(c * base, rel=1e-6)

    def test_llogl_closed_form(self):
        # 2 (1/lam) log(e + 1/lam) = 1 for f1
        norm = luxemburg_norm(LogPower(1.0, 1.0), F1)
        x = 1 / norm
        assert 2 * x * math.log(math.e + x) == pytest.approx(1.0, abs=1e-7)

    def test_bracket_divergence(self):
        huge = constant_signal(1e300)
        with pytest.raises(DivergenceError):
            luxemburg_norm(Exponential(1.0), huge, window=(0, 1), grid_n=1)


class TestDelta2:
    @pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
    def test_power_ratio(self, p):
        res = delta2_probe(Power(p), np.geomspace(1e-3, 1e6, 200))
        assert res.sup_ratio == pytest.approx(2 ** p, abs=1e-10)
        assert res.bounded

    def test_llogl_bounded(self):
        res = delta2_probe(LogPower(1.0, 1.0), np.geomspace(1e-3, 1e6, 400))
        assert res.bounded and res.sup_ratio < 4

    def test_exponential_unbounded(self):
        assert not delta2_probe(Exponential(1.0), np.linspace(0.01, 100, 500)).bounded

    def test_empty_grid(self):
        with pytest.raises(ConfigurationError):
            delta2_probe(Power(2.0), [])


class TestErrorMetrics:
    def test_exact_approximation(self):
        ys = np.linspace(-3, 3, 61)
        rep = error_metrics(F2, ys, F2(ys), modulars=[(Exponential(1.0), 1.0)])
        assert rep.sup_error == 0.0 and rep.lp_errors == {1: 0.0, 2: 0.0}
        assert rep.modular_errors[("exp:1", 1.0)] == 0.0

    def test_zero_approximation_of_f1(self):
        ys = np.linspace(-2, 2, 40001)
        rep = error_metrics(F1, ys, np.zeros_like(ys))
        assert rep.lp_errors[1] == pytest.approx(2.0, abs=1e-3)
        assert rep.sup_error == 1.0 and rep.window == (-2.0, 2.0) and rep.grid_n == 40001

    def test_continuity_sup(self):
        ys = np.linspace(-3, 3, 601)
        approx = F1(ys) + np.where(np.abs(np.abs(ys) - 1) < 0.1, 0.5, 0.0)
        rep = error_metrics(F1, ys, approx, jump_margin=0.25)
        assert rep.sup_error == 0.5 and rep.sup_continuity_error == 0.0

    def test_bad_grids(self):
        with pytest.raises(ConfigurationError):
            error_metrics(F1, [], [])
        with pytest.raises(ConfigurationError):
            error_metrics(F1, [0.0, 1.0], [0.0])
        with pytest.raises(ConfigurationError):
            error_metrics(F1, [1.0, 0.0], [0.0, 0.0])

    @settings(max_examples=100, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(2, 300))
    def test_holder_on_window(self, seed, n):
        rng = np.random.default_rng(seed)
        ys = np.sort(rng.uniform(-4, 4, n))
        ys = np.unique(ys)
        if ys.size < 2:
            return
        rep = error_metrics(F2, ys, rng.normal(size=ys.size))
        width = ys[-1] - ys[0]
        assert rep.sup_error >= rep.lp_errors[2] / math.sqrt(width) - 1e-12
        assert rep.lp_errors[1] <= math.sqrt(width) * rep.lp_errors[2] + 1e-12
        assert all(v >= 0 for v in rep.lp_errors.values())


# -- modular inequalities for the sampling series ---------------------------

WINDOW = (-20.0, 20.0)
SETTINGS = [(k, g, w) for k in ("fejer", "bspline3") for g in ("f1", "f2") for w in (5.0, 10.0)]


def kernel_and_truncation(name):
    return (fejer(), HalfWidth(1000)) if name == "fejer" else (bspline(3), ExactSupport())


def series(kernel_name, signal, kind, w, alpha=0.5):
    kernel, trunc = kernel_and_truncation(kernel_name)
    p = OperatorParams(kind, w, alpha, trunc)
    return kernel, (lambda y: evaluate(kernel, signal, p, y))


@pytest.mark.parametrize("kernel_name,signal_name,w", SETTINGS)
@pytest.mark.parametrize("eta,lam", [(Power(2.0), 1.0), (LogPower(1.0, 1.0), 0.5), (Exponential(1.0), 0.1)],
                         ids=["u2", "llogl", "exp"])
def test_modified_series_modular_bound(kernel_name, signal_name, w, eta, lam):
    # Jensen in the kernel sum and in each mean, then u = (i + t^alpha)/(w+1):
    # for alpha <= 1 the t-measure of each mean is at most (w+1)/alpha times the u-measure
    alpha = 0.5
    g = builtin_signal(signal_name)
    kernel, h = series(kernel_name, g, "modified", w, alpha)
    mu0 = absolute_moment0(kernel)
    lhs = modular(eta, h, lam, WINDOW)
    rhs = (w + 1) / (alpha * w) * kernel_l1_norm(kernel) / mu0 * modular(eta, g, lam * mu0, (-200, 200), 8000)
    assert lhs <= rhs + 1e-6


@pytest.mark.parametrize("kernel_name,signal_name,w", SETTINGS)
@pytest.mark.parametrize("eta,lam", [(Power(2.0), 1.0), (LogPower(1.0, 1.0), 0.5), (Exponential(1.0), 0.1)],
                         ids=["u2", "llogl", "exp"])
def test_kantorovich_series_modular_bound(kernel_name, signal_name, w, eta, lam):
    g = builtin_signal(signal_name)
    kernel, h = series(kernel_name, g, "kantorovich", w)
    mu0 = absolute_moment0(kernel)
    lhs = modular(eta, h, lam, WINDOW)
    rhs = kernel_l1_norm(kernel) / mu0 * modular(eta, g, lam * mu0, (-200, 200), 8000)
    assert lhs <= rhs + 1e-6


def test_modified_series_exceeds_unit_factor_bound():
    # every mean with -6 <= i <= 5 is 1, so int T_5 f1 = 12/5 > int f1 = 2
    _, h = series("bspline3", F1, "modified", 5.0)
    assert modular(Power(1.0), h, 1.0, WINDOW) == pytest.approx(12 / 5, abs=1e-12)
    assert modular(Power(1.0), F1, 1.0, WINDOW) == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("w", [5.0, 10.0, 20.0])
def test_alpha_one_mass_ratio(w):
    # for alpha = 1 the means are exact (w+1)-grid averages, so mass scales by (w+1)/w
    _, h = series("bspline3", F2, "modified", w, alpha=1.0)
    nodes, weights = composite_rule(-60.0, 60.0, 2400)
    got = float(weights @ h(nodes))
    # indices seen from [-60, 60] carry means of g over |u| <= 60 w/(w+1)
    reach = 60.0 * w / (w + 1)
    expected = (w + 1) / w * signal_integrate(F2, -reach, reach)
    assert got == pytest.approx(expected, abs=1e-3)
