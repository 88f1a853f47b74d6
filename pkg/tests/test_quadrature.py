import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modkant.errors import ConfigurationError, QuadratureError
from modkant.quadrature import (
    MeanRequest,
    adaptive_simpson,
    classical_mean,
    gauss_legendre,
    kantorovich_mean,
    mean_integrand_simpson,
    modified_mean_alpha_one,
)
from modkant.signals import Piece, PiecewiseSignal, Polynomial, builtin_signal

F1 = builtin_signal("f1")
F2 = builtin_signal("f2")


def identity_on_unit():
    # g(u) = u on [0, 1), zero elsewhere
    return PiecewiseSignal((
        Piece(-math.inf, 0.0, Polynomial((0.0,))),
        Piece(0.0, 1.0, Polynomial((0.0, 1.0))),
        Piece(1.0, math.inf, Polynomial((0.0,))),
    ))


class TestRules:
    def test_gauss_legendre_exact_for_degree_31(self):
        assert gauss_legendre(lambda x: x ** 31 + x ** 30, -1.0, 1.0) == pytest.approx(2 / 31, rel=1e-13)

    def test_gauss_legendre_order_bounds(self):
        with pytest.raises(ConfigurationError):
            gauss_legendre(np.sin, 0, 1, order=1)
        with pytest.raises(ConfigurationError):
            gauss_legendre(np.sin, 0, 1, order=65)

    def test_simpson_smooth(self):
        assert adaptive_simpson(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-10)

    def test_simpson_jump(self):
        assert adaptive_simpson(lambda x: 1.0 if x < 0.3 else 0.0, 0.0, 1.0) == pytest.approx(0.3, abs=1e-9)

    def test_simpson_sqrt(self):
        assert adaptive_simpson(math.sqrt, 0.0, 1.0) == pytest.approx(2 / 3, abs=1e-9)

    def test_simpson_depth_cap_keeps_partial(self):
        with pytest.raises(QuadratureError) as info:
            adaptive_simpson(lambda x: 1.0 if x < 1 / 3 else 0.0, 0.0, 1.0, tol=1e-14, max_depth=4)
        assert info.value.partial == pytest.approx(1 / 3, abs=0.05)

    def test_simpson_empty_interval(self):
        assert adaptive_simpson(math.exp, 1.0, 1.0) == 0.0


class TestMeans:
    def test_identity_mean(self):
        # i = 0 and w -> 0: the mean is int_0^1 t^alpha dt = 1/(alpha + 1)
        for alpha in (0.3, 0.5, 1.0, 2.0):
            assert kantorovich_mean(identity_on_unit(), 0, 1e-300, alpha) == pytest.approx(1 / (alpha + 1), abs=1e-13)

    def test_interior_constant_region(self):
        assert kantorovich_mean(F1, 0, 5.0, 0.5) == 1.0
        assert kantorovich_mean(F1, 20, 5.0, 0.5) == 0.0

    def test_frozen_f2_value(self):
        # i = -3, w = 1: argument (t^alpha - 3)/2 runs over [-1.5, -1]; g = -1/2 there
        assert kantorovich_mean(F2, -3, 1.0, 0.5) == pytest.approx(-0.5, abs=1e-15)
        # i = -2, w = 1: (t^0.5 - 2)/2 in [-1, -1/2), g = 3/2
        assert kantorovich_mean(F2, -2, 1.0, 0.5) == pytest.approx(1.5, abs=1e-15)

    def test_breakpoint_inside_mean(self):
        # i = -1, w = 3: u = (t^0.5 - 1)/4 stays in [-1/4, 0) where g = 3/2
        assert kantorovich_mean(F2, -1, 3.0, 0.5) == pytest.approx(1.5, abs=1e-15)
        # i = -3, w = 1.5: u = (t^0.5 - 3)/2.5 crosses -1 at t = 1/4,
        # so g = -1/2 on [0, 1/4) and 3/2 on [1/4, 1]
        assert kantorovich_mean(F2, -3, 1.5, 0.5) == pytest.approx(0.25 * -0.5 + 0.75 * 1.5, abs=1e-14)

    @pytest.mark.parametrize("signal", [F1, F2])
    @pytest.mark.parametrize("w", [5.0, 10.0])
    def test_alpha_one_reduction(self, signal, w):
        for i in range(-50, 51):
            assert kantorovich_mean(signal, i, w, 1.0) == pytest.approx(
                modified_mean_alpha_one(signal, i, w), abs=1e-10)

    def test_classical_mean(self):
        assert classical_mean(F1, -5, 5.0) == pytest.approx(1.0, abs=1e-15)
        assert classical_mean(F2, 0, 1.0) == 1.0
        assert classical_mean(F2, 0, 0.5) == pytest.approx(0.5 * (1.0 - 1.0), abs=1e-15)

    def test_request_object(self):
        req = MeanRequest(F2, -4, 3.0, 0.5)
        assert req.evaluate() == pytest.approx(mean_integrand_simpson(F2, -4, 3.0, 0.5), abs=1e-9)
        assert req.integrand(0.0) == F2.value(-1.0)

    @pytest.mark.parametrize("bad", [dict(w=0.0), dict(alpha=0.0), dict(alpha=-1.0)])
    def test_rejects_bad_parameters(self, bad):
        args = dict(w=5.0, alpha=0.5) | bad
        with pytest.raises(ConfigurationError):
            kantorovich_mean(F1, 0, args["w"], args["alpha"])


@settings(max_examples=150, deadline=None)
@given(
    which=st.sampled_from(["f1", "f2"]),
    i=st.integers(-60, 60),
    w=st.floats(0.5, 30.0),
    alpha=st.sampled_from([0.3, 0.5, 1.0, 2.0, 0.75]),
)
def test_mean_matches_simpson_oracle(which, i, w, alpha):
    sig = builtin_signal(which)
    assert kantorovich_mean(sig, i, w, alpha) == pytest.approx(mean_integrand_simpson(sig, i, w, alpha), abs=1e-8)


@settings(max_examples=100, deadline=None)
@given(i=st.integers(-40, 40), w=st.floats(1.0, 20.0), alpha=st.floats(0.2, 3.0))
def test_mean_within_signal_range(i, w, alpha):
    lo, hi = i / (w + 1), (i + 1) / (w + 1)
    inner = F2.breakpoints[(F2.breakpoints > lo) & (F2.breakpoints < hi)]
    vals = F2(np.concatenate([np.linspace(lo, hi, 257), inner, inner - 1e-12]))
    m = kantorovich_mean(F2, i, w, alpha)
    assert vals.min() - 1e-12 <= m <= vals.max() + 1e-12


@settings(max_examples=100, deadline=None)
@given(i=st.integers(-40, 40), w=st.floats(1.0, 20.0), alpha=st.floats(0.2, 3.0))
def test_mean_stable_under_order(i, w, alpha):
    assert kantorovich_mean(F2, i, w, alpha, order=8) == pytest.approx(kantorovich_mean(F2, i, w, alpha), abs=1e-9)
