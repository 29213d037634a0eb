"""Tracing, closure, sampling, and the spectral quadrature contract."""

import math

import numpy as np
import pytest

from zollforms.fourier import periodic_mean, spectral_antiderivative, spectral_derivative
from zollforms.geodesic import (
    closure_defect,
    sample_initial_conditions,
    tangential_derivative,
    trace_geodesic,
)
from zollforms.surface import IntegrationError


class TestTracing:
    def test_round_equator(self, round_path):
        assert np.allclose(round_path.tau, 1.0)
        assert round_path.closure_defect < 1e-10

    def test_round_generic(self, round_metric):
        ic = sample_initial_conditions(1, seed=4)[0]
        path = trace_geodesic(round_metric, ic, 1024)
        assert np.allclose(path.tau, 1.0, atol=1e-12)
        assert path.closure_defect < 1e-10

    def test_zoll_closure(self, cubic_path, linear_path):
        assert cubic_path.closure_defect < 1e-6
        assert linear_path.closure_defect < 1e-6

    def test_linear_profile_closure_at_2048(self, linear_metric):
        ic = sample_initial_conditions(1, seed=8)[0]
        path = trace_geodesic(linear_metric, ic, 2048)
        assert path.closure_defect < 1e-6

    def test_small_amplitude_profile_closure(self):
        from zollforms.surface import MetricModel
        metric = MetricModel.zoll_revolution([0.05])
        ic = sample_initial_conditions(1, seed=9)[0]
        path = trace_geodesic(metric, ic, 512)
        assert path.closure_defect < 1e-6

    def test_frame_orthonormal(self, cubic_path):
        t, n = cubic_path.tangent, cubic_path.normal
        assert np.max(np.abs(np.sum(t * t, axis=1) - 1.0)) < 1e-10
        assert np.max(np.abs(np.sum(t * n, axis=1))) < 1e-10

    def test_non_zoll_rejected(self, nonzoll_metric, generic_ic):
        with pytest.raises(IntegrationError, match="not Zoll"):
            trace_geodesic(nonzoll_metric, generic_ic, 512)

    def test_non_zoll_defect_magnitude(self, nonzoll_path):
        assert closure_defect(nonzoll_path) > 1e-2

    def test_grid_validation(self, round_metric, equator_ic):
        with pytest.raises(ValueError):
            trace_geodesic(round_metric, equator_ic, 1000)
        with pytest.raises(ValueError):
            trace_geodesic(round_metric, equator_ic, 128)

    def test_rebase_rolls_samples(self, cubic_path):
        shifted = cubic_path.rebase(100)
        assert np.allclose(shifted.tau, np.roll(cubic_path.tau, -100))
        assert shifted.closure_defect == cubic_path.closure_defect


class TestSpectralDerivative:
    def test_constant(self, round_path):
        der = tangential_derivative(round_path, np.full(round_path.n, 2.5))
        assert np.max(np.abs(der)) < 1e-12

    def test_sine(self, round_path):
        der = tangential_derivative(round_path, np.sin(round_path.s))
        assert np.max(np.abs(der - np.cos(round_path.s))) < 1e-10

    def test_tau_s_two_routes(self, cubic_path):
        der = tangential_derivative(cubic_path, cubic_path.tau)
        assert np.max(np.abs(der - cubic_path.tau_s)) < 1e-7

    def test_derivative_mean_vanishes(self, cubic_path):
        der = tangential_derivative(cubic_path, cubic_path.tau_nu)
        assert abs(periodic_mean(der)) < 1e-12

    def test_grid_mismatch_rejected(self, cubic_path):
        with pytest.raises(ValueError):
            tangential_derivative(cubic_path, np.ones(cubic_path.n // 2))

    def test_antiderivative_closed_form(self):
        n = 512
        s = 2.0 * math.pi * np.arange(n) / n
        f = np.cos(3 * s)
        got = spectral_antiderivative(f)
        assert np.max(np.abs(got - np.sin(3 * s) / 3.0)) < 1e-12

    def test_antiderivative_vs_trapezoid(self, cubic_path):
        f = cubic_path.tau_nu * cubic_path.tau
        got = spectral_antiderivative(f)
        # independent cumulative trapezoid oracle, O(h^2) accurate
        hstep = 2.0 * math.pi / cubic_path.n
        trap = np.concatenate(([0.0], np.cumsum((f[1:] + f[:-1]) / 2.0))) * hstep
        assert np.max(np.abs(got - trap)) < 40.0 * hstep**2


class TestQuadratureContract:
    def test_doubling_grid_is_stable(self, cubic_metric, generic_ic,
                                     cubic_path, cubic_path_2048):
        """Integrals of products of up to 8 sampled factors move < 1e-9."""
        for path_a, path_b in ((cubic_path, cubic_path_2048),):
            for fields in (("tau",), ("tau", "tau_nu"),
                           ("tau",) * 4 + ("tau_nu",) * 4):
                prod_a = np.ones(path_a.n)
                prod_b = np.ones(path_b.n)
                for name in fields:
                    prod_a = prod_a * getattr(path_a, name)
                    prod_b = prod_b * getattr(path_b, name)
                int_a = 2 * math.pi * periodic_mean(prod_a)
                int_b = 2 * math.pi * periodic_mean(prod_b)
                assert abs(int_a - int_b) < 1e-9

    def test_sampling_reproducible(self):
        a = sample_initial_conditions(5, seed=42)
        b = sample_initial_conditions(5, seed=42)
        for (pa, va), (pb, vb) in zip(a, b):
            assert pa == pb and va == vb
