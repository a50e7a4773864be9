"""Monte Carlo pipelines: counts, determinism, normalization, small-scale physics."""

import math

import numpy as np
import pytest

import rmtlab.experiments as experiments
from rmtlab.ensembles import EnsembleSpec, MatrixKind
from rmtlab.experiments import (
    MIDDLE_HALF,
    RealizationError,
    SpectralWindow,
    WindowMode,
    collect_components,
    collect_local_variance,
    collect_local_variance_multi,
    component_histogram,
    default_component_indices,
    fractal_prefactor,
    n_independence_scan,
    spread_component_indices,
)
from rmtlab.fitting import build_histogram, histogram_sup_distance, sup_distance_to_pdf
from rmtlab.distributions import ptd_pdf


def plbm(n, s=0.7, eps=1.0, seed=42):
    return EnsembleSpec(MatrixKind.PLBM, n, s, eps, seed)


class TestWindows:
    def test_middle_half_indices(self):
        idx = MIDDLE_HALF.indices(512)
        assert idx[0] == 128 and idx[-1] == 383 and idx.size == 256

    def test_centered_count_indices(self):
        win = SpectralWindow(WindowMode.CENTERED_COUNT, 50)
        idx = win.indices(1024)
        assert idx.size == 50
        assert idx[0] == 487 and idx[-1] == 536

    def test_centered_count_validation(self):
        with pytest.raises(ValueError):
            SpectralWindow(WindowMode.CENTERED_COUNT, 0)


class TestComponentCollection:
    def test_sample_count(self):
        cs = collect_components(plbm(64), 10, MIDDLE_HALF, (1, 16, 32))
        assert cs.values.size == 10 * 3 * 32

    def test_pooled_second_moment_is_one(self):
        cs = collect_components(plbm(128, s=0.7), 40, MIDDLE_HALF)
        blocks = (cs.values ** 2).reshape(40, -1).mean(axis=1)
        se = blocks.std(ddof=1) / math.sqrt(40)
        assert abs((cs.values ** 2).mean() - 1.0) <= 3.0 * se

    def test_thread_count_never_changes_values(self):
        a = collect_components(plbm(64), 8, MIDDLE_HALF, threads=1)
        b = collect_components(plbm(64), 8, MIDDLE_HALF, threads=4)
        assert np.array_equal(a.values, b.values)

    def test_component_index_validation(self):
        with pytest.raises(ValueError):
            collect_components(plbm(64), 2, MIDDLE_HALF, (0,))
        with pytest.raises(ValueError):
            collect_components(plbm(64), 2, MIDDLE_HALF, (65,))

    def test_goe_limit_matches_gaussian_density(self):
        cs = collect_components(plbm(512, s=0.0), 60, MIDDLE_HALF, spread_component_indices(512))
        hist = component_histogram(cs)
        assert sup_distance_to_pdf(hist, ptd_pdf) <= 0.03

    def test_eigensolver_failures_carry_the_realization_index(self, monkeypatch):
        original = experiments.eigh
        calls = {"n": 0}

        def flaky(matrix):
            calls["n"] += 1
            if calls["n"] == 4:
                raise RuntimeError("synthetic failure")
            return original(matrix)

        monkeypatch.setattr(experiments, "eigh", flaky)
        with pytest.raises(RealizationError, match="realization 3"):
            collect_components(plbm(32), 6, MIDDLE_HALF)


class TestLocalVariance:
    def test_grand_mean_is_one(self):
        vs = collect_local_variance(plbm(128), 60, 16)
        blocks = vs.values.reshape(60, -1).mean(axis=1)
        se = blocks.std(ddof=1) / math.sqrt(60)
        assert abs(vs.values.mean() - 1.0) <= 3.0 * se

    def test_multi_pass_equals_single_pass_bitwise(self):
        multi = collect_local_variance_multi(plbm(64), 6, (8, 16))
        single = collect_local_variance(plbm(64), 6, 16)
        assert np.array_equal(multi[16].values, single.values)

    def test_default_components_are_the_spread_nine(self):
        vs = collect_local_variance(plbm(64), 2, 8)
        assert vs.component_indices == (1, 8, 16, 24, 32, 40, 48, 56, 64)
        assert vs.values.size == 2 * 9

    def test_window_cap(self):
        with pytest.raises(ValueError, match="N/2"):
            collect_local_variance(plbm(64), 2, 33)


class TestScan:
    def test_distances_and_determinism(self):
        scan1 = n_independence_scan(plbm(64), (64, 128), 30)
        scan2 = n_independence_scan(plbm(64), (64, 128), 30)
        assert scan1.distances == scan2.distances
        (n_a, n_b, d) = scan1.distances[0]
        assert (n_a, n_b) == (64, 128)
        assert d >= 0.0

    def test_identical_runs_have_zero_distance(self):
        h1 = component_histogram(collect_components(plbm(64), 10, MIDDLE_HALF))
        h2 = component_histogram(collect_components(plbm(64), 10, MIDDLE_HALF))
        assert histogram_sup_distance(h1, h2) == 0.0

    def test_needs_two_dimensions(self):
        with pytest.raises(ValueError):
            n_independence_scan(plbm(64), (64,), 5)


class TestFractalMoments:
    def test_first_moment_is_normalization(self):
        cs = collect_components(plbm(128), 40, MIDDLE_HALF)
        fm = fractal_prefactor(cs, 1.0)
        assert abs(fm.estimate - 1.0) <= 3.0 * fm.std_error

    def test_goe_fourth_moment(self):
        cs = collect_components(plbm(256, s=0.0), 100, MIDDLE_HALF, spread_component_indices(256))
        fm = fractal_prefactor(cs, 2.0)
        assert fm.estimate == pytest.approx(3.0, rel=0.05)

    def test_analytic_companion(self):
        from rmtlab.distributions import constrain_unit_variance, ghd_moment

        params = constrain_unit_variance(3.3615, 0.7593)
        cs = collect_components(plbm(64), 5, MIDDLE_HALF)
        fm = fractal_prefactor(cs, 2.0, fitted_params=params)
        assert fm.analytic == pytest.approx(ghd_moment(2.0, params), rel=1e-12)

    def test_invalid_order(self):
        cs = collect_components(plbm(64), 2, MIDDLE_HALF)
        with pytest.raises(ValueError):
            fractal_prefactor(cs, 0.0)


class TestComponentIndependence:
    def test_first_and_middle_component_agree(self):
        # slow-decay regime; separate histograms from component 1 and N/2
        spec = plbm(512, s=0.7, seed=404)
        h_first = component_histogram(collect_components(spec, 500, MIDDLE_HALF, (1,)))
        h_mid = component_histogram(collect_components(spec, 500, MIDDLE_HALF, (256,)))
        assert histogram_sup_distance(h_first, h_mid) <= 0.04
