"""Histogram machinery, the simplex minimizer, and the density fits."""

import math

import numpy as np
import pytest
from scipy import stats

from rmtlab.distributions import constrain_unit_variance, ghd_pdf, ptd_pdf
from rmtlab.fitting import (
    Chi2FitResult,
    FitError,
    build_histogram,
    fit_chi2_to_ghd,
    fit_ghd,
    fit_ghd_arrays,
    histogram_sup_distance,
    minimize,
    sup_distance_to_pdf,
)


def sample_ghd(params, size, seed):
    """Test-infrastructure sampler: scipy's generalized inverse Gaussian drives
    the variance mixture, independent of the package's density code."""
    rng = np.random.default_rng(seed)
    y = (params.delta / params.alpha) * stats.geninvgauss.rvs(
        params.lam, params.xi, size=size, random_state=rng
    )
    return np.sqrt(y) * rng.standard_normal(size)


class TestHistogram:
    def test_normal_samples_density_at_origin(self):
        rng = np.random.default_rng(123)
        hist = build_histogram(rng.standard_normal(1_000_000), 0.1, 5.0)
        mid = np.argmin(np.abs(hist.bin_centers - 0.05))
        assert hist.density[mid] == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), abs=0.01)

    def test_point_mass(self):
        hist = build_histogram(np.full(100, 0.05), 0.1, 5.0)
        assert hist.density.max() == pytest.approx(10.0, rel=1e-12)
        assert (hist.density > 0).sum() == 1

    def test_normalization_invariant(self):
        rng = np.random.default_rng(5)
        for scale in (0.1, 1.0, 10.0):
            hist = build_histogram(rng.standard_normal(5000) * scale, 0.05, 6.0)
            assert float(np.sum(hist.density) * hist.bin_width) == pytest.approx(1.0, abs=1e-12)

    def test_exclusions_counted(self):
        hist = build_histogram(np.array([0.0, 0.1, 100.0, -50.0]), 0.1, 5.0)
        assert hist.sample_count == 4
        assert int(hist.counts.sum()) == 2
        assert hist.excluded_fraction == pytest.approx(0.5)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            build_histogram(np.array([]), 0.1, 5.0)

    def test_width_must_divide_range(self):
        with pytest.raises(ValueError, match="divide"):
            build_histogram(np.array([0.0]), 0.3, 5.0)

    def test_sup_distance_requires_shared_edges(self):
        a = build_histogram(np.array([0.0, 1.0]), 0.1, 5.0)
        b = build_histogram(np.array([0.0, 1.0]), 0.1, 6.0)
        with pytest.raises(ValueError):
            histogram_sup_distance(a, b)


class TestMinimize:
    def test_quadratic_bowl(self):
        res = minimize(lambda a, b: (a - 1.0) ** 2 + (b + 2.0) ** 2, (0.0, 0.0), (1.0, 1.0))
        assert res.converged
        assert res.x[0] == pytest.approx(1.0, abs=1e-5)
        assert res.x[1] == pytest.approx(-2.0, abs=1e-5)

    def test_rosenbrock(self):
        res = minimize(
            lambda a, b: (1.0 - a) ** 2 + 100.0 * (b - a * a) ** 2, (-1.2, 1.0), (1.0, 1.0)
        )
        assert res.converged
        assert res.x[0] == pytest.approx(1.0, abs=1e-3)
        assert res.x[1] == pytest.approx(1.0, abs=1e-3)

    def test_iteration_cap_sets_flag(self):
        res = minimize(
            lambda a, b: (1.0 - a) ** 2 + 100.0 * (b - a * a) ** 2,
            (-1.2, 1.0),
            (1.0, 1.0),
            max_iterations=5,
        )
        assert not res.converged
        assert res.iterations == 5

    def test_nan_objective_is_an_error_with_the_point(self):
        def bad(a, b):
            return math.nan if a > 0.5 else a * a + b * b

        with pytest.raises(FitError, match=r"\("):
            minimize(bad, (0.0, 0.0), (1.0, 1.0))


class TestGhdFit:
    def test_round_trip_from_exact_samples(self):
        params = constrain_unit_variance(0.5862, 1.2754 * 0.3945)
        xs = sample_ghd(params, 1_000_000, seed=77)
        hist = build_histogram(xs, 0.05, 6.0)
        fit = fit_ghd(hist)
        assert fit.converged
        assert fit.lam == pytest.approx(0.5862, abs=0.15)
        assert fit.xi == pytest.approx(params.xi, rel=0.10)

    def test_near_gaussian_data_recovers_the_gaussian(self):
        rng = np.random.default_rng(99)
        hist = build_histogram(rng.standard_normal(1_000_000), 0.05, 6.0)
        fit = fit_ghd(hist)
        p = constrain_unit_variance(fit.lam, fit.xi)
        grid = np.linspace(-3.0, 3.0, 601)
        assert np.max(np.abs(ghd_pdf(grid, p) - ptd_pdf(grid))) <= 0.01

    def test_constraint_is_structural(self):
        params = constrain_unit_variance(0.5862, 0.5031)
        xs = sample_ghd(params, 200_000, seed=3)
        fit = fit_ghd(build_histogram(xs, 0.05, 6.0))
        from rmtlab.distributions import ghd_moment

        refit = constrain_unit_variance(fit.lam, fit.xi)
        assert refit.alpha == fit.alpha and refit.delta == fit.delta
        assert abs(ghd_moment(1.0, refit) - 1.0) <= 1e-10

    def test_bin_order_irrelevant(self):
        params = constrain_unit_variance(0.5, 0.5)
        xs = sample_ghd(params, 100_000, seed=11)
        hist = build_histogram(xs, 0.05, 6.0)
        direct = fit_ghd(hist)
        rng = np.random.default_rng(0)
        perm = rng.permutation(hist.bin_centers.size)
        shuffled = fit_ghd_arrays(hist.bin_centers[perm], hist.density[perm])
        assert shuffled.lam == direct.lam and shuffled.xi == direct.xi

    def test_result_beats_every_start(self):
        params = constrain_unit_variance(0.5, 0.5)
        xs = sample_ghd(params, 100_000, seed=13)
        hist = build_histogram(xs, 0.05, 6.0)
        fit = fit_ghd(hist)
        mask = hist.density >= 0.01
        centers, dens = hist.bin_centers[mask], hist.density[mask]
        for lam0, xi0 in ((0.0, 0.5), (2.0, 1.0), (-0.3, 0.1)):
            p0 = constrain_unit_variance(lam0, xi0)
            start_obj = float(np.sum((ghd_pdf(centers, p0) - dens) ** 2))
            assert fit.objective <= start_obj + 1e-12

    def test_stability_under_doubled_statistics(self):
        params = constrain_unit_variance(0.5862, 0.5031)
        fit1 = fit_ghd(build_histogram(sample_ghd(params, 500_000, seed=21), 0.05, 6.0))
        fit2 = fit_ghd(build_histogram(sample_ghd(params, 1_000_000, seed=22), 0.05, 6.0))
        assert abs(fit1.lam - fit2.lam) <= 0.15

    def test_too_few_usable_bins(self):
        centers = np.linspace(-0.2, 0.2, 9)
        density = np.full(9, 2.5)
        with pytest.raises(ValueError, match="at least 10 bins"):
            fit_ghd_arrays(centers, density)

    def test_unnormalized_rejected(self):
        hist = build_histogram(np.random.default_rng(1).standard_normal(1000), 0.05, 6.0)
        bad = hist.density * 2.0
        with pytest.raises(ValueError, match="normalized"):
            fit_ghd(
                type(hist)(
                    bin_edges=hist.bin_edges,
                    counts=hist.counts,
                    density=bad,
                    sample_count=hist.sample_count,
                )
            )


class TestChi2Fit:
    def test_near_gaussian_limit_gives_one_dof(self):
        res = fit_chi2_to_ghd(150.0, 0.2)
        assert res.params.nu == pytest.approx(1.0, abs=0.05)

    def test_round_trip_against_chi2_target(self):
        from rmtlab.distributions import Chi2Params, chi2_pdf
        from rmtlab.fitting import _golden_minimize

        grid = np.linspace(0.04, 4.0, 200)
        dx = (4.0 - 0.04) / 199
        target = chi2_pdf(grid, Chi2Params(0.6))

        def objective(log_nu):
            f = chi2_pdf(grid, Chi2Params(math.exp(log_nu)))
            return float(np.sum((f - target) ** 2) * dx)

        log_nu, _ = _golden_minimize(objective, math.log(0.01), math.log(200.0), tol=1e-12)
        assert math.exp(log_nu) == pytest.approx(0.6, abs=1e-3)

    def test_sweep_enters_reported_band(self):
        nus = [fit_chi2_to_ghd(lam, 0.2).params.nu for lam in np.linspace(-1.5, 1.5, 13)]
        assert any(0.28 <= nu <= 0.88 for nu in nus)
        assert any(0.4 <= nu <= 0.7 for nu in nus)


class TestSupDistanceToPdf:
    def test_bin_averaging_removes_curvature_bias(self):
        rng = np.random.default_rng(8)
        hist = build_histogram(rng.standard_normal(2_000_000), 0.25, 4.0)
        averaged = sup_distance_to_pdf(hist, ptd_pdf, bin_averaged=True)
        midpoint = sup_distance_to_pdf(hist, ptd_pdf, bin_averaged=False)
        assert averaged < midpoint
