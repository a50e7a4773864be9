"""Histogram construction and derivative-free least-squares density fits.

The component fits follow a fixed protocol: unweighted squared residuals
on the plain density scale, bins below a density floor of 0.01 dropped,
free coordinates (lambda, ln xi) with the unit-variance constraint baked
in, and a simplex search restarted from three canned points.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import Chi2Params, chi2_pdf, constrain_unit_variance, ghd_pdf, ghd_psi_squared_pdf

_GHD_FIT_STARTS = ((0.0, 0.5), (2.0, 1.0), (-0.3, 0.1))
_GHD_FIT_SCALE = (1.0, 1.0)
_LAMBDA_LIMIT = 400.0
_LOG_XI_RANGE = (-16.0, 7.0)


class FitError(RuntimeError):
    """Raised when an objective evaluates to NaN during the search."""


@dataclass(frozen=True)
class Histogram:
    """Equal-width bins with the normalized density estimate."""

    bin_edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    sample_count: int

    def __post_init__(self):
        self.bin_edges.setflags(write=False)
        self.counts.setflags(write=False)
        self.density.setflags(write=False)

    @property
    def bin_width(self) -> float:
        return float(self.bin_edges[1] - self.bin_edges[0])

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def excluded_fraction(self) -> float:
        return 1.0 - int(self.counts.sum()) / self.sample_count


@dataclass(frozen=True)
class FitResult:
    lam: float
    xi: float
    alpha: float
    delta: float
    objective: float
    iterations: int
    converged: bool
    bins_used: int
    density_floor: float

    @property
    def residual_rms(self) -> float:
        return math.sqrt(self.objective / self.bins_used)

    def to_json_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "xi": self.xi,
            "alpha": self.alpha,
            "delta": self.delta,
            "objective": self.objective,
            "iterations": self.iterations,
            "converged": self.converged,
            "protocol": {
                "coordinates": "(lambda, ln xi) under the unit-variance constraint",
                "objective": "sum of squared density residuals, plain scale, unweighted",
                "density_floor": self.density_floor,
                "bins_used": self.bins_used,
                "multi_start": [list(s) for s in _GHD_FIT_STARTS],
                "minimizer": "nelder-mead(1, 2, 0.5, 0.5)",
            },
        }


@dataclass(frozen=True)
class MinimizeResult:
    x: tuple
    value: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class Chi2FitResult:
    params: Chi2Params
    residual: float
    window: tuple = (0.04, 4.0)
    grid_points: int = 200


def build_histogram(samples, bin_width: float, half_range: float) -> Histogram:
    """Equal-width bins on [-L, L]; out-of-range samples only raise sample_count.

    The density normalizes over in-range counts, so sum(density)*width is 1
    regardless of exclusions.
    """
    samples = np.asarray(samples, dtype=np.float64).reshape(-1)
    if samples.size == 0:
        raise ValueError("cannot build a histogram from an empty sample vector")
    if not (bin_width > 0.0 and half_range > 0.0):
        raise ValueError("bin_width and half_range must be positive")
    n_bins = int(round(2.0 * half_range / bin_width))
    if n_bins < 1 or abs(n_bins * bin_width - 2.0 * half_range) > 1e-9 * half_range:
        raise ValueError(
            f"bin_width {bin_width} does not divide the range [-{half_range}, {half_range}]"
        )
    edges = np.linspace(-half_range, half_range, n_bins + 1)
    counts, _ = np.histogram(samples, bins=edges)
    in_range = int(counts.sum())
    if in_range == 0:
        raise ValueError("all samples fall outside the histogram range")
    width = 2.0 * half_range / n_bins
    density = counts / (in_range * width)
    return Histogram(
        bin_edges=edges,
        counts=counts,
        density=density,
        sample_count=int(samples.size),
    )


def histogram_sup_distance(a: Histogram, b: Histogram) -> float:
    """Max absolute density difference on a shared binning."""
    if a.bin_edges.shape != b.bin_edges.shape or not np.allclose(a.bin_edges, b.bin_edges):
        raise ValueError("histograms must share the same bin edges")
    return float(np.max(np.abs(a.density - b.density)))


def sup_distance_to_pdf(hist: Histogram, pdf, bin_averaged: bool = True) -> float:
    """Max |histogram density - pdf| over bins.

    With bin_averaged the pdf is averaged over each bin (Simpson, 5 points),
    which is the quantity a histogram actually estimates.
    """
    edges = hist.bin_edges
    if bin_averaged:
        offsets = np.linspace(0.0, 1.0, 5)
        weights = np.array([1.0, 4.0, 2.0, 4.0, 1.0]) / 12.0
        vals = np.zeros_like(hist.density)
        width = hist.bin_width
        for o, w in zip(offsets, weights):
            vals += w * np.asarray(pdf(edges[:-1] + o * width))
    else:
        vals = np.asarray(pdf(hist.bin_centers))
    return float(np.max(np.abs(hist.density - vals)))


def minimize(objective, start, scale, max_iterations: int = 2000, diameter_tol: float = 1e-6):
    """Nelder-Mead with coefficients (1, 2, 0.5, 0.5) on a pair of reals.

    Stops when every vertex sits within diameter_tol*scale of the best one
    (componentwise) or at the iteration cap.  A NaN objective anywhere is a
    hard error naming the offending point.
    """
    start = np.asarray(start, dtype=np.float64)
    scale = np.asarray(scale, dtype=np.float64)
    ndim = start.size

    def f(x):
        v = float(objective(*x))
        if math.isnan(v):
            raise FitError(f"objective returned NaN at {tuple(x)}")
        return v

    simplex = [start.copy()]
    for i in range(ndim):
        p = start.copy()
        p[i] += scale[i]
        simplex.append(p)
    values = [f(p) for p in simplex]
    if not math.isfinite(values[0]):
        raise FitError(f"objective not finite at the start point {tuple(start)}")

    iterations = 0
    converged = False
    while iterations < max_iterations:
        order = np.argsort(values, kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        spread = np.max(np.abs(np.asarray(simplex[1:]) - simplex[0]), axis=0)
        if np.all(spread < diameter_tol * scale):
            converged = True
            break
        iterations += 1
        centroid = np.mean(simplex[:-1], axis=0)
        reflected = centroid + (centroid - simplex[-1])
        fr = f(reflected)
        if fr < values[0]:
            expanded = centroid + 2.0 * (centroid - simplex[-1])
            fe = f(expanded)
            if fe < fr:
                simplex[-1], values[-1] = expanded, fe
            else:
                simplex[-1], values[-1] = reflected, fr
        elif fr < values[-2]:
            simplex[-1], values[-1] = reflected, fr
        else:
            contracted = centroid + 0.5 * (simplex[-1] - centroid)
            fc = f(contracted)
            if fc < values[-1]:
                simplex[-1], values[-1] = contracted, fc
            else:
                best = simplex[0]
                simplex = [best] + [best + 0.5 * (p - best) for p in simplex[1:]]
                values = [values[0]] + [f(p) for p in simplex[1:]]

    order = np.argsort(values, kind="stable")
    best = simplex[order[0]]
    return MinimizeResult(
        x=tuple(float(v) for v in best),
        value=float(values[order[0]]),
        iterations=iterations,
        converged=converged,
    )


def _golden_minimize(f, lo: float, hi: float, tol: float = 1e-8, max_iterations: int = 200):
    """Scalar golden-section minimizer on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iterations):
        if abs(b - a) < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _ghd_objective(centers, density):
    def objective(lam, log_xi):
        if abs(lam) > _LAMBDA_LIMIT or not (_LOG_XI_RANGE[0] < log_xi < _LOG_XI_RANGE[1]):
            return math.inf
        try:
            params = constrain_unit_variance(lam, math.exp(log_xi))
            fitted = ghd_pdf(centers, params)
        except (ValueError, OverflowError):
            return math.inf
        if not np.all(np.isfinite(fitted)):
            return math.inf
        return float(np.sum((fitted - density) ** 2))

    return objective


def fit_ghd_arrays(centers, density, density_floor: float = 0.01) -> FitResult:
    """Fit the constrained two-parameter family to (bin center, density) data."""
    centers = np.asarray(centers, dtype=np.float64)
    density = np.asarray(density, dtype=np.float64)
    mask = density >= density_floor
    if int(mask.sum()) < 10:
        raise ValueError(
            f"need at least 10 bins with density >= {density_floor}, got {int(mask.sum())}"
        )
    objective = _ghd_objective(np.ascontiguousarray(centers[mask]), density[mask])
    best = None
    for start in _GHD_FIT_STARTS:
        result = minimize(objective, start=(start[0], math.log(start[1])), scale=_GHD_FIT_SCALE)
        if best is None or result.value < best.value:
            best = result
    lam, log_xi = best.x
    xi = math.exp(log_xi)
    params = constrain_unit_variance(lam, xi)
    return FitResult(
        lam=lam,
        xi=params.xi,
        alpha=params.alpha,
        delta=params.delta,
        objective=best.value,
        iterations=best.iterations,
        converged=best.converged,
        bins_used=int(mask.sum()),
        density_floor=density_floor,
    )


def fit_ghd(histogram: Histogram, density_floor: float = 0.01) -> FitResult:
    """Protocol fit of the normalized component histogram."""
    total = float(np.sum(histogram.density) * histogram.bin_width)
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"histogram is not normalized (sum*width = {total})")
    return fit_ghd_arrays(histogram.bin_centers, histogram.density, density_floor)


def fit_chi2_to_ghd(lam: float, xi: float, window=(0.04, 4.0), grid_points: int = 200) -> Chi2FitResult:
    """Best unit-mean chi-square approximation to the squared-component density.

    The squared-error integral over the window is discretized on a uniform
    grid and minimized over ln(nu) by golden section.
    """
    params = constrain_unit_variance(lam, xi)
    grid = np.linspace(window[0], window[1], grid_points)
    dx = (window[1] - window[0]) / (grid_points - 1)
    target = ghd_psi_squared_pdf(grid, params)

    def objective(log_nu):
        f = chi2_pdf(grid, Chi2Params(math.exp(log_nu)))
        return float(np.sum((f - target) ** 2) * dx)

    log_nu, value = _golden_minimize(objective, math.log(0.01), math.log(200.0), tol=1e-10)
    return Chi2FitResult(
        params=Chi2Params(math.exp(log_nu)),
        residual=value,
        window=tuple(window),
        grid_points=grid_points,
    )
