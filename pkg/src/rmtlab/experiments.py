"""End-to-end Monte Carlo pipelines over matrix realizations.

Each realization is a pure function of (spec, index): sample, decompose,
extract.  Workers therefore parallelize freely and results are merged in
realization order, so output is independent of the worker count.  BLAS is
pinned to one thread around every decomposition (inline or in a worker),
which keeps the per-realization arithmetic bit-identical across pool
sizes.
"""

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from .eigensolve import eigh
from .ensembles import EnsembleSpec, sample_matrix
from .fitting import Histogram, build_histogram, histogram_sup_distance


class WindowMode(enum.Enum):
    MIDDLE_HALF = "middle-half"
    CENTERED_COUNT = "centered-count"


@dataclass(frozen=True)
class SpectralWindow:
    """Index window into the sorted spectrum; index windows are realization-stable."""

    mode: WindowMode
    m_window: int = 0

    def __post_init__(self):
        if self.mode is WindowMode.CENTERED_COUNT and self.m_window < 1:
            raise ValueError("centered-count windows need m_window >= 1")

    def indices(self, n_dim: int) -> np.ndarray:
        if self.mode is WindowMode.MIDDLE_HALF:
            return np.arange(n_dim // 4, 3 * n_dim // 4)
        if self.m_window > n_dim:
            raise ValueError(f"m_window {self.m_window} exceeds dimension {n_dim}")
        start = (n_dim - self.m_window) // 2
        return np.arange(start, start + self.m_window)


MIDDLE_HALF = SpectralWindow(WindowMode.MIDDLE_HALF)


@dataclass(frozen=True)
class ComponentSampleSet:
    """Rescaled components sqrt(N)*Psi_j over a spectral window."""

    values: np.ndarray
    spec: EnsembleSpec
    window: SpectralWindow
    component_indices: tuple
    realisations: int

    def __post_init__(self):
        self.values.setflags(write=False)


@dataclass(frozen=True)
class VarianceSampleSet:
    """Per-realization window averages of N*Psi_i^2 (the local variance)."""

    values: np.ndarray
    spec: EnsembleSpec
    m_window: int
    component_indices: tuple
    realisations: int

    def __post_init__(self):
        self.values.setflags(write=False)


@dataclass(frozen=True)
class FractalMoment:
    order: float
    estimate: float
    std_error: float
    analytic: float


@dataclass(frozen=True)
class ScanResult:
    histograms: dict
    distances: tuple  # ((n_a, n_b, sup_distance), ...) for consecutive dimensions


class RealizationError(RuntimeError):
    """A realization failed; carries the realization index in the message."""


def default_component_indices(n_dim: int) -> tuple:
    """Component triple used when none is given (1-based)."""
    return (1, n_dim // 4, n_dim // 2)


def spread_component_indices(n_dim: int) -> tuple:
    """Nine components spread over the matrix: 1 and the multiples of N/8."""
    return (1,) + tuple(k * n_dim // 8 for k in range(1, 9))


def _validate_components(indices, n_dim):
    indices = tuple(int(i) for i in indices)
    for i in indices:
        if not 1 <= i <= n_dim:
            raise ValueError(f"component index {i} outside [1, {n_dim}]")
    return indices


def _extract(spec, k, window_idx, comp_rows, m_list, var_rows):
    """Pure per-realization unit: sample, decompose, pull values."""
    matrix = sample_matrix(spec, k)
    try:
        dec = eigh(matrix)
    except Exception as exc:
        raise RealizationError(f"realization {k}: {exc}") from exc
    vec = dec.eigenvectors
    sqrt_n = math.sqrt(spec.n_dim)
    comp = None
    if window_idx is not None:
        # window-index major, then listed components
        comp = (sqrt_n * vec[np.ix_(comp_rows, window_idx)]).T.ravel()
    variances = None
    if m_list:
        n = spec.n_dim
        variances = []
        for m in m_list:
            start = (n - m) // 2
            block = vec[np.ix_(var_rows, np.arange(start, start + m))]
            variances.append(n * np.mean(block * block, axis=1))
    return comp, variances


def _run_one(args):
    spec, k, window_idx, comp_rows, m_list, var_rows = args
    with threadpool_limits(limits=1):
        return _extract(spec, k, window_idx, comp_rows, m_list, var_rows)


def _run_realizations(spec, realisations, window_idx, comp_rows, m_list, var_rows, threads):
    if realisations < 1:
        raise ValueError("realisations must be >= 1")
    tasks = [(spec, k, window_idx, comp_rows, m_list, var_rows) for k in range(realisations)]
    if threads <= 1:
        return [_run_one(t) for t in tasks]
    chunk = max(1, realisations // (threads * 4))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_run_one, tasks, chunksize=chunk))


def collect_components(
    spec: EnsembleSpec,
    realisations: int,
    window: SpectralWindow = MIDDLE_HALF,
    component_indices=None,
    threads: int = 1,
) -> ComponentSampleSet:
    """Rescaled eigenvector components over the window, for each realization."""
    if component_indices is None:
        component_indices = default_component_indices(spec.n_dim)
    component_indices = _validate_components(component_indices, spec.n_dim)
    window_idx = window.indices(spec.n_dim)
    comp_rows = np.asarray(component_indices) - 1
    results = _run_realizations(spec, realisations, window_idx, comp_rows, (), None, threads)
    values = np.concatenate([r[0] for r in results])
    return ComponentSampleSet(
        values=values,
        spec=spec,
        window=window,
        component_indices=component_indices,
        realisations=realisations,
    )


def collect_local_variance_multi(
    spec: EnsembleSpec,
    realisations: int,
    m_windows,
    component_indices=None,
    threads: int = 1,
) -> dict:
    """Local-variance sample sets for several window sizes from one pass.

    Extraction does not consume randomness, so the values are bit-identical
    to separate single-window runs with the same spec.
    """
    if component_indices is None:
        component_indices = spread_component_indices(spec.n_dim)
    component_indices = _validate_components(component_indices, spec.n_dim)
    m_list = tuple(int(m) for m in m_windows)
    for m in m_list:
        if not 1 <= m <= spec.n_dim // 2:
            raise ValueError(f"m_window {m} outside [1, N/2={spec.n_dim // 2}]")
    var_rows = np.asarray(component_indices) - 1
    results = _run_realizations(spec, realisations, None, None, m_list, var_rows, threads)
    out = {}
    for pos, m in enumerate(m_list):
        values = np.concatenate([r[1][pos] for r in results])
        out[m] = VarianceSampleSet(
            values=values,
            spec=spec,
            m_window=m,
            component_indices=component_indices,
            realisations=realisations,
        )
    return out


def collect_local_variance(
    spec: EnsembleSpec,
    realisations: int,
    m_window: int,
    component_indices=None,
    threads: int = 1,
) -> VarianceSampleSet:
    """Window-averaged N*Psi_i^2 per realization and component."""
    return collect_local_variance_multi(
        spec, realisations, (m_window,), component_indices, threads
    )[m_window]


def collect_components_and_variance(
    spec: EnsembleSpec,
    realisations: int,
    window: SpectralWindow = MIDDLE_HALF,
    component_indices=None,
    m_windows=(),
    variance_indices=None,
    threads: int = 1,
):
    """Component and variance extraction from a single decomposition pass.

    Values are bit-identical to running collect_components and
    collect_local_variance_multi separately, at half the cost.
    """
    if component_indices is None:
        component_indices = default_component_indices(spec.n_dim)
    if variance_indices is None:
        variance_indices = spread_component_indices(spec.n_dim)
    component_indices = _validate_components(component_indices, spec.n_dim)
    variance_indices = _validate_components(variance_indices, spec.n_dim)
    m_list = tuple(int(m) for m in m_windows)
    for m in m_list:
        if not 1 <= m <= spec.n_dim // 2:
            raise ValueError(f"m_window {m} outside [1, N/2={spec.n_dim // 2}]")
    window_idx = window.indices(spec.n_dim)
    comp_rows = np.asarray(component_indices) - 1
    var_rows = np.asarray(variance_indices) - 1
    results = _run_realizations(
        spec, realisations, window_idx, comp_rows, m_list, var_rows, threads
    )
    components = ComponentSampleSet(
        values=np.concatenate([r[0] for r in results]),
        spec=spec,
        window=window,
        component_indices=component_indices,
        realisations=realisations,
    )
    variances = {}
    for pos, m in enumerate(m_list):
        variances[m] = VarianceSampleSet(
            values=np.concatenate([r[1][pos] for r in results]),
            spec=spec,
            m_window=m,
            component_indices=variance_indices,
            realisations=realisations,
        )
    return components, variances


def n_independence_scan(
    base_spec: EnsembleSpec,
    n_list,
    realisations,
    window: SpectralWindow = MIDDLE_HALF,
    component_selector=None,
    bin_width: float = 0.05,
    half_range: float = 6.0,
    threads: int = 1,
) -> ScanResult:
    """Rescaled-component histograms across dimensions plus consecutive distances."""
    n_list = [int(n) for n in n_list]
    if len(n_list) < 2:
        raise ValueError("the scan needs at least two dimensions")
    if isinstance(realisations, int):
        counts = {n: realisations for n in n_list}
    else:
        counts = dict(zip(n_list, realisations))
    if component_selector is None:
        component_selector = default_component_indices
    histograms = {}
    for n in n_list:
        spec = EnsembleSpec(
            kind=base_spec.kind,
            n_dim=n,
            s=base_spec.s,
            epsilon=base_spec.epsilon,
            master_seed=base_spec.master_seed,
            plbm_profile=base_spec.plbm_profile,
        )
        samples = collect_components(
            spec, counts[n], window, component_selector(n), threads=threads
        )
        histograms[n] = build_histogram(samples.values, bin_width, half_range)
    distances = tuple(
        (n_a, n_b, histogram_sup_distance(histograms[n_a], histograms[n_b]))
        for n_a, n_b in zip(n_list[:-1], n_list[1:])
    )
    return ScanResult(histograms=histograms, distances=distances)


def fractal_prefactor(sample_set: ComponentSampleSet, q: float, fitted_params=None) -> FractalMoment:
    """Moment <x^(2q)> with a per-realization block standard error.

    When fitted GHD parameters are supplied, the closed-form moment at those
    parameters rides along for comparison.
    """
    if q <= 0.0:
        raise ValueError("q must be positive")
    values = sample_set.values ** (2.0 * q)
    blocks = values.reshape(sample_set.realisations, -1).mean(axis=1)
    estimate = float(values.mean())
    if sample_set.realisations > 1:
        se = float(blocks.std(ddof=1) / math.sqrt(sample_set.realisations))
    else:
        se = math.nan
    analytic = math.nan
    if fitted_params is not None:
        from .distributions import ghd_moment

        analytic = ghd_moment(q, fitted_params)
    return FractalMoment(order=q, estimate=estimate, std_error=se, analytic=analytic)


def component_histogram(
    sample_set: ComponentSampleSet, bin_width: float = 0.05, half_range: float = 6.0
) -> Histogram:
    return build_histogram(sample_set.values, bin_width, half_range)


def variance_histogram(
    sample_set: VarianceSampleSet, bin_width: float = 0.1, half_range: float = 4.0
) -> Histogram:
    return build_histogram(sample_set.values, bin_width, half_range)
