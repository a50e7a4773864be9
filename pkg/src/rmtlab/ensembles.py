"""Variance profiles and sampling for the two hierarchical Gaussian ensembles.

PLBM: real symmetric matrices with off-diagonal standard deviation decaying
as a power of the distance from the diagonal, smoothed into a circulant
profile so there are no boundary effects.  UMM: the binary-tree analog on
dimensions N = 2^n, with the decay driven by the ultrametric leaf distance.
Diagonal variance is 2 in both, which recovers the rotation-invariant
ensemble at s = 0, eps = 1.
"""

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_SQRT2 = math.sqrt(2.0)
_HALF_NORMAL_MEAN = math.sqrt(2.0 / math.pi)  # E|G| for a unit Gaussian


class MatrixKind(enum.Enum):
    PLBM = "plbm"
    UMM = "umm"


class PlbmProfile(enum.Enum):
    #: the smooth circulant profile (default)
    CIRCULAR = "circular"
    #: the plain (1 + (r mod N)^2)^(-s/2) alternative
    MOD = "mod"


class Regime(enum.Enum):
    LOCALIZED = "localized"
    INTERMEDIATE = "intermediate"
    GOE_LIKE = "goe-like"


@dataclass(frozen=True)
class EnsembleSpec:
    kind: MatrixKind
    n_dim: int
    s: float
    epsilon: float
    master_seed: int
    plbm_profile: PlbmProfile = PlbmProfile.CIRCULAR

    def __post_init__(self):
        if self.n_dim < 2:
            raise ValueError(f"n_dim must be >= 2, got {self.n_dim}")
        if self.kind is MatrixKind.UMM and (self.n_dim & (self.n_dim - 1)) != 0:
            raise ValueError(f"for UMM, N must be a power of two (got N={self.n_dim})")
        if self.s < 0.0:
            raise ValueError(f"s must be nonnegative, got {self.s}")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 <= int(self.master_seed) < 2 ** 64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    @property
    def n_levels(self) -> int:
        return self.n_dim.bit_length() - 1


@dataclass(frozen=True)
class SymmetricMatrix:
    """Dense real symmetric matrix; entries are immutable once built."""

    entries: np.ndarray

    def __post_init__(self):
        self.entries.setflags(write=False)

    @property
    def n_dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class RegimeReport:
    s1: float
    s2: float
    regime: Regime


@dataclass(frozen=True)
class TraceMomentEstimate:
    order: int
    mean: float
    std_error: float
    realizations: int


def variance_profile_plbm(r: int, spec: EnsembleSpec) -> float:
    """Smooth circulant off-diagonal standard deviation profile a(r)."""
    if spec.kind is not MatrixKind.PLBM:
        raise ValueError("variance_profile_plbm requires a PLBM spec")
    if not 0 <= r < spec.n_dim:
        raise ValueError(f"offset r={r} outside [0, {spec.n_dim})")
    n = spec.n_dim
    t = (n / math.pi) * math.sin(math.pi * r / n)
    return spec.epsilon * (1.0 + t * t) ** (-spec.s / 2.0)


def variance_profile_plbm_alt(r: int, spec: EnsembleSpec) -> float:
    """Alternative profile eps*(1 + (r mod N)^2)^(-s/2)."""
    if spec.kind is not MatrixKind.PLBM:
        raise ValueError("variance_profile_plbm_alt requires a PLBM spec")
    rm = r % spec.n_dim
    return spec.epsilon * (1.0 + rm * rm) ** (-spec.s / 2.0)


def ultrametric_distance(i: int, j: int, n_levels: int) -> int:
    """Half the edge count of the shortest leaf path on the depth-n binary tree.

    Equals n minus the common binary prefix length of (i-1, j-1), i.e. the
    bit length of their XOR.
    """
    n_leaves = 1 << n_levels
    if not (1 <= i <= n_leaves and 1 <= j <= n_leaves):
        raise ValueError(f"leaf indices must lie in [1, {n_leaves}]")
    return int((i - 1) ^ (j - 1)).bit_length()


def variance_profile_umm(i: int, j: int, spec: EnsembleSpec) -> float:
    """Off-diagonal standard deviation eps * 2^(-s*dist(i,j)) for the tree ensemble."""
    if spec.kind is not MatrixKind.UMM:
        raise ValueError("variance_profile_umm requires a UMM spec")
    if i == j:
        raise ValueError("diagonal entries are handled separately (i must differ from j)")
    d = ultrametric_distance(i, j, spec.n_levels)
    return spec.epsilon * 2.0 ** (-spec.s * d)


def _plbm_profile_vector(spec: EnsembleSpec) -> np.ndarray:
    r = np.arange(spec.n_dim, dtype=np.float64)
    if spec.plbm_profile is PlbmProfile.CIRCULAR:
        t = (spec.n_dim / np.pi) * np.sin(np.pi * r / spec.n_dim)
        return spec.epsilon * (1.0 + t * t) ** (-spec.s / 2.0)
    return spec.epsilon * (1.0 + r * r) ** (-spec.s / 2.0)


@lru_cache(maxsize=4)
def _sigma_matrix(spec: EnsembleSpec) -> np.ndarray:
    """Standard deviations for every entry (diagonal sqrt(2)); cached per spec."""
    n = spec.n_dim
    if spec.kind is MatrixKind.PLBM:
        prof = _plbm_profile_vector(spec)
        idx = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
        sigma = prof[idx]
    else:
        codes = np.arange(n, dtype=np.int64)
        xor = np.bitwise_xor.outer(codes, codes)
        # bit_length via frexp: exact for xor < 2^53
        dist = np.frexp(xor.astype(np.float64))[1]
        sigma = spec.epsilon * np.exp2(-spec.s * dist)
    np.fill_diagonal(sigma, _SQRT2)
    sigma.setflags(write=False)
    return sigma


def realization_rng(spec: EnsembleSpec, realization_index: int) -> np.random.Generator:
    """Counter-based stream hashed from (master_seed, realization_index)."""
    if realization_index < 0:
        raise ValueError("realization_index must be nonnegative")
    seq = np.random.SeedSequence(entropy=(int(spec.master_seed), int(realization_index)))
    return np.random.Generator(np.random.Philox(seq))


def sample_matrix(spec: EnsembleSpec, realization_index: int) -> SymmetricMatrix:
    """One realization; bit-identical for identical (spec, realization_index).

    Draw order is fixed: N diagonal entries first, then the upper triangle
    in row-major order, each scaled by its profile standard deviation and
    mirrored below the diagonal.
    """
    n = spec.n_dim
    rng = realization_rng(spec, realization_index)
    diag = rng.standard_normal(n) * _SQRT2
    offd = rng.standard_normal(n * (n - 1) // 2)
    sigma = _sigma_matrix(spec)
    iu = np.triu_indices(n, 1)
    h = np.zeros((n, n))
    h[iu] = offd * sigma[iu]
    h = h + h.T
    h[np.diag_indices(n)] = diag
    return SymmetricMatrix(h)


def _offdiag_sums(spec: EnsembleSpec):
    """(sum of sigma, sum of sigma^2) over all ordered off-diagonal pairs."""
    n = spec.n_dim
    if spec.kind is MatrixKind.PLBM:
        prof = _plbm_profile_vector(spec)
        r = np.arange(1, n)
        mult = 2.0 * (n - r)  # ordered pairs at linear distance r
        return float(np.sum(mult * prof[r])), float(np.sum(mult * prof[r] ** 2))
    d = np.arange(1, spec.n_levels + 1, dtype=np.float64)
    count = n * 2.0 ** (d - 1)  # ordered pairs at tree distance d
    a = spec.epsilon * 2.0 ** (-spec.s * d)
    return float(np.sum(count * a)), float(np.sum(count * a ** 2))


def localization_diagnostics(spec: EnsembleSpec) -> RegimeReport:
    """Row-summed absolute first and second entry moments, plus the regime label.

    Computed analytically from the profile (half-normal mean sigma*sqrt(2/pi));
    no sampling involved.  Boundary values s = 1/2 and s = 1 are assigned to
    the outer regimes.
    """
    sum_sigma, sum_sigma2 = _offdiag_sums(spec)
    n = spec.n_dim
    s1 = _HALF_NORMAL_MEAN * (_SQRT2 * n + sum_sigma) / n
    s2 = (2.0 * n + sum_sigma2) / n
    if spec.s >= 1.0:
        regime = Regime.LOCALIZED
    elif spec.s > 0.5:
        regime = Regime.INTERMEDIATE
    else:
        regime = Regime.GOE_LIKE
    return RegimeReport(s1=s1, s2=s2, regime=regime)


def trace_moment(spec: EnsembleSpec, order: int, realizations: int) -> TraceMomentEstimate:
    """Monte Carlo estimate of the normalized trace of H^order."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if realizations < 1:
        raise ValueError("realizations must be >= 1")
    n = spec.n_dim
    vals = np.empty(realizations)
    for k in range(realizations):
        h = sample_matrix(spec, k).entries
        if order == 1:
            vals[k] = np.trace(h) / n
        elif order == 2:
            vals[k] = float(np.sum(h * h)) / n
        else:
            w = np.linalg.eigvalsh(h)
            vals[k] = float(np.sum(w ** order)) / n
    mean = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(realizations)) if realizations > 1 else math.nan
    return TraceMomentEstimate(order=order, mean=mean, std_error=se, realizations=realizations)
