"""Closed-form densities and moments for the fitted eigenvector laws.

Everything is evaluated in log space and exponentiated last, so the
parameter extremes used by the limit tests (orders up to a few hundred,
arguments down to 1e-8) stay finite.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._accel import maybe_njit
from ._bessel import log_bessel_k
from .special_functions import SUPPORTED_ORDER

_LOG_2PI = math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)
_LOG_2 = math.log(2.0)


@dataclass(frozen=True)
class GhdParams:
    """Symmetric generalized hyperbolic parameters; xi caches alpha*delta."""

    lam: float
    alpha: float
    delta: float
    xi: float = field(init=False)

    def __post_init__(self):
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (self.delta > 0.0 and math.isfinite(self.delta)):
            raise ValueError(f"delta must be positive, got {self.delta}")
        if abs(self.lam) + 1.0 > SUPPORTED_ORDER:
            raise ValueError(f"lambda {self.lam} outside supported range")
        object.__setattr__(self, "xi", self.alpha * self.delta)


@dataclass(frozen=True)
class Chi2Params:
    """Degrees of freedom of the unit-mean chi-square law."""

    nu: float

    def __post_init__(self):
        if not (self.nu > 0.0 and math.isfinite(self.nu)):
            raise ValueError(f"nu must be positive, got {self.nu}")


@maybe_njit()
def _ghd_logpdf_fill(xs, lam, alpha, delta, log_k_lam_xi, out):
    const = 0.5 * math.log(alpha) - 0.5 * _LOG_2PI - lam * math.log(delta) - log_k_lam_xi
    half_order = lam - 0.5
    for i in range(xs.shape[0]):
        t2 = xs[i] * xs[i] + delta * delta
        arg = alpha * math.sqrt(t2)
        out[i] = const + 0.5 * half_order * math.log(t2) + log_bessel_k(half_order, arg)


@maybe_njit()
def _gig_logpdf_fill(ys, lam, alpha, delta, log_k_lam_xi, out):
    const = lam * (math.log(alpha) - math.log(delta)) - _LOG_2 - log_k_lam_xi
    a2 = alpha * alpha
    d2 = delta * delta
    for i in range(ys.shape[0]):
        y = ys[i]
        out[i] = const + (lam - 1.0) * math.log(y) - 0.5 * (a2 * y + d2 / y)


@maybe_njit()
def _chi2_logpdf_fill(xs, nu, out):
    const = 0.5 * nu * math.log(nu) - 0.5 * nu * _LOG_2 - math.lgamma(0.5 * nu)
    for i in range(xs.shape[0]):
        out[i] = const + (0.5 * nu - 1.0) * math.log(xs[i]) - 0.5 * nu * xs[i]


def _as_array(x):
    arr = np.asarray(x, dtype=np.float64)
    return arr, arr.ndim == 0


def _eval_fill(kernel, x, *params):
    arr, scalar = _as_array(x)
    flat = np.ascontiguousarray(arr.reshape(-1))
    out = np.empty_like(flat)
    kernel(flat, *params, out)
    res = np.exp(out.reshape(arr.shape))
    return float(res) if scalar else res


def ghd_logpdf(x, params: GhdParams):
    """Log of the symmetric GHD density."""
    arr, scalar = _as_array(x)
    flat = np.ascontiguousarray(arr.reshape(-1))
    out = np.empty_like(flat)
    lk = log_bessel_k(params.lam, params.xi)
    _ghd_logpdf_fill(flat, params.lam, params.alpha, params.delta, lk, out)
    res = out.reshape(arr.shape)
    return float(res) if scalar else res


def ghd_pdf(x, params: GhdParams):
    """Symmetric GHD density; even in x."""
    res = ghd_logpdf(x, params)
    return math.exp(res) if np.isscalar(res) else np.exp(res)


def gig_pdf(y, params: GhdParams):
    """Density of the mixing law on the local variance; y > 0."""
    arr, _ = _as_array(y)
    if np.any(arr <= 0.0):
        raise ValueError("gig_pdf requires y > 0")
    lk = log_bessel_k(params.lam, params.xi)
    return _eval_fill(_gig_logpdf_fill, y, params.lam, params.alpha, params.delta, lk)


def mixture_pdf(x: float, params: GhdParams, quadrature_budget: int = 200) -> float:
    """Normal variance mixture over the GIG law; cross-check oracle for ghd_pdf.

    Integrates in u = ln y with the peak located first so the integrand
    can be rescaled into exponent range.
    """
    from scipy import integrate

    x = float(x)
    lk = log_bessel_k(params.lam, params.xi)
    const = (
        params.lam * (math.log(params.alpha) - math.log(params.delta))
        - _LOG_2
        - lk
        - 0.5 * _LOG_2PI
    )
    a2 = params.alpha ** 2
    d2x2 = params.delta ** 2 + x * x

    def log_integrand(u):
        # gig(e^u) * normal(x | 0, e^u) * e^u, all in the log
        if abs(u) > 690.0:
            return -math.inf
        return const + (params.lam - 0.5) * u - 0.5 * (a2 * math.exp(u) + d2x2 * math.exp(-u))

    us = np.linspace(-60.0, 60.0, 2401)
    logs = np.array([log_integrand(u) for u in us])
    i_pk = int(np.argmax(logs))
    u_pk = us[i_pk]
    shift = logs[i_pk]
    if not math.isfinite(shift):
        raise RuntimeError("mixture_pdf: integrand peak not finite")

    def f(u):
        return math.exp(log_integrand(u) - shift)

    left, err_l = integrate.quad(f, -np.inf, u_pk, limit=quadrature_budget,
                                 epsabs=1e-13, epsrel=1e-11)
    right, err_r = integrate.quad(f, u_pk, np.inf, limit=quadrature_budget,
                                  epsabs=1e-13, epsrel=1e-11)
    total = left + right
    if total <= 0.0 or (err_l + err_r) > max(1e-10, 1e-8 * total):
        raise RuntimeError(
            f"mixture_pdf quadrature did not converge (err={err_l + err_r:g})"
        )
    return math.exp(shift + math.log(total))


def ghd_moment(q: float, params: GhdParams) -> float:
    """Even moment <x^(2q)> of the GHD, as a product of Gamma and K ratios."""
    if q < 0.0:
        raise ValueError(f"moment order must be nonnegative, got {q}")
    log_c = (
        q * _LOG_2
        + math.lgamma(q + 0.5)
        - 0.5 * _LOG_PI
        + q * (math.log(params.delta) - math.log(params.alpha))
        + log_bessel_k(params.lam + q, params.xi)
        - log_bessel_k(params.lam, params.xi)
    )
    return math.exp(log_c)


def constrain_unit_variance(lam: float, xi: float) -> GhdParams:
    """The unique (lam, alpha, delta) with alpha*delta = xi and unit variance."""
    if not (xi > 0.0 and math.isfinite(xi)):
        raise ValueError(f"xi must be positive, got {xi}")
    log_alpha = 0.5 * (
        math.log(xi) + log_bessel_k(lam + 1.0, xi) - log_bessel_k(lam, xi)
    )
    alpha = math.exp(log_alpha)
    return GhdParams(lam=lam, alpha=alpha, delta=xi / alpha)


def ptd_pdf(x):
    """Standard normal density (the classical component law)."""
    arr, scalar = _as_array(x)
    res = np.exp(-0.5 * arr * arr) / math.sqrt(2.0 * math.pi)
    return float(res) if scalar else res


def ptd_pdf_squared(x):
    """Density of the squared component under the classical law; x > 0."""
    arr, scalar = _as_array(x)
    if np.any(arr <= 0.0):
        raise ValueError("ptd_pdf_squared requires x > 0")
    res = np.exp(-0.5 * arr) / np.sqrt(2.0 * math.pi * arr)
    return float(res) if scalar else res


def chi2_pdf(x, params: Chi2Params):
    """Unit-mean chi-square density with nu degrees of freedom; x > 0."""
    arr, _ = _as_array(x)
    if np.any(arr <= 0.0):
        raise ValueError("chi2_pdf requires x > 0")
    return _eval_fill(_chi2_logpdf_fill, x, params.nu)


def ghd_psi_squared_pdf(x, params: GhdParams):
    """GHD transformed to the squared component; x > 0."""
    arr, scalar = _as_array(x)
    if np.any(arr <= 0.0):
        raise ValueError("ghd_psi_squared_pdf requires x > 0")
    logp = ghd_logpdf(np.sqrt(arr), params)
    res = np.exp(logp - 0.5 * np.log(arr))
    return float(res) if scalar else res


def goe_local_variance_pdf(x, m_window: int):
    """Large-window Gaussian limit of the local variance in the rotation-invariant case."""
    if m_window < 1:
        raise ValueError("m_window must be >= 1")
    arr, scalar = _as_array(x)
    res = np.sqrt(m_window / (4.0 * math.pi)) * np.exp(-m_window * (arr - 1.0) ** 2 / 4.0)
    return float(res) if scalar else res
