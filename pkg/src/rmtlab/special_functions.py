"""Overflow-safe modified Bessel K of real order and log-Gamma.

All density formulas downstream go through :func:`log_bessel_k`; the
public pair here adds domain checks and the log-scaled representation for
callers that need values far outside double range.
"""

import math
from dataclasses import dataclass

from ._bessel import log_bessel_k as _log_bessel_k_kernel

SUPPORTED_ORDER = 500.0


@dataclass(frozen=True)
class LogScaledValue:
    """sign * exp(log_magnitude); sign is always +1 for Bessel-K on x > 0."""

    log_magnitude: float
    sign: int

    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)


def _check_bessel_args(order: float, x: float) -> None:
    if not x > 0.0:
        raise ValueError(f"bessel_k requires x > 0, got x={x}")
    if not math.isfinite(x) or not math.isfinite(order):
        raise ValueError("bessel_k requires finite order and argument")
    if abs(order) > SUPPORTED_ORDER:
        raise ValueError(
            f"order {order} outside supported range |nu| <= {SUPPORTED_ORDER:g}"
        )


def log_bessel_k(order: float, x: float) -> float:
    """log K_nu(x) as a plain float; never overflows on the supported range."""
    _check_bessel_args(order, x)
    return _log_bessel_k_kernel(float(order), float(x))


def bessel_k_log(order: float, x: float) -> LogScaledValue:
    """Log-scaled K_nu(x); safe for |nu| up to 500 and x down to 1e-8 and below."""
    return LogScaledValue(log_bessel_k(order, x), 1)


def bessel_k(order: float, x: float) -> float:
    """K_nu(x); saturates to inf outside double range, use bessel_k_log there."""
    lk = log_bessel_k(order, x)
    if lk > 709.0:
        return math.inf
    return math.exp(lk)


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)
