"""Special functions and elementary probability densities.

Every function accepts scalars or numpy arrays and broadcasts like a ufunc.
Scalar inputs give Python floats back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError

_LOG_2PI = math.log(2.0 * math.pi)


def _out(value):
    if np.ndim(value) == 0:
        return float(value)
    return value


@dataclass(frozen=True)
class Quantile:
    """A probability together with the quantile value it maps to."""

    probability: float
    value: float

    def __post_init__(self):
        if not 0.0 < self.probability < 1.0:
            raise DomainError(f"probability must lie in (0, 1), got {self.probability}")
        if not math.isfinite(self.value):
            raise DomainError("quantile value must be finite")


def erf(x):
    """Error function, ``(2/sqrt(pi)) * integral_0^x exp(-z**2) dz``."""
    return _out(special.erf(np.asarray(x, dtype=float)))


def erfc(x):
    """Complementary error function ``1 - erf(x)`` without cancellation."""
    return _out(special.erfc(np.asarray(x, dtype=float)))


def normal_cdf(x):
    """Standard normal CDF written through ``erfc`` so both tails stay accurate."""
    x = np.asarray(x, dtype=float)
    return _out(0.5 * special.erfc(-x / math.sqrt(2.0)))


def normal_logpdf(x, mean, variance):
    """Log density of N(mean, variance) at x."""
    variance = np.asarray(variance, dtype=float)
    if np.any(variance <= 0):
        raise DomainError("variance must be positive")
    resid = np.asarray(x, dtype=float) - np.asarray(mean, dtype=float)
    return _out(-0.5 * (_LOG_2PI + np.log(variance)) - resid * resid / (2.0 * variance))


def lognormal_logpdf(x, logmean, variance):
    """Log density of a log-normal(logmean, variance) variable at x.

    Includes the ``-log(x)`` Jacobian, so the value is a genuine log density.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("log-normal density needs x > 0")
    variance = np.asarray(variance, dtype=float)
    if np.any(variance <= 0):
        raise DomainError("variance must be positive")
    logx = np.log(x)
    resid = logx - np.asarray(logmean, dtype=float)
    return _out(-logx - 0.5 * (_LOG_2PI + np.log(variance)) - resid * resid / (2.0 * variance))


def normal_quantile(p):
    """Inverse of the standard normal CDF."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)) or np.any(np.isnan(p)):
        raise DomainError("normal_quantile needs 0 < p < 1")
    return _out(special.ndtri(p))


def _chi2_cdf_3(x):
    return math.erf(math.sqrt(x / 2.0)) - math.sqrt(2.0 * x / math.pi) * math.exp(-x / 2.0)


def _chi2_cdf_4(x):
    return 1.0 - math.exp(-x / 2.0) * (1.0 + x / 2.0)


def _invert_increasing(cdf, q):
    lo, hi = 0.0, 1.0
    while cdf(hi) < q:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cdf(mid) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return 0.5 * (lo + hi)


def chi2_quantile(q: float, dof: int) -> float:
    """q-quantile of the chi-squared distribution for 1 to 4 degrees of freedom.

    Degrees 1 and 2 have closed forms; 3 and 4 invert their elementary CDFs
    by bisection.
    """
    if not 0.0 < q < 1.0:
        raise DomainError(f"quantile level must lie in (0, 1), got {q}")
    if dof == 1:
        z = normal_quantile(0.5 * (1.0 + q))
        return z * z
    if dof == 2:
        return -2.0 * math.log1p(-q)
    if dof == 3:
        return _invert_increasing(_chi2_cdf_3, q)
    if dof == 4:
        return _invert_increasing(_chi2_cdf_4, q)
    raise DomainError(f"unsupported degrees of freedom: {dof} (supported: 1-4)")


def chi2_quantile_halved(q: float, dof: int) -> float:
    """Half the chi-squared quantile, i.e. the log-likelihood drop for a q-level region.

    The threshold on the normalized log-likelihood is the negative of this.

    >>> round(chi2_quantile_halved(0.95, 2), 4)
    2.9957
    """
    return 0.5 * chi2_quantile(q, dof)


def likelihood_threshold(level: float, dof: int) -> float:
    """Normalized log-likelihood cutoff ``-chi2_q(dof)/2`` for confidence ``level``."""
    return -chi2_quantile_halved(level, dof)
