"""Independent reference computations used as test oracles.

Nothing here imports the package under test.
"""

import math

import mpmath
import numpy as np

mpmath.mp.dps = 50


def adaptive_simpson(f, a, b, tol=1e-14, max_depth=60):
    """Adaptive Simpson quadrature of f over [a, b]."""

    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return (recurse(a, m, fa, flm, fm, left, tol / 2, depth - 1)
                + recurse(m, b, fm, frm, fb, right, tol / 2, depth - 1))

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth)


def erf_quadrature(x):
    """erf by direct quadrature of its defining integral."""
    if x == 0:
        return 0.0
    sign = 1.0 if x > 0 else -1.0
    val = adaptive_simpson(lambda z: math.exp(-z * z), 0.0, abs(x))
    return sign * 2.0 / math.sqrt(math.pi) * val


def bisect(f, lo, hi, target, iters=200):
    """Root of the increasing function f(x) = target on [lo, hi]."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def normal_quantile_bisection(p):
    """Inverse normal CDF by bisection, comparing in 50-digit arithmetic."""
    target = mpmath.mpf(p)
    cdf = lambda z: 0.5 * mpmath.erfc(-mpmath.mpf(z) / mpmath.sqrt(2))
    return bisect(cdf, -40.0, 40.0, target)


def cooling_grid_loglik(T_a, k, t, y, sigma, T0=180.0):
    """Gaussian log-likelihood of the cooling model on a mesh of (T_a, k)."""
    T_a = np.asarray(T_a, dtype=float)[..., None]
    k = np.asarray(k, dtype=float)[..., None]
    model = (T0 - T_a) * np.exp(-k * t) + T_a
    sse = np.sum((y - model) ** 2, axis=-1)
    n = len(t)
    return -0.5 * n * math.log(2 * math.pi * sigma ** 2) - sse / (2 * sigma ** 2)
