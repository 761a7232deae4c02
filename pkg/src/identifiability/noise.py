"""Observation noise models: log densities, quantile bands and sampling."""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import DomainError, SchemaError

GAUSSIAN = "additive_gaussian"
LOGNORMAL = "multiplicative_lognormal"
NOISE_KINDS = (GAUSSIAN, LOGNORMAL)

_U53 = float(2 ** 53)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise family with a fixed, known standard-deviation parameter ``sigma``.

    For the log-normal family ``sigma`` is the standard deviation of the
    log of the multiplicative factor.
    """

    kind: str
    sigma: float

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise SchemaError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        object.__setattr__(self, "sigma", float(self.sigma))
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise DomainError("sigma must be positive and finite")

    @property
    def variance(self) -> float:
        return self.sigma * self.sigma


def observation_logdensity(noise: NoiseSpec, observed, mean):
    """Log density of ``observed`` given the process-model ``mean``."""
    if noise.kind == GAUSSIAN:
        return specfun.normal_logpdf(observed, mean, noise.variance)
    observed = np.asarray(observed, dtype=float)
    mean = np.asarray(mean, dtype=float)
    if np.any(observed <= 0) or np.any(mean <= 0):
        raise DomainError("log-normal noise needs positive observation and mean")
    return specfun.lognormal_logpdf(observed, np.log(mean), noise.variance)


def total_logdensity(noise: NoiseSpec, observed: np.ndarray, means: np.ndarray) -> np.ndarray:
    """Sum of observation log densities along the last axis of ``means``.

    Unlike :func:`observation_logdensity` this never raises: any non-positive
    or non-finite log-normal mean gives ``-inf`` for its row.
    """
    var = noise.variance
    with np.errstate(all="ignore"):
        if noise.kind == GAUSSIAN:
            resid = observed - means
            ll = -0.5 * observed.size * math.log(2 * math.pi * var) - np.sum(resid * resid, axis=-1) / (2 * var)
        else:
            logy = np.log(observed)
            resid = logy - np.log(means)
            ll = (-np.sum(logy) - 0.5 * observed.size * math.log(2 * math.pi * var)
                  - np.sum(resid * resid, axis=-1) / (2 * var))
    ll = np.asarray(ll, dtype=float)
    return np.where(np.isfinite(ll), ll, -np.inf)


def noise_quantile_band(noise: NoiseSpec, mean, lower_p: float, upper_p: float):
    """Return the ``(lower_p, upper_p)`` quantiles of the observation distribution."""
    if not 0.0 < lower_p < upper_p < 1.0:
        raise DomainError("need 0 < lower_p < upper_p < 1")
    z_lo = specfun.normal_quantile(lower_p)
    z_hi = specfun.normal_quantile(upper_p)
    mean = np.asarray(mean, dtype=float)
    if noise.kind == GAUSSIAN:
        lo, hi = mean + noise.sigma * z_lo, mean + noise.sigma * z_hi
    else:
        if np.any(mean <= 0):
            raise DomainError("log-normal band needs a positive mean")
        lo, hi = mean * math.exp(noise.sigma * z_lo), mean * math.exp(noise.sigma * z_hi)
    if lo.ndim == 0:
        return float(lo), float(hi)
    return lo, hi


def rng_stream(seed: int, *keys: int | str) -> np.random.Generator:
    """Independent, reproducible generator identified by ``seed`` and a key path.

    String keys are hashed with CRC-32 so streams can be named, e.g.
    ``rng_stream(1, "data")``.
    """
    words = [int(seed)]
    for key in keys:
        words.append(zlib.crc32(key.encode()) if isinstance(key, str) else int(key))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(words)))


def standard_normals(rng: np.random.Generator, size=None):
    """Standard normal draws by inverse-CDF transform of 53-bit uniforms in (0, 1)."""
    u = (rng.integers(0, 2 ** 53, size=size, dtype=np.int64) + 0.5) / _U53
    return specfun.normal_quantile(u)


def sample_observation(noise: NoiseSpec, mean, rng: np.random.Generator):
    """Draw noisy observation(s) around ``mean`` using ``rng``."""
    mean = np.asarray(mean, dtype=float)
    if noise.kind == LOGNORMAL and np.any(mean <= 0):
        raise DomainError("log-normal noise needs a positive mean")
    z = standard_normals(rng, size=mean.shape if mean.ndim else None)
    if noise.kind == GAUSSIAN:
        out = mean + noise.sigma * z
    else:
        out = mean * np.exp(noise.sigma * z)
    return float(out) if np.ndim(out) == 0 else out
