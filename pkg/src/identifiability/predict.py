"""Rejection sampling of the likelihood confidence set and prediction bands."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, StarvationError
from .likelihood import NormalizedLikelihood
from .models import ParameterVector, ProcessModelSpec
from .noise import LOGNORMAL, NoiseSpec, noise_quantile_band
from .profile import ProfileResult

DEFAULT_BATCH = 20_000


@dataclass(frozen=True)
class ConfidenceSetSample:
    """Accepted parameter rows (``values[m]`` ordered like ``mle.names``)."""

    values: np.ndarray
    mle: ParameterVector
    threshold: float
    attempts: int
    confidence_level: float | None = None

    def __len__(self):
        return len(self.values)

    @property
    def samples(self) -> list[ParameterVector]:
        return [self.mle.with_values(row) for row in self.values]

    @property
    def acceptance_rate(self) -> float:
        return len(self) / self.attempts if self.attempts else 0.0

    @classmethod
    def from_mle(cls, mle: ParameterVector, threshold: float = 0.0, confidence_level=None):
        """The single-member set ``{mle}``, used for debugging bands."""
        return cls(mle.as_array()[None, :], mle, threshold, 1, confidence_level)


@dataclass(frozen=True)
class PredictionBand:
    coordinates: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    mle_curve: np.ndarray
    confidence_level: float | None = None

    def rows(self):
        return zip(self.coordinates, self.lower, self.mle_curve, self.upper)


def sample_confidence_set(nl: NormalizedLikelihood, threshold: float, M: int, rng: np.random.Generator,
                          max_attempts: int | None = None, *, lower=None, upper=None,
                          workers: int = 1, batch_size: int = DEFAULT_BATCH,
                          confidence_level: float | None = None) -> ConfidenceSetSample:
    """Draw uniformly over a box and keep draws with ``nl(theta) >= threshold``.

    The proposal box defaults to the model bounds; ``lower``/``upper`` narrow
    it.  Each worker owns a sub-stream spawned from ``rng``.  Draws proceed in
    rounds of ``batch_size`` per worker and are merged in (round, worker,
    draw) order, so the result depends only on the seed and ``workers``.
    ``attempts`` counts draws up to and including the M-th acceptance.
    """
    if M < 1:
        raise DomainError("M must be at least 1")
    if threshold > 0:
        raise DomainError("threshold must not be positive")
    max_attempts = 10 ** 6 * M if max_attempts is None else int(max_attempts)
    box_lo, box_hi = nl.problem.model.box().bounds()
    lo = box_lo if lower is None else np.maximum(np.asarray(lower, dtype=float), box_lo)
    hi = box_hi if upper is None else np.minimum(np.asarray(upper, dtype=float), box_hi)
    if np.any(lo > hi):
        raise DomainError("empty proposal box")
    streams = rng.spawn(workers)
    p = lo.size

    def draw(stream, size):
        theta = lo + (hi - lo) * stream.random((size, p))
        return theta, nl.batch(theta) >= threshold

    accepted = []
    n_acc = 0
    attempts = 0
    with ThreadPoolExecutor(max_workers=workers) if workers > 1 else _Inline() as pool:
        while n_acc < M and attempts < max_attempts:
            size = min(batch_size, max(1, math.ceil((max_attempts - attempts) / workers)))
            for theta, ok in pool.map(draw, streams, [size] * workers):
                take = min(theta.shape[0], max_attempts - attempts)
                hits = np.flatnonzero(ok[:take])
                need = M - n_acc
                if hits.size >= need:
                    accepted.append(theta[hits[:need]])
                    attempts += int(hits[need - 1]) + 1
                    n_acc = M
                    break
                accepted.append(theta[hits])
                attempts += take
                n_acc += hits.size
                if attempts >= max_attempts:
                    break
    if n_acc < M:
        rate = n_acc / attempts if attempts else 0.0
        raise StarvationError(
            f"accepted {n_acc} of {M} required samples in {attempts} attempts "
            f"(acceptance rate {rate:.3g}); narrow the proposal box or raise max_attempts",
            n_acc, attempts)
    return ConfidenceSetSample(np.concatenate(accepted), nl.mle, threshold, attempts, confidence_level)


class _Inline:
    """Stand-in for an executor that maps in the calling thread."""

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False

    def map(self, fn, *iterables):
        return map(fn, *iterables)


def prediction_band(spec: ProcessModelSpec, samples: ConfidenceSetSample, noise: NoiseSpec, coordinates,
                    lower_p: float = 0.05, upper_p: float = 0.95) -> PredictionBand:
    """Envelope of per-sample noise quantile bands.

    For each parameter sample the model curve is widened to its
    ``(lower_p, upper_p)`` noise quantiles; the band takes the pointwise
    minimum of the lower curves and maximum of the upper curves.  The MLE is
    always part of the envelope, so the band contains the MLE's own noise band.
    """
    coords = np.asarray(coordinates, dtype=float)
    if coords.ndim != 1 or coords.size == 0:
        raise DomainError("coordinates must be a non-empty 1-d sequence")
    if np.any(np.diff(coords) <= 0):
        raise DomainError("coordinates must be sorted")
    if len(samples) == 0:
        raise DomainError("no parameter samples")
    rows = np.vstack([samples.mle.as_array()[None, :], samples.values])
    with np.errstate(all="ignore"):
        curves = spec.kernel(rows, coords)
    if not np.all(np.isfinite(curves)):
        raise DomainError("model is not finite for some sample")
    if noise.kind == LOGNORMAL and np.any(curves <= 0):
        raise DomainError("log-normal band needs positive model output")
    lo, hi = noise_quantile_band(noise, curves, lower_p, upper_p)
    return PredictionBand(coords, lo.min(axis=0), hi.max(axis=0), curves[0], samples.confidence_level)


def proposal_box_from_profiles(names, profiles: dict[str, ProfileResult], threshold: float,
                               lower, upper) -> tuple[np.ndarray, np.ndarray]:
    """Bounding box of ``{nl >= threshold}`` read off univariate profiles.

    The projection of the confidence set onto one axis is exactly the set
    where that parameter's profile is above ``threshold``, so each side is
    taken at the first grid point beyond the crossing.  Sides without a
    crossing, and parameters without a profile, keep the given bounds.
    """
    lo = np.array(lower, dtype=float)
    hi = np.array(upper, dtype=float)
    for i, name in enumerate(names):
        res = profiles.get(name)
        if res is None:
            continue
        ok = np.isfinite(res.values)
        xs, fs = res.grid.as_array()[ok], res.values[ok]
        if fs.size == 0 or fs.max() < threshold:
            continue
        peak = int(np.argmax(fs))
        below = np.nonzero(fs[:peak] < threshold)[0]
        if below.size:
            lo[i] = max(lo[i], xs[below[-1]])
        below = np.nonzero(fs[peak + 1:] < threshold)[0]
        if below.size:
            hi[i] = min(hi[i], xs[peak + 1 + below[0]])
    return lo, hi
