"""Univariate profile likelihoods, threshold intervals and identifiability labels."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, SchemaError
from .likelihood import NormalizedLikelihood
from .models import ParameterVector
from .optim import OptimizerSettings, nelder_mead_maximize

log = logging.getLogger(__name__)

IDENTIFIABLE = "identifiable"
ONE_SIDED = "one_sided"
FLAT = "flat"


@dataclass(frozen=True)
class ProfileGrid:
    interest_parameter: str
    grid_points: tuple[float, ...]

    def __post_init__(self):
        pts = tuple(float(p) for p in self.grid_points)
        object.__setattr__(self, "grid_points", pts)
        if len(pts) < 5:
            raise DomainError("a profile grid needs at least 5 points")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise DomainError("profile grid must be strictly increasing")

    @classmethod
    def uniform(cls, name: str, start: float, stop: float, num: int = 40, include=()) -> "ProfileGrid":
        """``num`` evenly spaced points on [start, stop], plus any extra ``include`` points."""
        pts = np.union1d(np.linspace(start, stop, num), np.asarray(include, dtype=float))
        return cls(name, tuple(pts))

    def __len__(self):
        return len(self.grid_points)

    def as_array(self) -> np.ndarray:
        return np.array(self.grid_points)


@dataclass(frozen=True)
class ProfileResult:
    """Profiled normalized log-likelihood over a grid.

    Failed grid points hold NaN in ``profiled_values`` and ``None`` in
    ``nuisance_argmax``.  CI fields are filled by :func:`threshold_interval`;
    a missing endpoint is ``None``.
    """

    grid: ProfileGrid
    profiled_values: tuple[float, ...]
    nuisance_argmax: tuple[ParameterVector | None, ...]
    mle_value: float
    threshold: float | None = None
    ci_lower: float | None = None
    ci_upper: float | None = None
    identifiability: str | None = None

    @property
    def name(self) -> str:
        return self.grid.interest_parameter

    @property
    def values(self) -> np.ndarray:
        return np.array(self.profiled_values)

    @property
    def ci(self) -> tuple[float, float] | None:
        if self.ci_lower is None or self.ci_upper is None:
            return None
        return self.ci_lower, self.ci_upper

    def contains(self, value: float) -> bool:
        """Whether ``value`` lies in the (possibly one-sided) interval."""
        if self.identifiability in (None, FLAT):
            return False
        lo = -math.inf if self.ci_lower is None else self.ci_lower
        hi = math.inf if self.ci_upper is None else self.ci_upper
        return lo <= value <= hi


def _feasible_start(objective, candidates, lo, hi):
    for cand in candidates:
        if cand is None:
            continue
        x = np.minimum(np.maximum(np.asarray(cand, dtype=float), lo), hi)
        if math.isfinite(objective(x)):
            return x
    return None


def _sweep(nl, i, indices, grid, start_nuisance, settings, warm_start):
    """Profile grid points in the given order; returns {index: (value, nuisance)}."""
    names = nl.problem.names
    lo, hi = nl.problem.model.box().bounds()
    nuis = [j for j in range(len(names)) if j != i]
    nuis_names = tuple(names[j] for j in nuis)
    mle_nuis = nl.mle.as_array()[nuis]
    mid_nuis = 0.5 * (lo[nuis] + hi[nuis])
    full = nl.mle.as_array().copy()
    out = {}
    prev = start_nuisance
    for idx in indices:
        psi = grid[idx]
        full[i] = psi

        def objective(v, full=full):
            full[nuis] = v
            return float(nl.batch(full))

        if not nuis:
            out[idx] = (objective(np.empty(0)), ParameterVector((), (), (), ()))
            continue
        cands = [prev, mle_nuis, mid_nuis] if warm_start else [mle_nuis, mid_nuis]
        x0 = _feasible_start(objective, cands, lo[nuis], hi[nuis])
        if x0 is None:
            log.warning("profile %s=%g: no feasible nuisance start; point dropped", names[i], psi)
            out[idx] = (math.nan, None)
            continue
        start = ParameterVector(nuis_names, tuple(x0), tuple(lo[nuis]), tuple(hi[nuis]))
        res = nelder_mead_maximize(objective, start, settings)
        if not (res.converged and math.isfinite(res.value)):
            log.warning("profile %s=%g: optimizer did not converge; point dropped", names[i], psi)
            out[idx] = (math.nan, None)
            continue
        out[idx] = (res.value, res.argmax)
        prev = res.argmax.as_array()
    return out


def profile_parameter(nl: NormalizedLikelihood, grid: ProfileGrid, settings: OptimizerSettings | None = None,
                      *, warm_start: bool = True, threads: int = 1) -> ProfileResult:
    """Maximize the normalized log-likelihood over the nuisance parameters at each grid value.

    With ``warm_start`` the sweep begins at the grid point nearest the MLE and
    moves outward in both directions, seeding each nuisance search with the
    neighbour's solution.  The two directions run on separate threads when
    ``threads > 1``.  Without warm starts each point starts from the MLE's
    nuisance values and points are spread over ``threads`` workers.
    """
    settings = settings or OptimizerSettings()
    names = nl.problem.names
    if grid.interest_parameter not in names:
        raise SchemaError(f"{grid.interest_parameter!r} is not a parameter of {nl.problem.model.model_id}")
    i = names.index(grid.interest_parameter)
    lo, hi = nl.problem.model.box().bounds()
    pts = grid.as_array()
    if pts[0] < lo[i] or pts[-1] > hi[i]:
        raise DomainError(f"grid for {names[i]} leaves its bounds [{lo[i]}, {hi[i]}]")

    nuis = [j for j in range(len(names)) if j != i]
    mle_nuis = nl.mle.as_array()[nuis]
    n = len(pts)
    if warm_start:
        centre = int(np.argmin(np.abs(pts - nl.mle.as_array()[i])))
        jobs = [list(range(centre, n)), list(range(centre - 1, -1, -1))]
    else:
        jobs = [[k] for k in range(n)]
    run = lambda order: _sweep(nl, i, order, pts, mle_nuis, settings, warm_start)
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(order) for order in jobs]
    merged = {}
    for part in parts:
        merged.update(part)
    values = tuple(float(merged[k][0]) for k in range(n))
    nuisance = tuple(merged[k][1] for k in range(n))
    return ProfileResult(grid, values, nuisance, float(nl.mle[names[i]]))


def _crossing(x0, f0, x1, f1, level):
    return x0 + (level - f0) * (x1 - x0) / (f1 - f0)


def threshold_interval(result: ProfileResult, threshold: float, flat_tolerance: float = 0.25) -> ProfileResult:
    """Locate where the profile crosses ``threshold`` and classify the parameter.

    Endpoints are linear interpolations between the two grid points that
    straddle each crossing, searching outward from the profile peak.  A
    profile whose range over the grid is below ``flat_tolerance * |threshold|``
    is ``flat``; otherwise the label counts the crossings found (two:
    ``identifiable``, one: ``one_sided``, none: ``flat``).
    """
    if not threshold < 0:
        raise DomainError("threshold must be negative")
    ok = np.isfinite(result.values)
    xs = result.grid.as_array()[ok]
    fs = result.values[ok]
    blank = replace(result, threshold=threshold, ci_lower=None, ci_upper=None, identifiability=FLAT)
    if fs.size < 2 or fs.max() - fs.min() < flat_tolerance * abs(threshold):
        return blank

    peak = int(np.argmax(fs))
    if fs[peak] < threshold:
        log.warning("profile %s never reaches the threshold; the grid misses the MLE", result.name)
        return blank
    lower = upper = None
    for k in range(peak - 1, -1, -1):
        if fs[k] < threshold:
            lower = _crossing(xs[k], fs[k], xs[k + 1], fs[k + 1], threshold)
            break
    for k in range(peak + 1, fs.size):
        if fs[k] < threshold:
            upper = _crossing(xs[k - 1], fs[k - 1], xs[k], fs[k], threshold)
            break
    found = (lower is not None) + (upper is not None)
    label = {2: IDENTIFIABLE, 1: ONE_SIDED, 0: FLAT}[found]
    lower = None if lower is None else float(lower)
    upper = None if upper is None else float(upper)
    return replace(result, threshold=threshold, ci_lower=lower, ci_upper=upper, identifiability=label)
