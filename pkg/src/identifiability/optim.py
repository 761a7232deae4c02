"""Box-constrained Nelder-Mead maximization and the maximum-likelihood driver."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, SchemaError
from .likelihood import LikelihoodProblem
from .models import ParameterVector

# reflection, expansion, contraction, shrink
ALPHA, GAMMA, RHO, SIGMA = 1.0, 2.0, 0.5, 0.5


@dataclass(frozen=True)
class OptimizerSettings:
    x_tolerance: float = 1e-8
    f_tolerance: float = 1e-10
    max_evaluations: int | None = None
    initial_simplex_scale: float = 0.1
    restarts: int = 2

    def __post_init__(self):
        if not (self.x_tolerance > 0 and self.f_tolerance > 0):
            raise DomainError("tolerances must be positive")
        if self.restarts < 0:
            raise DomainError("restarts must be non-negative")
        if not self.initial_simplex_scale > 0:
            raise DomainError("initial_simplex_scale must be positive")

    def budget(self, dimension: int) -> int:
        budget = self.max_evaluations if self.max_evaluations is not None else 10_000 * max(dimension, 1)
        if budget < dimension + 1:
            raise DomainError(f"max_evaluations must be at least {dimension + 1}")
        return budget


@dataclass(frozen=True)
class OptimResult:
    argmax: ParameterVector
    value: float
    evaluations: int
    converged: bool


class _Counted:
    """Objective wrapper: negates for minimization, maps NaN to +inf, counts calls."""

    def __init__(self, objective):
        self.objective = objective
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        v = float(self.objective(x))
        return -v if not math.isnan(v) else math.inf


def _initial_simplex(x0, lo, hi, scale):
    n = x0.size
    width = hi - lo
    pts = [x0.copy()]
    for i in range(n):
        p = x0.copy()
        step = scale * width[i]
        p[i] = x0[i] + step if x0[i] + step <= hi[i] else x0[i] - step
        pts.append(p)
    return np.minimum(np.maximum(np.array(pts), lo), hi)


def _simplex_search(g, x0, f0, lo, hi, settings, budget):
    """One Nelder-Mead descent on ``g`` from ``x0``; returns (x, f, converged)."""
    n = x0.size
    sim = _initial_simplex(x0, lo, hi, settings.initial_simplex_scale)
    fs = np.empty(n + 1)
    fs[0] = f0
    for i in range(1, n + 1):
        fs[i] = g(sim[i])
    clip = lambda p: np.minimum(np.maximum(p, lo), hi)

    while True:
        order = np.argsort(fs, kind="stable")
        sim, fs = sim[order], fs[order]
        diam = np.max(np.abs(sim[1:] - sim[0]))
        if diam < settings.x_tolerance or fs[-1] - fs[0] < settings.f_tolerance:
            return sim[0], fs[0], True
        if g.calls >= budget:
            return sim[0], fs[0], False

        centroid = sim[:-1].mean(axis=0)
        worst = sim[-1]
        xr = clip(centroid + ALPHA * (centroid - worst))
        fr = g(xr)
        if fr < fs[0]:
            xe = clip(centroid + GAMMA * (xr - centroid))
            fe = g(xe)
            if fe < fr:
                sim[-1], fs[-1] = xe, fe
            else:
                sim[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-2]:
            sim[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-1]:
            xc = clip(centroid + RHO * (xr - centroid))
            fc = g(xc)
            if fc <= fr:
                sim[-1], fs[-1] = xc, fc
                continue
        else:
            xc = clip(centroid + RHO * (worst - centroid))
            fc = g(xc)
            if fc < fs[-1]:
                sim[-1], fs[-1] = xc, fc
                continue
        for i in range(1, n + 1):
            sim[i] = sim[0] + SIGMA * (sim[i] - sim[0])
            fs[i] = g(sim[i])


def nelder_mead_maximize(objective: Callable[[np.ndarray], float], start: ParameterVector,
                         settings: OptimizerSettings | None = None) -> OptimResult:
    """Maximize ``objective`` over the box carried by ``start``.

    ``objective`` receives a float array ordered like ``start.names``.  Trial
    vertices are projected onto the box, so every evaluation is feasible.
    After convergence the simplex is rebuilt around the incumbent up to
    ``settings.restarts`` times; restarts stop early once they no longer
    improve the value by more than ``f_tolerance``.
    """
    settings = settings or OptimizerSettings()
    lo, hi = start.bounds()
    x0 = start.as_array()
    n = x0.size
    budget = settings.budget(n)
    g = _Counted(objective)
    f0 = g(x0)
    if not math.isfinite(f0):
        raise DomainError(f"objective is not finite at the start point {start.as_dict()}")
    if n == 0:
        return OptimResult(start, float(-f0), g.calls, True)

    x, f, converged = _simplex_search(g, x0, f0, lo, hi, settings, budget)
    for _ in range(settings.restarts):
        if not converged or g.calls >= budget:
            break
        x_new, f_new, converged = _simplex_search(g, x, f, lo, hi, settings, budget)
        improved = f - f_new
        if f_new <= f:
            x, f = x_new, f_new
        if improved <= settings.f_tolerance:
            break
    return OptimResult(start.with_values(x), float(-f), g.calls, converged)


def find_mle(problem: LikelihoodProblem, start: ParameterVector | None = None,
             settings: OptimizerSettings | None = None) -> OptimResult:
    """Maximum-likelihood estimate; starts from the box midpoint by default."""
    if start is None:
        start = problem.box()
    elif start.names != problem.names:
        raise SchemaError(f"start must be ordered as {problem.names}")
    return nelder_mead_maximize(problem, start, settings)
