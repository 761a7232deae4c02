"""Log-likelihood functions built from a process model, a noise model and data."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .errors import SchemaError
from .models import ParameterVector, ProcessModelSpec
from .noise import GAUSSIAN, LOGNORMAL, observation_logdensity, total_logdensity


@dataclass(frozen=True)
class LikelihoodProblem:
    """A process model paired with a dataset; the model box bounds the parameters."""

    model: ProcessModelSpec
    dataset: Dataset
    _x: np.ndarray = field(init=False, repr=False, compare=False)
    _y: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.dataset) < self.model.dimension + 1:
            raise SchemaError(
                f"{self.model.model_id} has {self.model.dimension} parameters; "
                f"the dataset needs at least {self.model.dimension + 1} records")
        if self.dataset.noise.kind == LOGNORMAL and not self.model.positive_output():
            raise SchemaError("log-normal noise needs a model whose output is positive throughout the box")
        object.__setattr__(self, "_x", self.dataset.x)
        object.__setattr__(self, "_y", self.dataset.y)

    @property
    def noise(self):
        return self.dataset.noise

    @property
    def names(self) -> tuple[str, ...]:
        return self.model.parameter_names

    @property
    def dimension(self) -> int:
        return self.model.dimension

    def box(self, values=None) -> ParameterVector:
        return self.model.box(values)

    def values_of(self, theta) -> np.ndarray:
        if isinstance(theta, ParameterVector):
            if theta.names != self.names:
                raise SchemaError(f"expected parameters {self.names}, got {theta.names}")
            return theta.as_array()
        arr = np.asarray(theta, dtype=float)
        if arr.shape[-1:] != (self.dimension,):
            raise SchemaError(f"expected {self.dimension} parameter values")
        return arr

    def loglik_batch(self, values) -> np.ndarray:
        """Log-likelihood for an array of parameter rows, shape ``(..., p)``.

        Rows whose model output is out of the noise model's domain give ``-inf``.
        """
        values = np.asarray(values, dtype=float)
        with np.errstate(all="ignore"):
            means = self.model.kernel(values, self._x)
        return total_logdensity(self.noise, self._y, means)

    def __call__(self, values) -> float:
        return float(self.loglik_batch(values))


def loglikelihood(problem: LikelihoodProblem, theta) -> float:
    """Sum of per-observation log densities at ``theta``; ``-inf`` when infeasible."""
    values = problem.values_of(theta)
    with np.errstate(all="ignore"):
        means = problem.model.kernel(values, problem._x)
    if problem.noise.kind == LOGNORMAL and not np.all(means > 0):
        return -math.inf
    if not np.all(np.isfinite(means)):
        return -math.inf
    return float(np.sum(observation_logdensity(problem.noise, problem._y, means)))


def loglikelihood_gaussian_closedform(problem: LikelihoodProblem, theta) -> float:
    """Gaussian log-likelihood as a constant minus the scaled sum of squared errors."""
    if problem.noise.kind != GAUSSIAN:
        raise SchemaError("closed form applies to additive Gaussian noise only")
    values = problem.values_of(theta)
    resid = problem._y - problem.model.kernel(values, problem._x)
    n = resid.size
    var = problem.noise.variance
    return -0.5 * n * math.log(2 * math.pi * var) - float(resid @ resid) / (2 * var)


@dataclass(frozen=True)
class NormalizedLikelihood:
    """Log-likelihood shifted so that it is zero at the MLE."""

    problem: LikelihoodProblem
    mle: ParameterVector
    mle_loglik: float

    def __call__(self, theta) -> float:
        return float(self.batch(self.problem.values_of(theta)))

    def batch(self, values) -> np.ndarray:
        return self.problem.loglik_batch(values) - self.mle_loglik


def normalize(problem: LikelihoodProblem, mle: ParameterVector) -> NormalizedLikelihood:
    """Capture the log-likelihood at ``mle`` as the reference level."""
    value = problem(problem.values_of(mle))
    if not math.isfinite(value):
        raise SchemaError("log-likelihood at the supplied MLE is not finite")
    return NormalizedLikelihood(problem, mle, value)
