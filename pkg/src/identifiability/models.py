"""Closed-form process models and the parameter containers they consume.

Each registered model is a vectorized kernel ``f(params, x, context)`` where
``params`` has shape ``(..., p)`` and ``x`` has shape ``(n,)``; the result has
shape ``(..., n)``.  The public ``*_solution`` functions wrap those kernels
with argument checking for single parameter vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import special

from .errors import DomainError, SchemaError


@dataclass(frozen=True)
class ParameterVector:
    """Ordered named parameters with a finite box ``lower <= value <= upper``."""

    names: tuple[str, ...]
    values: tuple[float, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        for attr in ("names", "values", "lower", "upper"):
            seq = getattr(self, attr)
            conv = str if attr == "names" else float
            object.__setattr__(self, attr, tuple(conv(v) for v in seq))
        n = len(self.names)
        if not (len(self.values) == len(self.lower) == len(self.upper) == n):
            raise SchemaError("names, values and bounds must have equal length")
        if len(set(self.names)) != n:
            raise SchemaError(f"duplicate parameter names in {self.names}")
        for name, v, lo, hi in zip(self.names, self.values, self.lower, self.upper):
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise SchemaError(f"bounds for {name} must be finite")
            if lo > hi:
                raise SchemaError(f"lower bound exceeds upper bound for {name}")
            if not lo <= v <= hi:
                raise SchemaError(f"{name}={v} outside its bounds [{lo}, {hi}]")

    @classmethod
    def from_bounds(cls, names, lower, upper, values=None):
        """Build a vector; ``values`` default to the box midpoint."""
        if values is None:
            values = [0.5 * (lo + hi) for lo, hi in zip(lower, upper)]
        return cls(tuple(names), tuple(values), tuple(lower), tuple(upper))

    def __len__(self):
        return len(self.names)

    def __getitem__(self, name: str) -> float:
        try:
            return self.values[self.names.index(name)]
        except ValueError:
            raise KeyError(name) from None

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(name) from None

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.lower, dtype=float), np.array(self.upper, dtype=float)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values))

    def with_values(self, values) -> "ParameterVector":
        return ParameterVector(self.names, tuple(values), self.lower, self.upper)

    def midpoint(self) -> "ParameterVector":
        return self.with_values(0.5 * (a + b) for a, b in zip(self.lower, self.upper))


# ---------------------------------------------------------------------------
# kernels

def _col(params, i):
    return params[..., i, None]


def _cooling(params, x, ctx):
    T_a, k = _col(params, 0), _col(params, 1)
    return (ctx["T0"] - T_a) * np.exp(-k * x) + T_a


def _erf_pair_sum(a, b):
    # erf(a) + erf(b) with a + b > 0; the erfc form avoids cancellation when
    # one argument is large and negative.
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    with np.errstate(invalid="ignore"):
        direct = special.erf(lo) + special.erf(hi)
        tail = special.erfc(-lo) - special.erfc(hi)
    return np.where(lo >= 0, direct, tail)


def _advection_diffusion(params, x, ctx):
    u0, h, D, v = (_col(params, i) for i in range(4))
    t = ctx["t"]
    y = x - v * t
    width = 2.0 * np.sqrt(D * t)
    return ctx["u_b"] + 0.5 * u0 * _erf_pair_sum((h - y) / width, (h + y) / width)


def _morphogen(params, x, ctx):
    J, D, k = _col(params, 0), _col(params, 1), _col(params, 2)
    return J / np.sqrt(D * k) * np.exp(-x * np.sqrt(k / D))


def _morphogen_reparam(params, x, ctx):
    alpha, beta = _col(params, 0), _col(params, 1)
    return alpha * np.exp(-beta * x)


@dataclass(frozen=True)
class ModelInfo:
    """Registry entry describing one closed-form model."""

    model_id: str
    parameter_names: tuple[str, ...]
    default_bounds: tuple[tuple[float, float], ...]
    context_keys: tuple[str, ...]
    coordinate_kind: str
    kernel: Callable[[np.ndarray, np.ndarray, Mapping[str, float]], np.ndarray]
    default_context: Mapping[str, float] = field(default_factory=dict)


REGISTRY: Mapping[str, ModelInfo] = MappingProxyType({
    info.model_id: info
    for info in (
        ModelInfo("cooling", ("T_a", "k"), ((0.0, 50.0), (0.001, 0.5)),
                  ("T0",), "time", _cooling, {"T0": 180.0}),
        ModelInfo("advection_diffusion", ("u0", "h", "D", "v"),
                  ((0.1, 3.0), (20.0, 80.0), (1.0, 30.0), (0.1, 3.0)),
                  ("u_b", "t"), "space", _advection_diffusion, {"u_b": 1.0, "t": 50.0}),
        ModelInfo("morphogen_bvp", ("J", "D", "k"), ((0.01, 10.0), (0.01, 10.0), (0.001, 1.0)),
                  (), "space", _morphogen),
        ModelInfo("morphogen_bvp_reparam", ("alpha", "beta"), ((0.1, 20.0), (0.01, 2.0)),
                  (), "space", _morphogen_reparam),
    )
})


def model_info(model_id: str) -> ModelInfo:
    try:
        return REGISTRY[model_id]
    except KeyError:
        raise SchemaError(f"unknown model {model_id!r}; known: {sorted(REGISTRY)}") from None


@dataclass(frozen=True)
class ProcessModelSpec:
    """A registered model plus its parameter box and fixed context constants."""

    model_id: str
    parameter_names: tuple[str, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    context: Mapping[str, float]

    def __post_init__(self):
        info = model_info(self.model_id)
        if tuple(self.parameter_names) != info.parameter_names:
            raise SchemaError(
                f"{self.model_id} expects parameters {info.parameter_names}, got {tuple(self.parameter_names)}")
        missing = [k for k in info.context_keys if k not in self.context]
        if missing:
            raise SchemaError(f"{self.model_id} context is missing {missing}")
        object.__setattr__(self, "context", MappingProxyType({k: float(v) for k, v in self.context.items()}))
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        _check_context(self.model_id, self.context)
        # validates box shape and finiteness
        self.box()

    @classmethod
    def create(cls, model_id: str, context: Mapping[str, float] | None = None,
               bounds: Mapping[str, Sequence[float]] | None = None) -> "ProcessModelSpec":
        """Spec with registry defaults, optionally overriding context and bounds by name."""
        info = model_info(model_id)
        ctx = dict(info.default_context)
        ctx.update(context or {})
        bounds = dict(bounds or {})
        unknown = set(bounds) - set(info.parameter_names)
        if unknown:
            raise SchemaError(f"bounds given for unknown parameters {sorted(unknown)}")
        box = [tuple(bounds.get(n, db)) for n, db in zip(info.parameter_names, info.default_bounds)]
        return cls(model_id, info.parameter_names, tuple(b[0] for b in box), tuple(b[1] for b in box), ctx)

    @property
    def info(self) -> ModelInfo:
        return REGISTRY[self.model_id]

    @property
    def dimension(self) -> int:
        return len(self.parameter_names)

    def box(self, values=None) -> ParameterVector:
        """Parameter vector carrying this spec's bounds (midpoint unless ``values`` given)."""
        return ParameterVector.from_bounds(self.parameter_names, self.lower, self.upper, values)

    def parameters(self, values: Mapping[str, float] | Sequence[float]) -> ParameterVector:
        if isinstance(values, Mapping):
            missing = [n for n in self.parameter_names if n not in values]
            extra = set(values) - set(self.parameter_names)
            if missing or extra:
                raise SchemaError(f"parameter mismatch: missing {missing}, unexpected {sorted(extra)}")
            values = [values[n] for n in self.parameter_names]
        return self.box(values)

    def kernel(self, params, x) -> np.ndarray:
        """Raw vectorized evaluation without domain checks."""
        return self.info.kernel(np.asarray(params, dtype=float), np.asarray(x, dtype=float), self.context)

    def positive_output(self) -> bool:
        """Whether every parameter vector inside the box gives strictly positive output."""
        lo = dict(zip(self.parameter_names, self.lower))
        if self.model_id == "cooling":
            return self.context["T0"] > 0 and lo["T_a"] >= 0
        if self.model_id == "advection_diffusion":
            return self.context["u_b"] >= 0 and lo["u0"] >= 0
        if self.model_id == "morphogen_bvp":
            return lo["J"] >= 0 and lo["D"] >= 0 and lo["k"] >= 0
        return lo["alpha"] >= 0


def _check_context(model_id, ctx):
    if model_id == "advection_diffusion" and ctx["t"] <= 0:
        raise DomainError("advection-diffusion snapshot time must be positive")


# ---------------------------------------------------------------------------
# public solutions

def _values(theta, expected: tuple[str, ...]) -> np.ndarray:
    if isinstance(theta, ParameterVector):
        if theta.names != expected:
            raise SchemaError(f"expected parameters {expected}, got {theta.names}")
        return theta.as_array()
    arr = np.asarray(theta, dtype=float)
    if arr.shape != (len(expected),):
        raise SchemaError(f"expected {len(expected)} parameter values {expected}")
    return arr


def _finish(values, coordinate):
    if np.ndim(coordinate) == 0:
        return float(values[0])
    return values


def cooling_solution(theta, t, context: Mapping[str, float]):
    """Newton cooling ``(T0 - T_a) exp(-k t) + T_a`` for theta = (T_a, k)."""
    p = _values(theta, ("T_a", "k"))
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise DomainError("time must be non-negative")
    if p[1] <= 0:
        raise DomainError("cooling rate k must be positive")
    return _finish(_cooling(p, t_arr, context), t)


def advection_diffusion_solution(theta, x, context: Mapping[str, float]):
    """Snapshot at time ``context['t']`` of a top-hat pulse of half-width h
    that is advected with speed v and diffused with coefficient D above a
    background ``context['u_b']``."""
    p = _values(theta, ("u0", "h", "D", "v"))
    u0, h, D, _ = p
    if D <= 0 or context["t"] <= 0:
        raise DomainError("need D > 0 and t > 0")
    if h <= 0 or u0 <= 0:
        raise DomainError("need h > 0 and u0 > 0")
    return _finish(_advection_diffusion(p, np.atleast_1d(np.asarray(x, dtype=float)), context), x)


def morphogen_bvp_solution(theta, x):
    """Steady morphogen gradient ``J/sqrt(D k) * exp(-x sqrt(k/D))``."""
    p = _values(theta, ("J", "D", "k"))
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(p <= 0):
        raise DomainError("J, D and k must be positive")
    if np.any(x_arr < 0):
        raise DomainError("x must be non-negative")
    return _finish(_morphogen(p, x_arr, {}), x)


def morphogen_reparam_solution(theta_r, x):
    """Exponential profile ``alpha * exp(-beta x)``."""
    p = _values(theta_r, ("alpha", "beta"))
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(p <= 0):
        raise DomainError("alpha and beta must be positive")
    if np.any(x_arr < 0):
        raise DomainError("x must be non-negative")
    return _finish(_morphogen_reparam(p, x_arr, {}), x)


def reparam_map(theta, bounds: tuple[Sequence[float], Sequence[float]] | None = None) -> ParameterVector:
    """Map (J, D, k) to the identifiable combinations (alpha, beta).

    ``alpha = J / sqrt(k D)`` and ``beta = sqrt(k / D)``.  The returned vector
    carries the default reparameterized box unless ``bounds`` is given; it is
    widened when needed so the mapped point always lies inside.
    """
    J, D, k = _values(theta, ("J", "D", "k"))
    if min(J, D, k) <= 0:
        raise DomainError("J, D and k must be positive")
    alpha = J / math.sqrt(k * D)
    beta = math.sqrt(k / D)
    if bounds is None:
        bounds = tuple(zip(*REGISTRY["morphogen_bvp_reparam"].default_bounds))
    lower = (min(bounds[0][0], alpha), min(bounds[0][1], beta))
    upper = (max(bounds[1][0], alpha), max(bounds[1][1], beta))
    return ParameterVector(("alpha", "beta"), (alpha, beta), lower, upper)


def evaluate_model(spec: ProcessModelSpec, theta, coordinate):
    """Evaluate the registered model of ``spec`` at a coordinate or array of coordinates."""
    if spec.model_id == "cooling":
        return cooling_solution(theta, coordinate, spec.context)
    if spec.model_id == "advection_diffusion":
        return advection_diffusion_solution(theta, coordinate, spec.context)
    if spec.model_id == "morphogen_bvp":
        return morphogen_bvp_solution(theta, coordinate)
    if spec.model_id == "morphogen_bvp_reparam":
        return morphogen_reparam_solution(theta, coordinate)
    raise SchemaError(f"unknown model {spec.model_id!r}")
