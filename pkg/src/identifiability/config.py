"""JSON run configuration: schema, loading and conversion to library objects."""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import numpy as np

from .errors import ConfigError, SchemaError, DomainError
from .models import REGISTRY, ProcessModelSpec
from .noise import NOISE_KINDS, NoiseSpec
from .optim import OptimizerSettings

_NUMBER_MAP = {"type": "object", "additionalProperties": {"type": "number"}}

COORDINATES = {
    "oneOf": [
        {"type": "array", "items": {"type": "number"}, "minItems": 1},
        {"type": "object", "required": ["start", "stop", "step"], "additionalProperties": False,
         "properties": {"start": {"type": "number"}, "stop": {"type": "number"},
                        "step": {"type": "number", "exclusiveMinimum": 0}}},
        {"type": "object", "required": ["start", "stop", "num"], "additionalProperties": False,
         "properties": {"start": {"type": "number"}, "stop": {"type": "number"},
                        "num": {"type": "integer", "minimum": 2}}},
    ]
}

MODEL = {
    "type": "object",
    "required": ["id"],
    "additionalProperties": False,
    "properties": {
        "id": {"enum": sorted(REGISTRY)},
        "context": _NUMBER_MAP,
        "bounds": {"type": "object", "additionalProperties": {
            "type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}},
        "start": _NUMBER_MAP,
    },
}

SCHEMA = {
    "type": "object",
    "required": ["model", "noise", "data"],
    "additionalProperties": False,
    "properties": {
        "model": MODEL,
        "noise": {
            "type": "object", "required": ["kind", "sigma"], "additionalProperties": False,
            "properties": {"kind": {"enum": list(NOISE_KINDS)},
                           "sigma": {"type": "number", "exclusiveMinimum": 0}},
        },
        "data": {
            "type": "object", "additionalProperties": False,
            "minProperties": 1, "maxProperties": 1,
            "properties": {
                "path": {"type": "string"},
                "synthetic": {
                    "type": "object", "required": ["true_theta"], "additionalProperties": False,
                    "properties": {
                        "true_theta": _NUMBER_MAP,
                        "coordinates": COORDINATES,
                        "model": {"type": "object", "required": ["id"], "additionalProperties": False,
                                  "properties": {"id": {"enum": sorted(REGISTRY)}, "context": _NUMBER_MAP}},
                    },
                },
            },
        },
        "seed": {"type": "integer", "minimum": 0},
        "confidence_level": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "optimizer": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "x_tolerance": {"type": "number", "exclusiveMinimum": 0},
                "f_tolerance": {"type": "number", "exclusiveMinimum": 0},
                "max_evaluations": {"type": "integer", "minimum": 1},
                "initial_simplex_scale": {"type": "number", "exclusiveMinimum": 0},
                "restarts": {"type": "integer", "minimum": 0},
            },
        },
        "profile": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "parameters": {"type": "array", "items": {"type": "string"}},
                "grids": {"type": "object", "additionalProperties": COORDINATES},
                "warm_start": {"type": "boolean"},
                "flat_tolerance": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "prediction": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "M": {"type": "integer", "minimum": 1},
                "coordinates": COORDINATES,
                "quantiles": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0,
                                                         "exclusiveMaximum": 1},
                              "minItems": 2, "maxItems": 2},
                "dof": {"type": "integer", "minimum": 1, "maximum": 4},
                "max_attempts": {"type": "integer", "minimum": 1},
                "batch_size": {"type": "integer", "minimum": 1},
                "proposal": {"enum": ["bounds", "profile"]},
                "debug_mle_only": {"type": "boolean"},
            },
        },
        "output": {"type": "string"},
    },
}

# dense prediction grids per model
DEFAULT_PREDICTION_COORDINATES = {
    "cooling": {"start": 0, "stop": 100, "step": 1},
    "advection_diffusion": {"start": -200, "stop": 200, "step": 1},
    "morphogen_bvp": {"start": 0, "stop": 20, "step": 0.2},
    "morphogen_bvp_reparam": {"start": 0, "stop": 20, "step": 0.2},
}


def _where(error) -> str:
    path = "/".join(str(p) for p in error.absolute_path)
    return path or "<root>"


def validate(cfg: dict) -> dict:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        raise ConfigError(f"config error at {_where(first)}: {first.message}")
    return cfg


def load_config(path) -> tuple[dict, Path]:
    """Read and validate a config file; returns the document and its directory."""
    path = Path(path)
    try:
        cfg = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return validate(cfg), path.resolve().parent


def coordinates(spec) -> np.ndarray:
    """Expand a coordinate spec (list, start/stop/step or start/stop/num)."""
    if isinstance(spec, list):
        return np.asarray(spec, dtype=float)
    start, stop = float(spec["start"]), float(spec["stop"])
    if stop < start:
        raise ConfigError("coordinate range has stop < start")
    if "num" in spec:
        return np.round(np.linspace(start, stop, int(spec["num"])), 12)
    n = int(np.floor((stop - start) / spec["step"] + 1e-9)) + 1
    return np.round(start + spec["step"] * np.arange(n), 12)


def model_spec(block: dict) -> ProcessModelSpec:
    try:
        return ProcessModelSpec.create(block["id"], block.get("context"), block.get("bounds"))
    except (SchemaError, DomainError) as exc:
        raise ConfigError(f"config error at model: {exc}") from None


def noise_spec(cfg: dict) -> NoiseSpec:
    return NoiseSpec(cfg["noise"]["kind"], cfg["noise"]["sigma"])


def optimizer_settings(cfg: dict) -> OptimizerSettings:
    return OptimizerSettings(**cfg.get("optimizer", {}))
