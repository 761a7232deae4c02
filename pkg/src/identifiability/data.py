"""Datasets, the self-describing CSV format, and seeded synthetic data.

Every CSV written by this package shares one layout::

    # key=value[,key=value...]
    col_a,col_b,...
    1.0,2.0,...

Header comment lines carry metadata; floats are written with ``repr`` so
they round-trip exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import DatasetError, SchemaError
from .models import ParameterVector, ProcessModelSpec, evaluate_model
from .noise import NoiseSpec, rng_stream, sample_observation

COORDINATE_KINDS = ("time", "space")

# default measurement grids
DEFAULT_COORDINATES = {
    "cooling": np.arange(0, 101, 10, dtype=float),
    "advection_diffusion": np.arange(-200, 201, 5, dtype=float),
    "morphogen_bvp": np.arange(0, 21, 2, dtype=float),
    "morphogen_bvp_reparam": np.arange(0, 21, 2, dtype=float),
}


@dataclass(frozen=True)
class Provenance:
    model_id: str
    context: Mapping[str, float] = field(default_factory=dict)
    true_theta: Mapping[str, float] = field(default_factory=dict)
    seed: int | None = None


@dataclass(frozen=True)
class Dataset:
    """Observations paired with strictly increasing coordinates."""

    coordinate_kind: str
    coordinates: tuple[float, ...]
    observations: tuple[float, ...]
    noise: NoiseSpec
    provenance: Provenance | None = None

    def __post_init__(self):
        object.__setattr__(self, "coordinates", tuple(float(c) for c in self.coordinates))
        object.__setattr__(self, "observations", tuple(float(o) for o in self.observations))
        if self.coordinate_kind not in COORDINATE_KINDS:
            raise DatasetError(f"coordinate kind must be one of {COORDINATE_KINDS}")
        if len(self.coordinates) != len(self.observations):
            raise DatasetError("coordinates and observations differ in length")
        if not self.coordinates:
            raise DatasetError("dataset has no records")
        if not all(math.isfinite(v) for v in self.coordinates + self.observations):
            raise DatasetError("dataset contains non-finite values")
        if any(b <= a for a, b in zip(self.coordinates, self.coordinates[1:])):
            raise DatasetError("coordinates must be strictly increasing")
        if self.noise.kind == "multiplicative_lognormal" and min(self.observations) <= 0:
            raise DatasetError("log-normal datasets need strictly positive observations")

    def __len__(self):
        return len(self.coordinates)

    @property
    def x(self) -> np.ndarray:
        return np.array(self.coordinates)

    @property
    def y(self) -> np.ndarray:
        return np.array(self.observations)


def generate_synthetic(spec: ProcessModelSpec, true_theta: ParameterVector, coordinates: Sequence[float],
                       noise: NoiseSpec, seed: int) -> Dataset:
    """Evaluate the model at ``coordinates`` and corrupt it with seeded noise.

    The draws come from ``rng_stream(seed, "data")`` so the result is a pure
    function of the arguments.
    """
    coords = np.asarray(coordinates, dtype=float)
    if coords.ndim != 1 or coords.size == 0:
        raise DatasetError("coordinates must be a non-empty 1-d sequence")
    if coords.size < spec.dimension + 1:
        raise DatasetError(f"need at least {spec.dimension + 1} coordinates for {spec.model_id}")
    means = np.atleast_1d(evaluate_model(spec, true_theta, coords))
    obs = sample_observation(noise, means, rng_stream(seed, "data"))
    prov = Provenance(spec.model_id, dict(spec.context), true_theta.as_dict(), int(seed))
    return Dataset(spec.info.coordinate_kind, tuple(coords), tuple(np.atleast_1d(obs)), noise, prov)


# ---------------------------------------------------------------------------
# generic CSV tables

def format_float(value: float) -> str:
    return repr(float(value))


def _encode_mapping(mapping: Mapping[str, float]) -> str:
    return ";".join(f"{k}:{format_float(v)}" for k, v in mapping.items())


def _decode_mapping(text: str, where: str) -> dict[str, float]:
    out = {}
    if not text:
        return out
    for item in text.split(";"):
        key, sep, val = item.partition(":")
        if not sep:
            raise DatasetError(f"{where}: malformed mapping item {item!r}")
        try:
            out[key] = float(val)
        except ValueError:
            raise DatasetError(f"{where}: non-numeric value {val!r}") from None
    return out


def write_table(path, columns: Sequence[str], rows, meta: Sequence[Mapping[str, str]] = ()) -> Path:
    """Write a numeric table with ``# key=value`` header lines."""
    path = Path(path)
    lines = []
    for group in meta:
        lines.append("# " + ",".join(f"{k}={v}" for k, v in group.items()))
    lines.append(",".join(columns))
    for row in rows:
        if len(row) != len(columns):
            raise DatasetError("row length does not match the header")
        lines.append(",".join(format_float(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_table(path) -> tuple[dict[str, str], list[str], np.ndarray]:
    """Parse a table written by :func:`write_table`.

    Returns ``(meta, columns, values)`` where ``values`` has one row per record.
    """
    path = Path(path)
    meta: dict[str, str] = {}
    columns = None
    rows = []
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if columns is not None:
                    raise DatasetError(f"{path}:{lineno}: comment after the column header")
                for item in line[1:].strip().split(","):
                    key, sep, val = item.partition("=")
                    if not sep:
                        raise DatasetError(f"{path}:{lineno}: expected key=value, got {item!r}")
                    meta[key.strip()] = val.strip()
                continue
            fields = [f.strip() for f in line.split(",")]
            if columns is None:
                columns = fields
                continue
            if len(fields) != len(columns):
                raise DatasetError(f"{path}:{lineno}: expected {len(columns)} fields, got {len(fields)}")
            try:
                rows.append([float(f) for f in fields])
            except ValueError:
                raise DatasetError(f"{path}:{lineno}: non-numeric field in {line!r}") from None
    if columns is None:
        raise DatasetError(f"{path}: missing column header")
    values = np.array(rows, dtype=float).reshape(len(rows), len(columns))
    return meta, columns, values


# ---------------------------------------------------------------------------
# dataset files

def write_dataset(dataset: Dataset, path) -> Path:
    meta = []
    prov = dataset.provenance
    if prov is not None:
        meta.append({"model": prov.model_id})
        if prov.context:
            meta.append({"context": _encode_mapping(prov.context)})
    meta.append({"coordinate_kind": dataset.coordinate_kind})
    meta.append({"noise": dataset.noise.kind, "sigma": format_float(dataset.noise.sigma)})
    if prov is not None:
        if prov.seed is not None:
            meta.append({"seed": str(prov.seed)})
        if prov.true_theta:
            meta.append({"true_theta": _encode_mapping(prov.true_theta)})
    return write_table(path, ("coordinate", "observation"),
                       zip(dataset.coordinates, dataset.observations), meta)


def read_dataset(path) -> Dataset:
    """Read and validate a dataset CSV."""
    meta, columns, values = read_table(path)
    where = str(path)
    if columns != ["coordinate", "observation"]:
        raise DatasetError(f"{where}: expected columns coordinate,observation, got {columns}")
    if "noise" not in meta or "sigma" not in meta:
        raise DatasetError(f"{where}: header must declare noise=...,sigma=...")
    try:
        noise = NoiseSpec(meta["noise"], float(meta["sigma"]))
    except (ValueError, SchemaError) as exc:
        raise DatasetError(f"{where}: bad noise declaration: {exc}") from None
    kind = meta.get("coordinate_kind", "time")
    prov = None
    if "model" in meta:
        seed = meta.get("seed")
        prov = Provenance(meta["model"], _decode_mapping(meta.get("context", ""), where),
                          _decode_mapping(meta.get("true_theta", ""), where),
                          int(seed) if seed is not None else None)
    try:
        return Dataset(kind, tuple(values[:, 0]), tuple(values[:, 1]), noise, prov)
    except DatasetError as exc:
        raise DatasetError(f"{where}: {exc}") from None
