"""Config-driven command line: simulate | fit | profile | predict | report.

Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .data import DEFAULT_COORDINATES, Dataset, generate_synthetic, read_dataset, read_table, write_dataset, write_table
from .errors import ConfigError, DatasetError, DomainError, NumericalError, SchemaError
from .likelihood import LikelihoodProblem, NormalizedLikelihood, normalize
from .optim import OptimResult, find_mle
from .noise import rng_stream
from .predict import (ConfidenceSetSample, prediction_band, proposal_box_from_profiles,
                      sample_confidence_set)
from .profile import ProfileGrid, ProfileResult, profile_parameter, threshold_interval
from .specfun import likelihood_threshold
from .svgplot import band_svg, profile_svg

log = logging.getLogger("identifiability")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


@dataclass
class Run:
    """One CLI invocation: validated config plus resolved paths and overrides."""

    config: dict
    base_dir: Path
    output: Path
    seed: int
    threads: int = 1
    artifacts: list[str] = field(default_factory=list)
    # stage results shared by report
    dataset: Dataset | None = None
    data_path: Path | None = None
    fit: OptimResult | None = None
    nl: NormalizedLikelihood | None = None
    profiles: dict[str, ProfileResult] | None = None

    @property
    def spec(self):
        return cfgmod.model_spec(self.config["model"])

    @property
    def level(self) -> float:
        return float(self.config.get("confidence_level", 0.95))

    def path(self, name: str) -> Path:
        self.output.mkdir(parents=True, exist_ok=True)
        self.artifacts.append(name)
        return self.output / name


def make_run(config_path, output=None, seed=None, threads=1) -> Run:
    cfg, base = cfgmod.load_config(config_path)
    out = output if output is not None else cfg.get("output")
    if out is None:
        raise ConfigError("config error at output: no output directory (set 'output' or pass --output)")
    out = Path(out)
    if output is None and not out.is_absolute():
        out = base / out
    seed = seed if seed is not None else cfg.get("seed")
    if seed is None:
        seed = 0
    return Run(cfg, base, out, int(seed), max(1, int(threads)))


# ---------------------------------------------------------------------------
# stages

def _synthetic_dataset(run: Run) -> Dataset:
    recipe = run.config["data"]["synthetic"]
    gen_block = recipe.get("model", {"id": run.config["model"]["id"],
                                     "context": run.config["model"].get("context", {})})
    gen_spec = cfgmod.model_spec(gen_block)
    if "coordinates" in recipe:
        coords = cfgmod.coordinates(recipe["coordinates"])
    else:
        coords = DEFAULT_COORDINATES[gen_spec.model_id]
    try:
        theta = gen_spec.parameters(recipe["true_theta"])
    except SchemaError as exc:
        raise ConfigError(f"config error at data/synthetic/true_theta: {exc}") from None
    return generate_synthetic(gen_spec, theta, coords, cfgmod.noise_spec(run.config), run.seed)


def cmd_simulate(run: Run) -> Path:
    if "synthetic" not in run.config["data"]:
        raise ConfigError("config error at data/synthetic: simulate needs a synthetic recipe")
    run.dataset = _synthetic_dataset(run)
    run.data_path = write_dataset(run.dataset, run.path("data.csv"))
    return run.data_path


def _dataset(run: Run) -> Dataset:
    if run.dataset is not None:
        return run.dataset
    data = run.config["data"]
    if "path" in data:
        path = Path(data["path"])
        if not path.is_absolute():
            path = run.base_dir / path
        if not path.exists():
            raise ConfigError(f"config error at data/path: file not found: {path}")
        ds = read_dataset(path)
        noise = cfgmod.noise_spec(run.config)
        if ds.noise != noise:
            raise ConfigError(f"config error at noise: dataset declares {ds.noise}, config has {noise}")
        run.data_path = path
    else:
        # synthetic data is always written out so plots can be rebuilt from files
        cmd_simulate(run)
        return run.dataset
    run.dataset = ds
    return ds


def _prediction_coordinates(run: Run) -> np.ndarray:
    pred = run.config.get("prediction", {})
    spec = pred.get("coordinates", cfgmod.DEFAULT_PREDICTION_COORDINATES[run.config["model"]["id"]])
    return cfgmod.coordinates(spec)


def cmd_fit(run: Run) -> OptimResult:
    if run.fit is not None:
        return run.fit
    spec = run.spec
    problem = LikelihoodProblem(spec, _dataset(run))
    start = None
    if "start" in run.config["model"]:
        values = dict(zip(spec.parameter_names, spec.box().values))
        values.update(run.config["model"]["start"])
        try:
            start = spec.parameters(values)
        except SchemaError as exc:
            raise ConfigError(f"config error at model/start: {exc}") from None
    result = find_mle(problem, start, cfgmod.optimizer_settings(run.config))
    run.fit = result
    run.nl = normalize(problem, result.argmax)

    summary = {
        "model": spec.model_id,
        "parameters": list(spec.parameter_names),
        "mle": result.argmax.as_dict(),
        "loglikelihood": result.value,
        "evaluations": result.evaluations,
        "converged": result.converged,
        "records": len(problem.dataset),
        "noise": {"kind": problem.noise.kind, "sigma": problem.noise.sigma},
    }
    run.path("fit.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    coords = _prediction_coordinates(run)
    curve = spec.kernel(result.argmax.as_array(), coords)
    write_table(run.path("mle_curve.csv"), ("coordinate", "mle"), zip(coords, curve),
                [{"model": spec.model_id}])
    if not result.converged:
        raise NumericalError(f"maximum-likelihood search did not converge in {result.evaluations} evaluations")
    return result


def _grid(run: Run, name: str) -> ProfileGrid:
    prof = run.config.get("profile", {})
    spec = run.spec
    i = spec.parameter_names.index(name)
    grid_spec = prof.get("grids", {}).get(name, {"start": spec.lower[i], "stop": spec.upper[i], "num": 40})
    try:
        return ProfileGrid(name, tuple(cfgmod.coordinates(grid_spec)))
    except DomainError as exc:
        raise ConfigError(f"config error at profile/grids/{name}: {exc}") from None


def _compute_profiles(run: Run) -> dict[str, ProfileResult]:
    if run.profiles is not None:
        return run.profiles
    cmd_fit(run)
    prof = run.config.get("profile", {})
    names = prof.get("parameters", list(run.spec.parameter_names))
    unknown = [n for n in names if n not in run.spec.parameter_names]
    unknown += [n for n in prof.get("grids", {}) if n not in run.spec.parameter_names]
    if unknown:
        raise ConfigError(f"config error at profile: unknown parameters {unknown}")
    threshold = likelihood_threshold(run.level, 1)
    settings = cfgmod.optimizer_settings(run.config)
    out = {}
    for name in names:
        try:
            res = profile_parameter(run.nl, _grid(run, name), settings,
                                    warm_start=prof.get("warm_start", True), threads=run.threads)
        except DomainError as exc:
            raise ConfigError(f"config error at profile/grids/{name}: {exc}") from None
        out[name] = threshold_interval(res, threshold, prof.get("flat_tolerance", 0.25))
    run.profiles = out
    return out


def cmd_profile(run: Run) -> dict[str, ProfileResult]:
    profiles = _compute_profiles(run)
    spec = run.spec
    summary = {"confidence_level": run.level, "threshold": likelihood_threshold(run.level, 1), "profiles": {}}
    for name, res in profiles.items():
        nuis = [n for n in spec.parameter_names if n != name]
        rows = []
        for psi, val, arg in zip(res.grid.grid_points, res.profiled_values, res.nuisance_argmax):
            extra = [float("nan")] * len(nuis) if arg is None else list(arg.values)
            rows.append([psi, val] + extra)
        meta = [{"parameter": name, "threshold": repr(res.threshold), "mle": repr(res.mle_value)},
                {"identifiability": res.identifiability}]
        csv_path = write_table(run.path(f"profile_{name}.csv"), [name, "profiled"] + nuis, rows, meta)
        _profile_svg_from_csv(csv_path, run.path(f"profile_{name}.svg"))
        summary["profiles"][name] = {
            "mle": res.mle_value,
            "ci": list(res.ci) if res.ci else None,
            "ci_lower": res.ci_lower,
            "ci_upper": res.ci_upper,
            "identifiability": res.identifiability,
            "failed_points": int(np.sum(~np.isfinite(res.values))),
        }
    run.path("profiles.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return profiles


def _profile_svg_from_csv(csv_path: Path, svg_path: Path):
    meta, columns, values = read_table(csv_path)
    svg = profile_svg(values[:, 0], values[:, 1], columns[0],
                      threshold=float(meta["threshold"]), mle=float(meta["mle"]))
    svg_path.write_text(svg, encoding="utf-8")


def cmd_predict(run: Run):
    cmd_fit(run)
    pred = run.config.get("prediction", {})
    spec = run.spec
    nl = run.nl
    dof = pred.get("dof", spec.dimension)
    threshold = likelihood_threshold(run.level, dof)
    if pred.get("debug_mle_only", False):
        samples = ConfidenceSetSample.from_mle(nl.mle, threshold, run.level)
    else:
        lower = upper = None
        if pred.get("proposal", "bounds") == "profile":
            profiles = _compute_profiles(run)
            lower, upper = proposal_box_from_profiles(spec.parameter_names, profiles, threshold,
                                                      spec.lower, spec.upper)
        samples = sample_confidence_set(
            nl, threshold, pred.get("M", 1000), rng_stream(run.seed, "predict"),
            pred.get("max_attempts"), lower=lower, upper=upper, workers=run.threads,
            batch_size=pred.get("batch_size", 20_000), confidence_level=run.level)
    lo_p, hi_p = pred.get("quantiles", [0.05, 0.95])
    if not lo_p < hi_p:
        raise ConfigError("config error at prediction/quantiles: need lower < upper")
    band = prediction_band(spec, samples, nl.problem.noise, _prediction_coordinates(run), lo_p, hi_p)

    write_table(run.path("samples.csv"), spec.parameter_names, samples.values,
                [{"threshold": repr(threshold), "dof": str(dof), "attempts": str(samples.attempts)}])
    meta = [{"model": spec.model_id, "confidence_level": repr(run.level)},
            {"quantiles": f"{lo_p!r};{hi_p!r}", "samples": str(len(samples))}]
    band_path = write_table(run.path("band.csv"), ("coordinate", "lower", "mle", "upper"), band.rows(), meta)
    _band_svg_from_csv(band_path, run.data_path, run.path("band.svg"),
                       xlabel="t" if spec.info.coordinate_kind == "time" else "x")
    return band


def _band_svg_from_csv(band_path: Path, data_path: Path | None, svg_path: Path, xlabel: str):
    _, _, b = read_table(band_path)
    dx = dy = None
    if data_path is not None:
        _, _, d = read_table(data_path)
        dx, dy = d[:, 0], d[:, 1]
    svg_path.write_text(band_svg(b[:, 0], b[:, 1], b[:, 2], b[:, 3], dx, dy, xlabel=xlabel), encoding="utf-8")


def cmd_report(run: Run):
    if "synthetic" in run.config["data"]:
        cmd_simulate(run)
    cmd_fit(run)
    cmd_profile(run)
    cmd_predict(run)
    path = run.path("manifest.json")
    manifest = {"model": run.spec.model_id, "seed": run.seed, "artifacts": sorted(set(run.artifacts))}
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest


HELP = {
    "simulate": "write a synthetic dataset from the config's recipe",
    "fit": "maximum-likelihood fit; writes fit.json and mle_curve.csv",
    "profile": "profile likelihoods, confidence intervals and identifiability labels",
    "predict": "sample the confidence set and build the prediction band",
    "report": "run every stage and write manifest.json",
}

COMMANDS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "profile": cmd_profile,
    "predict": cmd_predict,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="identifiability",
        description="Fit closed-form models, profile likelihoods and build prediction bands.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--config", required=True, help="run configuration (JSON)")
        p.add_argument("--output", help="output directory (overrides the config)")
        p.add_argument("--seed", type=int, help="random seed (overrides the config)")
        p.add_argument("--threads", type=int, default=1, help="worker threads for profiles and sampling")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        run = make_run(args.config, args.output, args.seed, args.threads)
        COMMANDS[args.command](run)
    except (ConfigError, DatasetError, SchemaError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for name in run.artifacts:
        log.info("wrote %s", run.output / name)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
