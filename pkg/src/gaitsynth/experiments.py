"""Experiment harness: seeded optimizer runs against the walking
environment, HS-vs-GA comparisons, trajectory exports, benchmark runs,
and manifests that reproduce any zero-noise run byte for byte.

Runs are driven by a JSON config with full-default fallback; every
artifact directory receives a manifest.json holding the complete
parameterization, so `run_from_manifest` can re-execute it exactly.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from gaitsynth import __version__
from gaitsynth.optimize import (
    GENOME_FIELDS,
    GaParams,
    HsParams,
    OptimizeResult,
    SearchBounds,
    benchmark_bounds,
    benchmark_objectives,
    ga_optimize,
    gait_bounds,
    hs_optimize,
    random_search,
)
from gaitsynth.simulator import (
    SimConfig,
    evaluate,
    trace,
    write_result_json,
    write_trace_csv,
)

log = logging.getLogger(__name__)

OPTIMIZERS = ("hs", "ga", "random")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    optimizer: str = "hs"
    hs: HsParams = HsParams()
    ga: GaParams = GaParams(population=76, generations=10)
    random_budget: int | None = None
    sim: SimConfig = SimConfig()
    bounds: SearchBounds = field(default_factory=gait_bounds)
    seeds: tuple[int, ...] = (1,)
    out_dir: str = "runs"
    allow_unequal_budget: bool = False

    def __post_init__(self):
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        if len(self.seeds) < 1:
            raise ConfigError("at least one seed is required")

    @property
    def hs_budget(self) -> int:
        return self.hs.hms + self.hs.ni

    @property
    def ga_budget(self) -> int:
        return self.ga.population * self.ga.generations


def _params_to_dict(params) -> dict:
    return dataclasses.asdict(params)


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return {
        "optimizer": cfg.optimizer,
        "hs": _params_to_dict(cfg.hs),
        "ga": _params_to_dict(cfg.ga),
        "random_budget": cfg.random_budget,
        "sim": _params_to_dict(cfg.sim),
        "bounds": {
            "lower": list(cfg.bounds.lower),
            "upper": list(cfg.bounds.upper),
            "names": list(cfg.bounds.names) if cfg.bounds.names else None,
        },
        "seeds": list(cfg.seeds),
        "out_dir": str(cfg.out_dir),
        "allow_unequal_budget": cfg.allow_unequal_budget,
    }


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a config from a possibly partial dict; missing keys fall back
    to the defaults (the headline gait experiment)."""
    base = ExperimentConfig()
    try:
        hs = HsParams(**{**_params_to_dict(base.hs), **data.get("hs", {})})
        ga = GaParams(**{**_params_to_dict(base.ga), **data.get("ga", {})})
        sim = SimConfig(**{**_params_to_dict(base.sim), **data.get("sim", {})})
        if "bounds" in data:
            b = data["bounds"]
            names = b.get("names")
            bounds = SearchBounds(np.asarray(b["lower"], dtype=float),
                                  np.asarray(b["upper"], dtype=float),
                                  tuple(names) if names else None)
        else:
            bounds = gait_bounds()
        return ExperimentConfig(
            optimizer=data.get("optimizer", base.optimizer),
            hs=hs, ga=ga,
            random_budget=data.get("random_budget"),
            sim=sim, bounds=bounds,
            seeds=tuple(data.get("seeds", base.seeds)),
            out_dir=data.get("out_dir", base.out_dir),
            allow_unequal_budget=data.get("allow_unequal_budget", False),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid experiment config: {exc}") from exc


def load_config(path=None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def write_history_csv(path, result: OptimizeResult) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(result.history_columns) + "\n")
        for idx, best, mean in result.history:
            fh.write(f"{idx},{best!r},{mean!r}\n")


def write_genome_json(path, genome, fitness: float, extra: dict | None = None) -> None:
    payload = {"fields": list(GENOME_FIELDS), "genome": [float(v) for v in genome],
               "fitness": float(fitness)}
    if extra:
        payload.update(extra)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_genome_json(path) -> np.ndarray:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read genome file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"genome file {path} is not valid JSON: {exc}") from exc
    if "genome" not in data:
        raise ConfigError(f"genome file {path} lacks a 'genome' field")
    genome = np.asarray(data["genome"], dtype=float)
    if genome.shape != (len(GENOME_FIELDS),):
        raise ConfigError(
            f"genome file {path}: field 'genome' must hold {len(GENOME_FIELDS)} numbers")
    return genome


def _run_one(cfg: ExperimentConfig, seed: int) -> OptimizeResult:
    objective = lambda g: evaluate(g, cfg.sim)  # noqa: E731
    if cfg.optimizer == "hs":
        return hs_optimize(objective, cfg.bounds, replace(cfg.hs, seed=seed))
    if cfg.optimizer == "ga":
        return ga_optimize(objective, cfg.bounds, replace(cfg.ga, seed=seed))
    budget = cfg.random_budget if cfg.random_budget is not None else cfg.hs_budget
    return random_search(objective, cfg.bounds, budget, seed=seed)


def _seed_manifest(cfg: ExperimentConfig, seed: int) -> dict:
    data = config_to_dict(cfg)
    data["seeds"] = [seed]
    # The output location is not part of the experiment identity; dropping
    # it keeps a re-run's manifest byte-identical to the original.
    del data["out_dir"]
    return {"kind": "optimize", "version": __version__, "config": data}


def run_optimize(cfg: ExperimentConfig) -> dict:
    """Run the configured optimizer once per seed.

    Each seed writes its artifacts to <out_dir>/seed_<n>/: the best genome
    JSON, the learning-curve CSV and a manifest sufficient to re-run the
    seed bit-identically.  Returns a summary with per-seed best fitness.
    """
    out = Path(cfg.out_dir)
    summary = {"optimizer": cfg.optimizer, "seeds": list(cfg.seeds),
               "best_fitness": [], "n_evals": [], "dirs": []}
    for seed in cfg.seeds:
        run_dir = out / f"seed_{seed}"
        os.makedirs(run_dir, exist_ok=True)
        result = _run_one(cfg, seed)
        write_genome_json(run_dir / "best_genome.json", result.best,
                          result.best_fitness, {"seed": seed, "optimizer": cfg.optimizer})
        write_history_csv(run_dir / "history.csv", result)
        with open(run_dir / "manifest.json", "w") as fh:
            json.dump(_seed_manifest(cfg, seed), fh, indent=2, sort_keys=True)
            fh.write("\n")
        summary["best_fitness"].append(result.best_fitness)
        summary["n_evals"].append(result.n_evals)
        summary["dirs"].append(str(run_dir))
        log.info("seed %d: best fitness %.4f in %d evaluations",
                 seed, result.best_fitness, result.n_evals)
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def run_from_manifest(manifest_path, out_dir) -> dict:
    """Re-execute the run recorded in a manifest into a fresh directory."""
    try:
        with open(manifest_path) as fh:
            manifest = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read manifest {manifest_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"manifest {manifest_path} is not valid JSON: {exc}") from exc
    if manifest.get("kind") != "optimize":
        raise ConfigError(f"manifest {manifest_path} has kind {manifest.get('kind')!r},"
                          " expected 'optimize'")
    cfg = config_from_dict(manifest["config"])
    cfg = dataclasses.replace(cfg, out_dir=str(out_dir))
    return run_optimize(cfg)


def run_compare(cfg: ExperimentConfig) -> dict:
    """Run HS and GA on identical seeds and report per-seed bests.

    Budgets must match unless allow_unequal_budget is set; the HS budget is
    hms + ni and the GA budget population * generations.
    """
    if cfg.hs_budget != cfg.ga_budget and not cfg.allow_unequal_budget:
        raise ConfigError(
            f"HS budget {cfg.hs_budget} != GA budget {cfg.ga_budget}; "
            "match them or pass allow_unequal_budget")
    out = Path(cfg.out_dir)
    os.makedirs(out, exist_ok=True)
    rows = []
    for seed in cfg.seeds:
        hs_res = _run_one(dataclasses.replace(cfg, optimizer="hs"), seed)
        ga_res = _run_one(dataclasses.replace(cfg, optimizer="ga"), seed)
        rows.append((seed, hs_res.best_fitness, ga_res.best_fitness))
        log.info("seed %d: HS %.4f vs GA %.4f", seed, hs_res.best_fitness,
                 ga_res.best_fitness)
    with open(out / "compare.csv", "w", newline="") as fh:
        fh.write("seed,hs_best,ga_best\n")
        for seed, h, g in rows:
            fh.write(f"{seed},{h!r},{g!r}\n")
    hs_vals = np.array([r[1] for r in rows])
    ga_vals = np.array([r[2] for r in rows])
    report = {
        "seeds": list(cfg.seeds),
        "hs_budget": cfg.hs_budget,
        "ga_budget": cfg.ga_budget,
        "hs_median": float(np.median(hs_vals)),
        "ga_median": float(np.median(ga_vals)),
        "hs_wins": int(np.sum(hs_vals > ga_vals)),
        "ga_within_hs": int(np.sum(ga_vals <= hs_vals)),
        "rows": [{"seed": s, "hs_best": h, "ga_best": g} for s, h, g in rows],
    }
    with open(out / "compare_summary.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report


def run_trace(genome_path, sim: SimConfig, out_dir) -> dict:
    """Trace one genome: write the per-tick trajectory CSV and result JSON."""
    genome = load_genome_json(genome_path)
    if not gait_bounds().contains(genome):
        log.warning("genome from %s lies outside the default search box", genome_path)
    out = Path(out_dir)
    os.makedirs(out, exist_ok=True)
    result = trace(genome, sim)
    write_trace_csv(out / "trace.csv", result, sim)
    write_result_json(out / "result.json", result, sim)
    return {"x": result.x, "y": result.y, "fell": result.fell,
            "fall_time": result.fall_time, "fitness": result.fitness,
            "n_exchanges": result.n_exchanges}


def run_bench(cfg: ExperimentConfig, function: str, dim: int, budget: int) -> dict:
    """Optimizer battery on a benchmark function; one CSV row per seed."""
    objective = benchmark_objectives().get(function)
    if objective is None:
        raise ConfigError(f"unknown benchmark function {function!r}")
    bounds = benchmark_bounds(function, dim)
    out = Path(cfg.out_dir)
    os.makedirs(out, exist_ok=True)
    rows = []
    for seed in cfg.seeds:
        if cfg.optimizer == "hs":
            if budget < cfg.hs.hms:
                raise ConfigError(f"budget {budget} is below hms {cfg.hs.hms}")
            params = replace(cfg.hs, ni=budget - cfg.hs.hms, seed=seed)
            result = hs_optimize(objective, bounds, params)
        elif cfg.optimizer == "ga":
            if budget % cfg.ga.generations:
                raise ConfigError(
                    f"budget {budget} not divisible by {cfg.ga.generations} generations")
            params = replace(cfg.ga, population=budget // cfg.ga.generations, seed=seed)
            result = ga_optimize(objective, bounds, params)
        else:
            result = random_search(objective, bounds, budget, seed=seed)
        rows.append((seed, result.best_fitness, result.n_evals))
    with open(out / "bench.csv", "w", newline="") as fh:
        fh.write("seed,best_fitness,n_evals\n")
        for seed, best, n in rows:
            fh.write(f"{seed},{best!r},{n}\n")
    vals = np.array([r[1] for r in rows])
    report = {"function": function, "dim": dim, "budget": budget,
              "optimizer": cfg.optimizer, "median_best": float(np.median(vals)),
              "rows": [{"seed": s, "best": b, "n_evals": n} for s, b, n in rows]}
    with open(out / "bench_summary.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report
