"""Batch front end: JSON experiment configs in, CSV/JSON result tables out.

Exit codes: 0 success, 1 configuration/validation error, 2 I/O error.
Environment overrides: ``IRSA_SEED`` and ``IRSA_THREADS`` (command-line flags
win over both).
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

from . import __version__, analysis, optimizer, simulator
from .analysis import ClassSpec, ScenarioConfig
from .distributions import CATALOG, DegreeDistribution
from .errors import ConfigParseError, ConfigError, IrsaError
from .optimizer import CandidateSpace, UtilityModel

COMMANDS = ("de", "sim", "stability", "threshold", "region", "optimize", "reproduce-figure")


@dataclass
class ExperimentConfig:
    command: str
    payload: dict
    trials: int = 1000
    seed: int = 0
    threads: int = 1
    sweep: dict | None = None

    def canonical(self) -> dict:
        return {
            "command": self.command,
            "payload": self.payload,
            "trials": self.trials,
            "seed": self.seed,
            "sweep": self.sweep,
        }


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple]
    provenance: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ConfigError("result table rows must be rectangular")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit(table: ResultTable, fmt: str, path: str | None) -> None:
    """Write the table as CSV (with ``# key=value`` provenance comments) or JSON."""
    if fmt == "csv":
        buf = io.StringIO()
        for key in sorted(table.provenance):
            buf.write(f"# {key}={table.provenance[key]}\n")
        buf.write(",".join(table.columns) + "\n")
        for row in table.rows:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        text = buf.getvalue()
    elif fmt == "json":
        records = [dict(zip(table.columns, row)) for row in table.rows]
        text = json.dumps(records, indent=2) + "\n"
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def parse_distribution(spec) -> DegreeDistribution:
    """Catalog name ("a".."f") or inline degree->coefficient map."""
    if isinstance(spec, str):
        try:
            return CATALOG.get(spec)
        except KeyError:
            raise ConfigParseError(f"unknown catalog distribution {spec!r}") from None
    if isinstance(spec, dict):
        try:
            return DegreeDistribution({int(k): float(v) for k, v in spec.items()})
        except (TypeError, ValueError) as exc:
            raise ConfigParseError(f"bad distribution literal: {exc}") from None
    raise ConfigParseError(f"distribution must be a name or a map, got {type(spec).__name__}")


def parse_scenario(payload: dict) -> ScenarioConfig:
    try:
        classes = tuple(
            ClassSpec(
                count=int(c["count"]),
                weight=float(c["weight"]),
                dist=parse_distribution(c["dist"]),
            )
            for c in payload["classes"]
        )
        return ScenarioConfig(
            n_slots=int(payload["n_slots"]),
            classes=classes,
            max_iters=int(payload.get("max_iters", 100)),
        )
    except KeyError as exc:
        raise ConfigParseError(f"scenario is missing field {exc}") from None


def parse_space(payload: dict) -> CandidateSpace:
    try:
        dists = tuple(
            tuple(parse_distribution(d) for d in group) for group in payload["dists"]
        )
        ranges = tuple(
            range(int(r["from"]), int(r["to"]) + 1, int(r.get("step", 1)))
            for r in payload["count_ranges"]
        )
        return CandidateSpace(
            dists=dists,
            count_ranges=ranges,
            n_slots=int(payload["n_slots"]),
            max_iters=int(payload.get("max_iters", 100)),
        )
    except KeyError as exc:
        raise ConfigParseError(f"candidate space is missing field {exc}") from None


def parse_config(raw: dict) -> ExperimentConfig:
    if "command" not in raw:
        raise ConfigParseError("config is missing the 'command' field")
    command = raw["command"]
    if command not in COMMANDS:
        raise ConfigParseError(f"unknown command {command!r}; expected one of {COMMANDS}")
    sweep = raw.get("sweep")
    if sweep is not None:
        for key in ("from", "to", "step"):
            if key not in sweep:
                raise ConfigParseError(f"sweep is missing field '{key}'")
        if float(sweep["step"]) <= 0:
            raise ConfigParseError("sweep step must be positive")
        if float(sweep["to"]) < float(sweep["from"]):
            raise ConfigParseError("empty sweep range")
    return ExperimentConfig(
        command=command,
        payload={k: v for k, v in raw.items() if k not in
                 ("command", "trials", "seed", "threads", "sweep")},
        trials=int(raw.get("trials", 1000)),
        seed=int(raw.get("seed", 0)),
        threads=int(raw.get("threads", 1)),
        sweep=sweep,
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigParseError(f"{path}: top-level config must be an object")
    return parse_config(raw)


def _sweep_values(sweep: dict) -> list[float]:
    start, stop, step = float(sweep["from"]), float(sweep["to"]), float(sweep["step"])
    n = int(math.floor((stop - start) / step + 1e-9))
    return [round(start + i * step, 12) for i in range(n + 1)]


def _provenance(cfg: ExperimentConfig) -> dict[str, str]:
    digest = hashlib.sha256(
        json.dumps(cfg.canonical(), sort_keys=True).encode()
    ).hexdigest()
    return {"version": __version__, "seed": str(cfg.seed), "config": digest[:16]}


def _utility_for(scenario: ScenarioConfig) -> UtilityModel:
    return UtilityModel.log_utility([c.weight for c in scenario.classes])


def _run_de(cfg: ExperimentConfig) -> ResultTable:
    base = parse_scenario(cfg.payload["scenario"])
    rows = []
    sweeps = _sweep_values(cfg.sweep) if cfg.sweep else [base.traffic]
    for g in sweeps:
        scen = analysis.with_counts(base, analysis.scaled_counts(base, g)) if cfg.sweep else base
        outcome = analysis.density_evolution(scen)
        for k, pe in enumerate(outcome.pe):
            rows.append((g, k + 1, pe, outcome.iterations_run, outcome.converged))
    return ResultTable(
        columns=["G", "class", "pe_theory", "iterations", "converged"],
        rows=rows,
        provenance=_provenance(cfg),
    )


def _run_sim(cfg: ExperimentConfig) -> ResultTable:
    base = parse_scenario(cfg.payload["scenario"])
    utility = _utility_for(base)
    rows = []
    sweeps = _sweep_values(cfg.sweep) if cfg.sweep else [base.traffic]
    for g in sweeps:
        scen = analysis.with_counts(base, analysis.scaled_counts(base, g)) if cfg.sweep else base
        outcome = analysis.density_evolution(scen)
        report = simulator.monte_carlo(
            scen, cfg.trials, cfg.seed, utility=utility, threads=cfg.threads
        )
        for k in range(scen.num_classes):
            rows.append(
                (
                    g,
                    k + 1,
                    outcome.pe[k],
                    report.per_class_pe[k],
                    report.per_class_throughput[k],
                    report.utility_mean,
                    report.utility_ci95,
                )
            )
    return ResultTable(
        columns=["G", "class", "pe_theory", "pe_sim", "throughput", "utility_mean", "utility_ci95"],
        rows=rows,
        provenance=_provenance(cfg),
    )


def _run_stability(cfg: ExperimentConfig) -> ResultTable:
    scen = parse_scenario(cfg.payload["scenario"])
    report = analysis.stability_margin(scen)
    return ResultTable(
        columns=["stable", "min_margin", "argmin_z"],
        rows=[(report.stable, report.min_margin, report.argmin_z)],
        provenance=_provenance(cfg),
    )


def _run_threshold(cfg: ExperimentConfig) -> ResultTable:
    scen = parse_scenario(cfg.payload["scenario"])
    tol = float(cfg.payload.get("tol", 1e-3))
    result = analysis.threshold_bisection(scen, tol=tol)
    return ResultTable(
        columns=["g_star", "tolerance"] + [f"ratio_{k + 1}" for k in range(scen.num_classes)],
        rows=[(result.g_star, result.tolerance, *result.ratios)],
        provenance=_provenance(cfg),
    )


def _run_region(cfg: ExperimentConfig) -> ResultTable:
    space = parse_space(cfg.payload["space"])
    dists = tuple(parse_distribution(d) for d in cfg.payload["assignment"])
    region = optimizer.on_region_theoretical(space, dists)
    safe = optimizer.safe_boundary(region)
    count_cols = [f"L_{k + 1}" for k in range(space.num_classes)]
    rows = [(*p, "theoretical") for p in region.boundary]
    rows += [(*p, "safe") for p in safe.boundary]
    if cfg.payload.get("simulate", False):
        sim = optimizer.on_region_simulated(
            space, dists, trials=cfg.trials, seed=cfg.seed, threads=cfg.threads
        )
        rows += [(*p, "simulated") for p in sim.boundary]
    return ResultTable(
        columns=count_cols + ["mode"], rows=rows, provenance=_provenance(cfg)
    )


def _run_optimize(cfg: ExperimentConfig) -> ResultTable:
    space = parse_space(cfg.payload["space"])
    weights = cfg.payload.get("weights")
    if weights is None:
        raise ConfigParseError("optimize requires a 'weights' field")
    utility = UtilityModel.log_utility([float(w) for w in weights])
    methods = cfg.payload.get("methods", ["alg1", "alg2"])
    rows = []
    for method in methods:
        if method == "alg1":
            res = optimizer.algorithm1(space, utility)
        elif method == "alg2":
            res = optimizer.algorithm2(space, utility)
        elif method == "exhaustive":
            res = optimizer.exhaustive_oracle(
                space, utility, trials=cfg.trials, seed=cfg.seed, threads=cfg.threads
            )
        else:
            raise ConfigParseError(f"unknown optimize method {method!r}")
        labels = "+".join(d.label or "?" for d in res.dists)
        utility_db = 10.0 * math.log10(res.utility) if res.utility > 0 else float("-inf")
        rows.append((method, labels, *res.counts, res.utility, utility_db))
    count_cols = [f"L_{k + 1}" for k in range(space.num_classes)]
    return ResultTable(
        columns=["method", "dists"] + count_cols + ["utility", "utility_db_display"],
        rows=rows,
        provenance=_provenance(cfg),
    )


# Shipped experiment recipes.  Sweep densities and default trial counts are
# sized so the full recipe reproduces the reference behavior; override
# --trials for a quick look.
FIGURE_PRESETS: dict[str, dict] = {
    "fig4": {
        "command": "sim",
        "scenario": {
            "n_slots": 200,
            "max_iters": 100,
            "classes": [
                {"count": 50, "weight": 0.5, "dist": "f"},
                {"count": 50, "weight": 0.5, "dist": "a"},
            ],
        },
        "trials": 10000,
    },
    "fig5-eep": {
        "command": "sim",
        "scenario": {
            "n_slots": 200,
            "max_iters": 100,
            "classes": [
                {"count": 1, "weight": 0.7, "dist": "e"},
                {"count": 1, "weight": 0.3, "dist": "e"},
            ],
        },
        "sweep": {"from": 0.1, "to": 1.0, "step": 0.05},
        "trials": 1000,
    },
    "fig5-uep": {
        "command": "sim",
        "scenario": {
            "n_slots": 200,
            "max_iters": 100,
            "classes": [
                {"count": 1, "weight": 0.7, "dist": "e"},
                {"count": 1, "weight": 0.3, "dist": "b"},
            ],
        },
        "sweep": {"from": 0.1, "to": 1.0, "step": 0.05},
        "trials": 1000,
    },
    "fig6": {
        "command": "sim",
        "scenario": {
            "n_slots": 200,
            "max_iters": 100,
            "classes": [
                {"count": 10, "weight": 0.7, "dist": "e"},
                {"count": 1, "weight": 0.3, "dist": "b"},
            ],
        },
        "sweep": {"from": 0.1, "to": 1.0, "step": 0.05},
        "trials": 1000,
    },
    "fig7": {
        "command": "optimize",
        "space": {
            "n_slots": 200,
            "dists": [["e"], ["e"]],
            "count_ranges": [{"from": 0, "to": 160, "step": 10}, {"from": 0, "to": 160}],
        },
        "weights": [0.7, 0.3],
        "methods": ["alg1", "alg2"],
    },
    "fig8": {
        "command": "region",
        "space": {
            "n_slots": 200,
            "dists": [["e"], ["a"]],
            "count_ranges": [{"from": 0, "to": 160, "step": 20}, {"from": 0, "to": 200}],
        },
        "assignment": ["e", "a"],
        "simulate": True,
        "trials": 1000,
    },
    "fig9a": {
        "command": "optimize",
        "space": {
            "n_slots": 200,
            "dists": [["c"], ["c"]],
            "count_ranges": [{"from": 0, "to": 160, "step": 10}, {"from": 0, "to": 160}],
        },
        "weights": [0.7, 0.3],
        "methods": ["alg1", "alg2", "exhaustive"],
        "trials": 200,
    },
    "fig10a": {
        "command": "optimize",
        "space": {
            "n_slots": 200,
            "dists": [["e"], ["a"]],
            "count_ranges": [{"from": 0, "to": 200, "step": 20}, {"from": 0, "to": 200, "step": 20}],
        },
        "weights": [0.7, 0.3],
        "methods": ["alg2", "exhaustive"],
        "trials": 200,
    },
}


def _run_reproduce_figure(cfg: ExperimentConfig) -> ResultTable:
    name = cfg.payload.get("figure")
    if name not in FIGURE_PRESETS:
        raise ConfigParseError(
            f"unknown figure {name!r}; available: {sorted(FIGURE_PRESETS)}"
        )
    preset = dict(FIGURE_PRESETS[name])
    preset.setdefault("trials", cfg.trials)
    inner = parse_config(preset)
    inner.seed = cfg.seed
    inner.threads = cfg.threads
    if "trials" not in preset or cfg.payload.get("override_trials"):
        inner.trials = cfg.trials
    return run_experiment(inner)


def run_experiment(cfg: ExperimentConfig) -> ResultTable:
    """Dispatch one experiment config to the matching module."""
    handlers = {
        "de": _run_de,
        "sim": _run_sim,
        "stability": _run_stability,
        "threshold": _run_threshold,
        "region": _run_region,
        "optimize": _run_optimize,
        "reproduce-figure": _run_reproduce_figure,
    }
    return handlers[cfg.command](cfg)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irsa",
        description="Analyze, simulate, and optimize prioritized IRSA strategies.",
    )
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--trials", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        env_seed = os.environ.get("IRSA_SEED")
        env_threads = os.environ.get("IRSA_THREADS")
        if env_seed is not None:
            cfg.seed = int(env_seed)
        if env_threads is not None:
            cfg.threads = int(env_threads)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.trials is not None:
            cfg.trials = args.trials
            cfg.payload["override_trials"] = True
        if args.threads is not None:
            cfg.threads = args.threads
        table = run_experiment(cfg)
    except (IrsaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    try:
        emit(table, args.format, args.out)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
