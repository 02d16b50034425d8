"""Monte Carlo frame simulation: random bipartite frames, SIC peeling, and
per-class statistics.

Trial t of a run is seeded from ``SeedSequence([base_seed, t])``, so results
are bit-identical for a fixed (config, trials, base_seed) regardless of how
many worker threads execute the trials.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .analysis import ScenarioConfig
from .errors import ConfigError


@dataclass
class FrameGraph:
    """One realized MAC frame as a burst-node / slot-node bipartite graph.

    Stored flat: burst b of class ``burst_class[b]`` occupies
    ``slots[offsets[b]:offsets[b+1]]``.
    """

    n_slots: int
    burst_class: np.ndarray  # int32, class index per burst
    offsets: np.ndarray  # int64, length num_bursts + 1
    slots: np.ndarray  # int32, flat slot indices

    @classmethod
    def from_bursts(cls, n_slots: int, bursts) -> "FrameGraph":
        """Build from a list of (class_index, iterable_of_slots) records."""
        classes = np.array([k for k, _ in bursts], dtype=np.int32)
        slot_lists = [list(s) for _, s in bursts]
        offsets = np.zeros(len(bursts) + 1, dtype=np.int64)
        offsets[1:] = np.cumsum([len(s) for s in slot_lists])
        flat = np.array(
            [s for lst in slot_lists for s in lst] or [], dtype=np.int32
        )
        g = cls(n_slots=n_slots, burst_class=classes, offsets=offsets, slots=flat)
        g.check()
        return g

    @property
    def num_bursts(self) -> int:
        return len(self.burst_class)

    def burst_slots(self, b: int) -> np.ndarray:
        return self.slots[self.offsets[b] : self.offsets[b + 1]]

    def slot_bursts(self) -> list[list[int]]:
        """Per-slot incident burst lists (transpose of the burst slot sets)."""
        incidence: list[list[int]] = [[] for _ in range(self.n_slots)]
        for b in range(self.num_bursts):
            for s in self.burst_slots(b):
                incidence[int(s)].append(b)
        return incidence

    def check(self) -> None:
        if len(self.slots) and (self.slots.min() < 0 or self.slots.max() >= self.n_slots):
            raise ConfigError("slot index out of range")
        for b in range(self.num_bursts):
            chosen = self.burst_slots(b)
            if len(np.unique(chosen)) != len(chosen):
                raise ConfigError(f"burst {b} repeats a slot")


@dataclass
class DecodeResult:
    decoded: np.ndarray  # bool per burst
    per_class_recovered: list[int]
    iterations_used: int


@dataclass
class MonteCarloReport:
    trials: int
    per_class_pe: list[float]
    per_class_throughput: list[float]
    utility_mean: float
    utility_ci95: float
    seed: int


def _degree_tables(cfg: ScenarioConfig):
    """Per-class (support, cdf) arrays for inverse-cdf degree sampling."""
    tables = []
    for spec in cfg.classes:
        degrees = np.array(sorted(spec.dist.coeffs), dtype=np.int64)
        masses = np.array([spec.dist.coeffs[int(d)] for d in degrees])
        tables.append((degrees, np.cumsum(masses)))
    return tables


def _sample_frame_arrays(cfg: ScenarioConfig, rng: np.random.Generator, tables=None):
    """Draw one frame: per-burst classes, degrees, and distinct slot choices."""
    if tables is None:
        tables = _degree_tables(cfg)
    class_ids = np.concatenate(
        [np.full(spec.count, k, dtype=np.int32) for k, spec in enumerate(cfg.classes)]
    ) if cfg.total_sources else np.empty(0, dtype=np.int32)
    degrees = np.empty(cfg.total_sources, dtype=np.int64)
    pos = 0
    for (support, cdf), spec in zip(tables, cfg.classes):
        u = rng.random(spec.count)
        degrees[pos : pos + spec.count] = support[np.searchsorted(cdf, u)]
        pos += spec.count
    offsets = np.zeros(cfg.total_sources + 1, dtype=np.int64)
    np.cumsum(degrees, out=offsets[1:])
    uniforms = rng.random(int(offsets[-1]))
    slots = kernels.choose_slots(offsets, uniforms, cfg.n_slots)
    return class_ids, offsets, slots


def generate_frame(cfg: ScenarioConfig, rng: np.random.Generator) -> FrameGraph:
    """Realize one random MAC frame under the scenario's class strategies."""
    class_ids, offsets, slots = _sample_frame_arrays(cfg, rng)
    return FrameGraph(
        n_slots=cfg.n_slots, burst_class=class_ids, offsets=offsets, slots=slots
    )


def sic_peel(graph: FrameGraph, max_iters: int) -> DecodeResult:
    """Run the synchronous-sweep SIC peeling decoder on one frame."""
    decoded, iters = kernels.peel(
        np.ascontiguousarray(graph.offsets, dtype=np.int64),
        np.ascontiguousarray(graph.slots, dtype=np.int32),
        graph.n_slots,
        max_iters,
    )
    n_classes = int(graph.burst_class.max()) + 1 if graph.num_bursts else 0
    recovered = np.bincount(
        graph.burst_class[decoded], minlength=n_classes
    ) if graph.num_bursts else np.zeros(0, dtype=np.int64)
    return DecodeResult(
        decoded=decoded,
        per_class_recovered=[int(r) for r in recovered],
        iterations_used=iters,
    )


def _run_trial(cfg: ScenarioConfig, base_seed: int, trial: int, tables):
    rng = np.random.default_rng(np.random.SeedSequence([base_seed, trial]))
    class_ids, offsets, slots = _sample_frame_arrays(cfg, rng, tables)
    decoded, _ = kernels.peel(offsets, slots, cfg.n_slots, cfg.max_iters)
    return np.bincount(class_ids[decoded], minlength=cfg.num_classes)


def monte_carlo(
    cfg: ScenarioConfig,
    trials: int,
    base_seed: int,
    utility=None,
    threads: int = 1,
) -> MonteCarloReport:
    """Aggregate per-class error rates, throughput, and utility over trials.

    ``utility`` must expose ``system_utility(recovered_counts)``; when None,
    per-trial utility is reported as 0.  Results are independent of
    ``threads``: each trial is seeded on its own and reduced in trial order.
    """
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    tables = _degree_tables(cfg)
    recovered = [None] * trials

    def worker(t: int):
        recovered[t] = _run_trial(cfg, base_seed, t, tables)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(worker, range(trials)))
    else:
        for t in range(trials):
            worker(t)

    counts = [spec.count for spec in cfg.classes]
    pe = []
    for k, count in enumerate(counts):
        if count == 0:
            pe.append(0.0)
            continue
        undecoded = math.fsum(count - int(r[k]) for r in recovered)
        pe.append(undecoded / (count * trials))
    g = cfg.traffic
    throughput = [g * (1.0 - p) for p in pe]
    if utility is not None:
        values = [utility.system_utility(r) for r in recovered]
        mean = math.fsum(values) / trials
        if trials > 1:
            var = math.fsum((v - mean) ** 2 for v in values) / (trials - 1)
            ci95 = 1.96 * math.sqrt(var / trials)
        else:
            ci95 = 0.0
    else:
        mean, ci95 = 0.0, 0.0
    return MonteCarloReport(
        trials=trials,
        per_class_pe=pe,
        per_class_throughput=throughput,
        utility_mean=mean,
        utility_ci95=ci95,
        seed=base_seed,
    )
