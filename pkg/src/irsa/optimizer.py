"""Selection of per-class transmission strategies (distribution, source count).

Implements the two-step stability-region optimization, its safe-boundary
heuristic variant, and an exhaustive simulation oracle for small candidate
spaces.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from scipy.stats import binom

from . import analysis, distributions as dd, simulator
from .analysis import ScenarioConfig, ClassSpec
from .distributions import DegreeDistribution
from .errors import (
    ConfigError,
    DomainError,
    InfeasibleError,
    PriorityViolationError,
)

WEIGHT_TOL = 1e-9


def log_or_zero(r: int) -> float:
    """Default per-class utility: natural log of the received count, 0 at 0."""
    return math.log(r) if r > 0 else 0.0


@dataclass(frozen=True)
class UtilityModel:
    """Per-class nondecreasing utility functions with priority weights."""

    funcs: tuple
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.funcs) != len(self.weights):
            raise ConfigError("one utility function per class is required")
        if abs(math.fsum(self.weights) - 1.0) > WEIGHT_TOL:
            raise ConfigError("utility weights must sum to 1")

    @classmethod
    def log_utility(cls, weights) -> "UtilityModel":
        weights = tuple(weights)
        return cls(funcs=tuple(log_or_zero for _ in weights), weights=weights)

    def class_utility(self, k: int, received: int) -> float:
        return self.funcs[k](received)

    def system_utility(self, received_counts) -> float:
        return math.fsum(
            w * f(int(r)) for w, f, r in zip(self.weights, self.funcs, received_counts)
        )

    def full_rate_utility(self, counts) -> float:
        """Utility when every message is received (the stability-region objective)."""
        return self.system_utility(counts)


@dataclass(frozen=True)
class CandidateSpace:
    """Search space: allowed distributions and count ranges per class."""

    dists: tuple[tuple[DegreeDistribution, ...], ...]
    count_ranges: tuple[range, ...]
    n_slots: int
    max_iters: int = 100
    dominance_grid_step: float = 1e-3

    def __post_init__(self):
        if len(self.dists) != len(self.count_ranges):
            raise ConfigError("dists and count_ranges must cover the same classes")
        if not all(self.dists):
            raise ConfigError("every class needs at least one candidate distribution")
        for r in self.count_ranges:
            if len(r) == 0:
                raise ConfigError(f"empty count range {r}")
            if r.step < 1 or r.start < 0:
                raise ConfigError(f"invalid count range {r}")

    @property
    def num_classes(self) -> int:
        return len(self.dists)


@dataclass(frozen=True)
class OnRegion:
    """Boundary of the set of count vectors admitted by a stability criterion."""

    dists: tuple[DegreeDistribution, ...]
    boundary: tuple[tuple[int, ...], ...]
    mode: str  # "theoretical" | "safe" | "simulated"


@dataclass(frozen=True)
class OptimizationResult:
    dists: tuple[DegreeDistribution, ...]
    counts: tuple[int, ...]
    utility: float
    method: str
    diagnostics: dict = field(default_factory=dict)


def expected_utility(cfg: ScenarioConfig, pe, utility: UtilityModel) -> float:
    """Expected system utility given per-class message error probabilities.

    Each class contributes independently with R_k ~ Binomial(L_k, 1 - pe_k),
    so the joint expectation separates into per-class binomial expectations.
    """
    total = 0.0
    for k, spec in enumerate(cfg.classes):
        p = pe[k]
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"pe[{k}]={p} outside [0, 1]")
        values = [utility.class_utility(k, r) for r in range(spec.count + 1)]
        pmf = binom.pmf(range(spec.count + 1), spec.count, 1.0 - p)
        total += utility.weights[k] * float(
            math.fsum(v * q for v, q in zip(values, pmf))
        )
    return total


def check_priority(dists, grid_step: float = 1e-3) -> None:
    """Raise unless the assignment satisfies the pointwise dominance chain."""
    for k in range(len(dists) - 1):
        if not dd.dominates(dists[k], dists[k + 1], grid_step):
            raise PriorityViolationError(
                f"class {k} distribution does not dominate class {k + 1}"
            )


def _assignment_feasible(dists, grid_step: float) -> bool:
    return all(
        dd.dominates(dists[k], dists[k + 1], grid_step) for k in range(len(dists) - 1)
    )


def _max_stable_last(prefix, last_range, stable) -> int | None:
    """Largest value in ``last_range`` keeping ``prefix + (value,)`` stable.

    ``stable`` must be monotone: once unstable, larger counts stay unstable.
    Returns None when even the smallest value fails.
    """
    values = list(last_range)
    if not stable(prefix + (values[0],)):
        return None
    lo, hi = 0, len(values) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if stable(prefix + (values[mid],)):
            lo = mid
        else:
            hi = mid - 1
    return values[lo]


def _sweep_boundary(space: CandidateSpace, stable) -> tuple[tuple[int, ...], ...]:
    """Grid-sweep the first K-1 counts, binary-search the last one."""
    prefix_ranges = space.count_ranges[:-1]
    last_range = space.count_ranges[-1]
    boundary = []
    for prefix in itertools.product(*prefix_ranges):
        best_last = _max_stable_last(prefix, last_range, stable)
        if best_last is not None:
            boundary.append(prefix + (best_last,))
    return tuple(boundary)


def on_region_theoretical(space: CandidateSpace, dists) -> OnRegion:
    """Boundary of the stability (density-evolution) admissible region."""
    dists = tuple(dists)
    check_priority(dists, space.dominance_grid_step)

    def stable(counts) -> bool:
        return analysis._stability_loads(counts, dists, space.n_slots).stable

    return OnRegion(
        dists=dists, boundary=_sweep_boundary(space, stable), mode="theoretical"
    )


def on_region_simulated(
    space: CandidateSpace,
    dists,
    trials: int,
    seed: int,
    pe_max: float = 1e-4,
    threads: int = 1,
) -> OnRegion:
    """Boundary of the empirically admissible region (post-SIC error < pe_max)."""
    dists = tuple(dists)
    check_priority(dists, space.dominance_grid_step)
    k = len(dists)
    weights = [1.0 / k] * k  # weights do not affect error rates

    def ok(counts) -> bool:
        if sum(counts) == 0:
            return True
        cfg = ScenarioConfig(
            n_slots=space.n_slots,
            classes=tuple(
                ClassSpec(count=c, weight=w, dist=d)
                for c, w, d in zip(counts, weights, dists)
            ),
            max_iters=space.max_iters,
        )
        report = simulator.monte_carlo(cfg, trials, seed, threads=threads)
        return max(report.per_class_pe) < pe_max

    return OnRegion(
        dists=dists, boundary=_sweep_boundary(space, ok), mode="simulated"
    )


def safe_boundary(region: OnRegion, shrink: float = 0.10) -> OnRegion:
    """Shrink every boundary count vector componentwise by ``shrink``."""
    if region.mode != "theoretical":
        raise ConfigError(f"safe boundary expects a theoretical region, got {region.mode}")
    if not 0.0 <= shrink < 0.5:
        raise DomainError(f"shrink={shrink} outside [0, 0.5)")
    scaled = tuple(
        tuple(int(math.floor(c * (1.0 - shrink))) for c in point)
        for point in region.boundary
    )
    return OnRegion(dists=region.dists, boundary=scaled, mode="safe")


def _dist_order(space: CandidateSpace, dists) -> tuple[int, ...]:
    """Position of each chosen distribution within its class's candidate list."""
    return tuple(space.dists[k].index(d) for k, d in enumerate(dists))


def _better(candidate, incumbent) -> bool:
    """Deterministic ordering: utility, then larger counts, then lower dist index."""
    if incumbent is None:
        return True
    u_c, counts_c, order_c = candidate
    u_i, counts_i, order_i = incumbent
    if u_c != u_i:
        return u_c > u_i
    if counts_c != counts_i:
        return counts_c > counts_i
    return order_c < order_i


def _feasible_assignments(space: CandidateSpace):
    found = False
    for dists in itertools.product(*space.dists):
        if _assignment_feasible(dists, space.dominance_grid_step):
            found = True
            yield dists
    if not found:
        raise InfeasibleError("no distribution assignment satisfies the priority chain")


def _optimize_over_boundaries(space, utility, method, region_for) -> OptimizationResult:
    best = None
    best_result = None
    for dists in _feasible_assignments(space):
        region = region_for(dists)
        order = _dist_order(space, dists)
        for point in region.boundary:
            value = utility.full_rate_utility(point)
            key = (value, point, order)
            if _better(key, best):
                best = key
                best_result = OptimizationResult(
                    dists=dists,
                    counts=point,
                    utility=value,
                    method=method,
                    diagnostics={"mode": region.mode},
                )
    if best_result is None:
        raise InfeasibleError("no stable candidate point in the search space")
    return best_result


def algorithm1(space: CandidateSpace, utility: UtilityModel) -> OptimizationResult:
    """Maximize the full-rate utility over the theoretical stability boundary."""
    return _optimize_over_boundaries(
        space, utility, "alg1", lambda d: on_region_theoretical(space, d)
    )


def algorithm2(
    space: CandidateSpace, utility: UtilityModel, shrink: float = 0.10
) -> OptimizationResult:
    """Maximize the full-rate utility over the safe (10%-shrunk) boundary."""
    return _optimize_over_boundaries(
        space,
        utility,
        "alg2",
        lambda d: safe_boundary(on_region_theoretical(space, d), shrink),
    )


def exhaustive_oracle(
    space: CandidateSpace,
    utility: UtilityModel,
    trials: int,
    seed: int,
    threads: int = 1,
) -> OptimizationResult:
    """Simulate every priority-feasible candidate and return the best by mean utility."""
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    best = None
    best_result = None
    for dists in _feasible_assignments(space):
        order = _dist_order(space, dists)
        for counts in itertools.product(*space.count_ranges):
            if sum(counts) == 0:
                value = utility.system_utility(counts)
            else:
                cfg = ScenarioConfig(
                    n_slots=space.n_slots,
                    classes=tuple(
                        ClassSpec(count=c, weight=w, dist=d)
                        for c, w, d in zip(counts, utility.weights, dists)
                    ),
                    max_iters=space.max_iters,
                )
                report = simulator.monte_carlo(
                    cfg, trials, seed, utility=utility, threads=threads
                )
                value = report.utility_mean
            key = (value, counts, order)
            if _better(key, best):
                best = key
                best_result = OptimizationResult(
                    dists=dists,
                    counts=counts,
                    utility=value,
                    method="exhaustive",
                    diagnostics={"trials": trials, "seed": seed},
                )
    return best_result
