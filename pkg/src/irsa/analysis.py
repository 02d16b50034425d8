"""Asymptotic analysis of prioritized IRSA: slot-degree statistics, density
evolution, global stability, and traffic thresholds.

All routines are pure functions of their inputs.  Counts are held as integers
in :class:`ScenarioConfig`; the threshold search relaxes them to reals while
keeping the per-class ratios fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import distributions as dd
from .distributions import DegreeDistribution
from .errors import (
    BracketError,
    ConfigError,
    DomainError,
    EmptySystemError,
    NumericInstabilityError,
)

WEIGHT_TOL = 1e-9
EXACT_IMAG_TOL = 1e-9
EXACT_MODE_MAX_SOURCES = 500


@dataclass(frozen=True)
class ClassSpec:
    """One priority class: source count, utility weight, transmission strategy."""

    count: int
    weight: float
    dist: DegreeDistribution

    def __post_init__(self):
        if self.count < 0 or int(self.count) != self.count:
            raise ConfigError(f"class count must be a nonnegative integer, got {self.count}")
        if not 0.0 <= self.weight <= 1.0:
            raise ConfigError(f"class weight {self.weight} outside [0, 1]")
        dd.validate(self.dist)


@dataclass(frozen=True)
class ScenarioConfig:
    """A MAC-frame scenario: N slots, prioritized classes, decoder iteration cap.

    Classes are ordered from the most important (index 0) to the least.
    """

    n_slots: int
    classes: tuple[ClassSpec, ...]
    max_iters: int = 100

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        if self.n_slots < 1:
            raise ConfigError(f"n_slots must be >= 1, got {self.n_slots}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.classes:
            raise ConfigError("at least one class is required")
        total_w = math.fsum(c.weight for c in self.classes)
        if abs(total_w - 1.0) > WEIGHT_TOL:
            raise ConfigError(f"class weights sum to {total_w}, expected 1")
        for c in self.classes:
            if c.dist.max_degree > self.n_slots:
                raise ConfigError(
                    f"max degree {c.dist.max_degree} exceeds n_slots={self.n_slots}"
                )

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @property
    def total_sources(self) -> int:
        return sum(c.count for c in self.classes)

    @property
    def traffic(self) -> float:
        """Network load G = M / N."""
        return self.total_sources / self.n_slots


@dataclass(frozen=True)
class SlotDegreeModel:
    """Slot-node degree statistics: node perspective, edge perspective, load."""

    omega: dict[int, float]
    rho_edge: dict[int, float]
    mode: str  # "exact" | "poisson"
    chi: float


@dataclass(frozen=True)
class DensityEvolutionOutcome:
    """Trajectories and final per-class error probabilities of the recursion."""

    y: list[list[float]]  # y[k][i], per-class edge failure probability
    z: list[float]  # z[i], slot-side failure probability
    pe: list[float]  # final per-class message error probability
    iterations_run: int
    converged: bool


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    min_margin: float
    argmin_z: float


@dataclass(frozen=True)
class ThresholdResult:
    g_star: float
    ratios: list[float]
    tolerance: float


def replica_slot_prob(spec: ClassSpec, n_slots: int) -> float:
    """Probability p_k that one class-k source sends a replica in a given slot."""
    if n_slots < spec.dist.max_degree:
        raise DomainError(
            f"n_slots={n_slots} smaller than max degree {spec.dist.max_degree}"
        )
    p = dd.mean_degree(spec.dist) / n_slots
    if p > 1.0:
        raise DomainError(f"replica probability {p} exceeds 1")
    return p


def _rho_from_omega(omega: np.ndarray) -> dict[int, float]:
    """Edge-perspective slot degrees rho_l = l * Omega_l / sum_j j * Omega_j."""
    degrees = np.arange(len(omega))
    weighted = degrees * omega
    total = weighted.sum()
    if total <= 0:
        return {}
    return {int(l): float(weighted[l] / total) for l in range(1, len(omega)) if omega[l] > 0}


def slot_distribution_exact(cfg: ScenarioConfig) -> SlotDegreeModel:
    """Exact slot-node degree distribution via the Poisson-binomial DFT form.

    The slot occupancy count is a Poisson-binomial sum of M independent
    Bernoulli trials with per-class success probabilities p_k.  The pmf is
    recovered by inverting the characteristic function sampled at the
    (M+1)-th roots of unity, which numpy's FFT performs directly.
    """
    m_total = cfg.total_sources
    if m_total < 1:
        raise EmptySystemError("exact slot distribution requires at least one source")
    probs = [replica_slot_prob(c, cfg.n_slots) for c in cfg.classes]
    j = np.arange(m_total + 1)
    root = np.exp(2j * np.pi * j / (m_total + 1))
    samples = np.ones(m_total + 1, dtype=complex)
    for p, spec in zip(probs, cfg.classes):
        samples *= (1.0 + (root - 1.0) * p) ** spec.count
    omega_c = np.fft.fft(samples) / (m_total + 1)
    imag_residue = float(np.abs(omega_c.imag).max())
    if imag_residue > EXACT_IMAG_TOL:
        raise NumericInstabilityError(
            f"imaginary residue {imag_residue:.3e} exceeds {EXACT_IMAG_TOL}; "
            "M is too large for exact mode, use the poisson model"
        )
    omega = np.clip(omega_c.real, 0.0, None)
    chi = math.fsum(spec.count * p for spec, p in zip(cfg.classes, probs))
    return SlotDegreeModel(
        omega={int(l): float(omega[l]) for l in range(m_total + 1)},
        rho_edge=_rho_from_omega(omega),
        mode="exact",
        chi=chi,
    )


def slot_distribution_poisson(cfg: ScenarioConfig) -> SlotDegreeModel:
    """Poisson approximation of the slot-node degree distribution.

    Intended for large M with small per-slot probabilities; the pmf is
    truncated at l = M and renormalized.
    """
    m_total = cfg.total_sources
    chi = math.fsum(
        spec.count * replica_slot_prob(spec, cfg.n_slots) for spec in cfg.classes
    )
    if chi == 0.0 or m_total == 0:
        return SlotDegreeModel(omega={0: 1.0}, rho_edge={}, mode="poisson", chi=chi)
    degrees = np.arange(m_total + 1)
    log_pmf = degrees * math.log(chi) - chi - np.array(
        [math.lgamma(l + 1) for l in degrees]
    )
    omega = np.exp(log_pmf)
    omega /= omega.sum()
    return SlotDegreeModel(
        omega={int(l): float(omega[l]) for l in range(m_total + 1)},
        rho_edge=_rho_from_omega(omega),
        mode="poisson",
        chi=chi,
    )


def slot_distribution(cfg: ScenarioConfig, mode: str = "auto") -> SlotDegreeModel:
    """Slot-degree model with automatic exact-to-poisson degradation."""
    if mode == "exact":
        return slot_distribution_exact(cfg)
    if mode == "poisson":
        return slot_distribution_poisson(cfg)
    if mode != "auto":
        raise ConfigError(f"unknown slot distribution mode {mode!r}")
    if cfg.total_sources > EXACT_MODE_MAX_SOURCES:
        return slot_distribution_poisson(cfg)
    try:
        return slot_distribution_exact(cfg)
    except NumericInstabilityError:
        return slot_distribution_poisson(cfg)


def _edge_load(loads, dists, n_slots: int) -> float:
    """Average slot-node degree sum_k L_k * mean_degree_k / N."""
    return math.fsum(
        load * dd.mean_degree(dist) / n_slots for load, dist in zip(loads, dists)
    )


def rho_asymptotic(cfg: ScenarioConfig, x: float) -> float:
    """Large-frame slot edge-perspective distribution exp(-c (1-x))."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x={x} outside [0, 1]")
    c = _edge_load([s.count for s in cfg.classes], [s.dist for s in cfg.classes], cfg.n_slots)
    return math.exp(-c * (1.0 - x))


def _edge_fractions(loads, dists) -> list[float]:
    weights = [load * dd.mean_degree(dist) for load, dist in zip(loads, dists)]
    total = math.fsum(weights)
    if total <= 0:
        raise EmptySystemError("no edges: all classes are empty")
    return [w / total for w in weights]


def class_edge_fraction(cfg: ScenarioConfig, k: int) -> float:
    """Fraction q_k of frame-graph edges incident to class-k burst nodes."""
    return _edge_fractions(
        [s.count for s in cfg.classes], [s.dist for s in cfg.classes]
    )[k]


def density_evolution(cfg: ScenarioConfig, eps: float = 1e-12) -> DensityEvolutionOutcome:
    """Iterate the per-class edge-failure recursion up to the decoder cap.

    Starting from y_0 = 1 for every class, alternates
    ``z = 1 - exp(-c * sum_k q_k y_k)`` and ``y_k = lambda_k(z)`` where
    ``c`` is the average slot degree; stops early once the largest per-class
    change drops below ``eps``.  The final message error probability per class
    is the node polynomial evaluated at the terminal y.
    """
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    loads = [s.count for s in cfg.classes]
    dists = [s.dist for s in cfg.classes]
    return _density_evolution_loads(loads, dists, cfg.n_slots, cfg.max_iters, eps)


def _density_evolution_loads(loads, dists, n_slots, max_iters, eps=1e-12):
    k_classes = len(dists)
    edges = [dd.to_edge_perspective(d) for d in dists]
    c = _edge_load(loads, dists, n_slots)
    if c > 0:
        q = _edge_fractions(loads, dists)
    else:
        q = [0.0] * k_classes
    y = [1.0] * k_classes
    y_hist = [[1.0] for _ in range(k_classes)]
    z_hist: list[float] = []
    converged = False
    iterations = 0
    for _ in range(max_iters):
        z = 1.0 - math.exp(-c * math.fsum(qk * yk for qk, yk in zip(q, y)))
        y_new = [dd.eval_edge(e, z) for e in edges]
        for yk, yk_new in zip(y, y_new):
            assert -1e-15 <= yk_new <= yk + 1e-15, "recursion left [0, 1] or increased"
        z_hist.append(z)
        iterations += 1
        delta = max(abs(a - b) for a, b in zip(y, y_new))
        y = y_new
        for k in range(k_classes):
            y_hist[k].append(y[k])
        if delta < eps:
            converged = True
            break
    pe = [dd.evaluate(d, yk) for d, yk in zip(dists, y)]
    return DensityEvolutionOutcome(
        y=y_hist, z=z_hist, pe=pe, iterations_run=iterations, converged=converged
    )


def stability_margin(cfg: ScenarioConfig, grid_step: float = 1e-3) -> StabilityReport:
    """Evaluate the global-stability margin z - f(z) on a grid over (0, 1].

    The decoder converges to zero error probability from any start iff
    ``f(z) = 1 - exp(-c sum_k q_k lambda_k(z))`` stays strictly below z.  The
    z -> 0+ limit is additionally checked through the slope of f at the
    origin, which the finite grid cannot resolve.
    """
    loads = [s.count for s in cfg.classes]
    dists = [s.dist for s in cfg.classes]
    return _stability_loads(loads, dists, cfg.n_slots, grid_step)


def _stability_loads(loads, dists, n_slots, grid_step: float = 1e-3) -> StabilityReport:
    if not 0.0 < grid_step <= 0.01:
        raise DomainError(f"grid_step={grid_step} outside (0, 0.01]")
    edges = [dd.to_edge_perspective(d) for d in dists]
    c = _edge_load(loads, dists, n_slots)
    if c <= 0:
        return StabilityReport(stable=True, min_margin=1.0, argmin_z=1.0)
    q = _edge_fractions(loads, dists)

    def f(z: float) -> float:
        return 1.0 - math.exp(
            -c * math.fsum(qk * dd.eval_edge(e, z) for qk, e in zip(q, edges))
        )

    n = round(1.0 / grid_step)
    min_margin = math.inf
    argmin_z = grid_step
    for i in range(1, n + 1):
        z = min(i * grid_step, 1.0)
        margin = z - f(z)
        if margin < min_margin:
            min_margin = margin
            argmin_z = z
    # Origin check: degree-1 mass lifts f(0) above 0; otherwise the slope of
    # f at 0 must not exceed 1 for z - f(z) to stay positive near the origin.
    intercept = math.fsum(qk * e.coeffs.get(1, 0.0) for qk, e in zip(q, edges))
    slope_at_zero = c * math.fsum(
        qk * dd.edge_derivative_at_zero(e) for qk, e in zip(q, edges)
    )
    origin_ok = intercept == 0.0 and slope_at_zero <= 1.0
    return StabilityReport(
        stable=min_margin > 0.0 and origin_ok,
        min_margin=min_margin,
        argmin_z=argmin_z,
    )


def threshold_bisection(
    base: ScenarioConfig,
    tol: float = 1e-3,
    grid_step: float = 1e-3,
    g_low: float = 0.01,
    g_high: float = 1.0,
) -> ThresholdResult:
    """Bisect on the traffic G for the critical load of the given class mix.

    Per-class ratios alpha_k = L_k / M and the distributions stay fixed while
    all counts are scaled continuously; the returned G* brackets the stable /
    unstable transition to within ``tol``.
    """
    if tol <= 0:
        raise DomainError(f"tol must be positive, got {tol}")
    m_total = base.total_sources
    if m_total == 0:
        raise EmptySystemError("threshold search requires a nonempty class mix")
    ratios = [s.count / m_total for s in base.classes]
    dists = [s.dist for s in base.classes]
    n = base.n_slots

    def stable_at(g: float) -> bool:
        loads = [r * g * n for r in ratios]
        return _stability_loads(loads, dists, n, grid_step).stable

    if not stable_at(g_low):
        raise BracketError(f"traffic G={g_low} is already unstable for this mix")
    if stable_at(g_high):
        raise BracketError(f"traffic G={g_high} is still stable for this mix")
    lo, hi = g_low, g_high
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if stable_at(mid):
            lo = mid
        else:
            hi = mid
    return ThresholdResult(g_star=0.5 * (lo + hi), ratios=ratios, tolerance=tol)


def scaled_counts(base: ScenarioConfig, traffic: float) -> list[int]:
    """Integer per-class counts for the base ratios at the given traffic."""
    m_total = base.total_sources
    if m_total == 0:
        raise EmptySystemError("cannot scale an empty class mix")
    return [
        int(round(s.count / m_total * traffic * base.n_slots)) for s in base.classes
    ]


def with_counts(base: ScenarioConfig, counts) -> ScenarioConfig:
    """Copy of ``base`` with the per-class counts replaced."""
    classes = tuple(
        ClassSpec(count=int(c), weight=s.weight, dist=s.dist)
        for c, s in zip(counts, base.classes)
    )
    return ScenarioConfig(n_slots=base.n_slots, classes=classes, max_iters=base.max_iters)
