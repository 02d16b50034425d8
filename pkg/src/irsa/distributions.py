"""Node- and edge-perspective degree distributions for IRSA transmission strategies.

A transmission strategy for a source class is a probability polynomial
``L(x) = sum_l L_l x^l`` over replica counts ``l >= 1``.  The edge-perspective
form ``lambda(x) = L'(x) / L'(1)`` gives the degree distribution seen from a
uniformly random edge of the frame graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DomainError,
    NegativeCoefficientError,
    NormalizationError,
    ZeroDegreeError,
)

NORMALIZATION_TOL = 1e-9
DOMINANCE_TOL = 1e-12


@dataclass(frozen=True)
class DegreeDistribution:
    """Sparse probability polynomial over replica counts (node perspective)."""

    coeffs: dict[int, float]
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "coeffs", dict(self.coeffs))
        validate(self)

    @property
    def min_degree(self) -> int:
        return min(self.coeffs)

    @property
    def max_degree(self) -> int:
        return max(self.coeffs)

    def __call__(self, x: float) -> float:
        return evaluate(self, x)


@dataclass(frozen=True)
class EdgePerspective:
    """Edge-perspective degree distribution derived from a node-perspective one."""

    coeffs: dict[int, float]
    derived_from: DegreeDistribution

    def __call__(self, z: float) -> float:
        return eval_edge(self, z)


def validate(d: DegreeDistribution) -> DegreeDistribution:
    """Check the distribution invariants and return ``d`` unchanged."""
    if not d.coeffs:
        raise NormalizationError("empty coefficient map")
    for degree, mass in d.coeffs.items():
        if degree == 0:
            raise ZeroDegreeError("degree 0 is forbidden: a source sends >= 1 replica")
        if degree < 0 or int(degree) != degree:
            raise DomainError(f"degree must be a positive integer, got {degree!r}")
        if mass < 0:
            raise NegativeCoefficientError(f"coefficient for degree {degree} is {mass}")
    total = math.fsum(d.coeffs.values())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise NormalizationError(f"coefficients sum to {total!r}, expected 1")
    return d


def evaluate(d: DegreeDistribution, x: float) -> float:
    """Evaluate the node-perspective polynomial ``sum_l L_l x^l``."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x={x} outside [0, 1]")
    return math.fsum(mass * x**degree for degree, mass in d.coeffs.items())


def mean_degree(d: DegreeDistribution) -> float:
    """Average replica count ``L'(1) = sum_l l * L_l``."""
    return math.fsum(degree * mass for degree, mass in d.coeffs.items())


def to_edge_perspective(d: DegreeDistribution) -> EdgePerspective:
    """Edge-perspective coefficients ``lambda_l = l * L_l / L'(1)``."""
    mean = mean_degree(d)
    coeffs = {degree: degree * mass / mean for degree, mass in d.coeffs.items()}
    return EdgePerspective(coeffs=coeffs, derived_from=d)


def eval_edge(e: EdgePerspective, z: float) -> float:
    """Evaluate ``lambda(z) = sum_l lambda_l z^(l-1)``."""
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"z={z} outside [0, 1]")
    return math.fsum(mass * z ** (degree - 1) for degree, mass in e.coeffs.items())


def edge_derivative_at_zero(e: EdgePerspective) -> float:
    """Slope ``lambda'(0)``, i.e. the coefficient of ``z`` in lambda(z)."""
    return e.coeffs.get(2, 0.0)


def dominates(
    low: DegreeDistribution, high: DegreeDistribution, grid_step: float = 1e-3
) -> bool:
    """True iff ``low(x) <= high(x)`` on a dense grid over [0, 1].

    ``low`` is the higher-priority class's polynomial; the pointwise ordering
    makes its per-class error probability the smaller one.
    """
    if not 0.0 < grid_step <= 0.01:
        raise DomainError(f"grid_step={grid_step} outside (0, 0.01]")
    n = round(1.0 / grid_step)
    for i in range(n + 1):
        x = min(i * grid_step, 1.0)
        if evaluate(low, x) > evaluate(high, x) + DOMINANCE_TOL:
            return False
    return True


@dataclass(frozen=True)
class DistributionCatalog:
    """Named collection of validated degree distributions."""

    entries: dict[str, DegreeDistribution]

    def __post_init__(self):
        for name, dist in self.entries.items():
            validate(dist)
            if dist.label is not None and dist.label != name:
                raise DomainError(f"entry {name!r} carries mismatched label {dist.label!r}")

    def get(self, name: str) -> DegreeDistribution:
        return self.entries[name]

    def names(self) -> list[str]:
        return list(self.entries)

    def __iter__(self):
        return iter(self.entries.items())


# Stock strategies (labels "a".."f"), ordered by catalog index.
CATALOG = DistributionCatalog(
    entries={
        "a": DegreeDistribution({2: 0.5102, 4: 0.4898}, label="a"),
        "b": DegreeDistribution({2: 0.5631, 3: 0.0436, 5: 0.3933}, label="b"),
        "c": DegreeDistribution({2: 0.5465, 3: 0.1623, 6: 0.2912}, label="c"),
        "d": DegreeDistribution({2: 0.5, 3: 0.28, 8: 0.22}, label="d"),
        "e": DegreeDistribution(
            {3: 0.08, 4: 0.14, 5: 0.3, 6: 0.17, 7: 0.14, 9: 0.17}, label="e"
        ),
        "f": DegreeDistribution(
            {
                2: 0.4977,
                3: 0.2207,
                4: 0.0381,
                5: 0.0756,
                6: 0.0398,
                7: 0.0009,
                8: 0.0088,
                9: 0.0068,
                11: 0.0030,
                14: 0.0429,
                15: 0.0081,
                16: 0.0576,
            },
            label="f",
        ),
    }
)
