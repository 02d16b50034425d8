"""Prioritized IRSA analysis, simulation, and transmission-strategy optimization."""

__version__ = "0.1.0"

from .distributions import CATALOG, DegreeDistribution, EdgePerspective  # noqa: F401
from .analysis import ClassSpec, ScenarioConfig  # noqa: F401
