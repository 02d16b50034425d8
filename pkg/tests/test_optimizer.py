"""Unit tests for utility models, admissible-region boundaries, and the
strategy-selection algorithms."""

import math

import pytest

from irsa import optimizer
from irsa.analysis import ClassSpec, ScenarioConfig
from irsa.distributions import CATALOG, DegreeDistribution
from irsa.errors import (
    ConfigError,
    DomainError,
    InfeasibleError,
    PriorityViolationError,
)
from irsa.optimizer import CandidateSpace, OnRegion, UtilityModel

X2 = DegreeDistribution({2: 1.0})
E, A, B = CATALOG.get("e"), CATALOG.get("a"), CATALOG.get("b")


def space_for(dists, ranges, n_slots=200):
    return CandidateSpace(dists=dists, count_ranges=ranges, n_slots=n_slots)


class TestUtilityModel:
    def test_log_utility_values(self):
        u = UtilityModel.log_utility([0.7, 0.3])
        assert u.system_utility([10, 1]) == pytest.approx(0.7 * math.log(10))
        assert u.system_utility([0, 0]) == 0.0
        assert u.full_rate_utility([5, 5]) == pytest.approx(math.log(5))

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ConfigError):
            UtilityModel.log_utility([0.7, 0.7])

    def test_funcs_weights_length_mismatch(self):
        with pytest.raises(ConfigError):
            UtilityModel(funcs=(math.sqrt,), weights=(0.5, 0.5))

    def test_log_or_zero(self):
        assert optimizer.log_or_zero(0) == 0.0
        assert optimizer.log_or_zero(1) == 0.0
        assert optimizer.log_or_zero(7) == pytest.approx(math.log(7))


class TestExpectedUtility:
    def test_certain_outcomes(self):
        cfg = ScenarioConfig(200, (ClassSpec(10, 1.0, X2),))
        u = UtilityModel.log_utility([1.0])
        assert optimizer.expected_utility(cfg, [0.0], u) == pytest.approx(math.log(10))
        assert optimizer.expected_utility(cfg, [1.0], u) == pytest.approx(0.0)

    def test_two_source_hand_value(self):
        # One class of two sources, each lost with probability 1/2:
        # E[u] = 1/4 * log 2 (log 1 and log-at-zero both vanish).
        cfg = ScenarioConfig(200, (ClassSpec(2, 1.0, X2),))
        u = UtilityModel.log_utility([1.0])
        assert optimizer.expected_utility(cfg, [0.5], u) == pytest.approx(
            0.25 * math.log(2)
        )

    def test_pe_validated(self):
        cfg = ScenarioConfig(200, (ClassSpec(2, 1.0, X2),))
        u = UtilityModel.log_utility([1.0])
        with pytest.raises(DomainError):
            optimizer.expected_utility(cfg, [1.5], u)

    def test_monotone_in_reliability(self):
        cfg = ScenarioConfig(200, (ClassSpec(9, 0.6, E), ClassSpec(9, 0.4, A)))
        u = UtilityModel.log_utility([0.6, 0.4])
        values = [
            optimizer.expected_utility(cfg, [p, p], u) for p in (0.0, 0.2, 0.5, 0.9)
        ]
        assert values == sorted(values, reverse=True)


class TestPriority:
    def test_check_priority_accepts_ordered(self):
        optimizer.check_priority((E, B, B))
        optimizer.check_priority((E, A))

    def test_check_priority_rejects_reversed(self):
        with pytest.raises(PriorityViolationError):
            optimizer.check_priority((A, E))

    def test_infeasible_space(self):
        space = space_for(((A,), (E,)), (range(0, 11), range(0, 11)))
        u = UtilityModel.log_utility([0.7, 0.3])
        with pytest.raises(InfeasibleError):
            optimizer.algorithm1(space, u)


class TestCandidateSpace:
    def test_shape_mismatch(self):
        with pytest.raises(ConfigError):
            space_for(((E,),), (range(0, 5), range(0, 5)))

    def test_empty_range_rejected(self):
        with pytest.raises(ConfigError):
            space_for(((E,),), (range(5, 5),))

    def test_empty_dist_group_rejected(self):
        with pytest.raises(ConfigError):
            space_for(((),), (range(0, 5),))


class TestRegions:
    def test_two_replica_theoretical_boundary(self):
        # Single two-replica class: admissible iff load <= N/2.
        space = space_for(((X2,),), (range(0, 201),))
        region = optimizer.on_region_theoretical(space, (X2,))
        assert region.mode == "theoretical"
        assert region.boundary == ((100,),)

    def test_boundary_points_maximal(self):
        space = space_for(((E,), (A,)), (range(0, 161, 40), range(0, 201)))
        region = optimizer.on_region_theoretical(space, (E, A))
        from irsa.analysis import _stability_loads

        for l1, l2 in region.boundary:
            assert _stability_loads((l1, l2), (E, A), 200).stable
            assert not _stability_loads((l1, l2 + 1), (E, A), 200).stable

    def test_boundary_monotone_tradeoff(self):
        space = space_for(((E,), (A,)), (range(0, 161, 20), range(0, 201)))
        region = optimizer.on_region_theoretical(space, (E, A))
        last = [p[1] for p in sorted(region.boundary)]
        assert last == sorted(last, reverse=True)

    def test_safe_boundary_shrink(self):
        region = OnRegion(dists=(E, A), boundary=((10, 155), (40, 120)), mode="theoretical")
        safe = optimizer.safe_boundary(region)
        assert safe.mode == "safe"
        assert safe.boundary == ((9, 139), (36, 108))

    def test_safe_boundary_rejects_non_theoretical(self):
        region = OnRegion(dists=(E,), boundary=((10,),), mode="safe")
        with pytest.raises(ConfigError):
            optimizer.safe_boundary(region)
        with pytest.raises(DomainError):
            optimizer.safe_boundary(
                OnRegion(dists=(E,), boundary=((10,),), mode="theoretical"), shrink=0.9
            )

    def test_simulated_region_criterion_extremes(self):
        space = space_for(((X2,),), (range(0, 41, 10),), n_slots=40)
        # an unachievable error target admits only the empty system ...
        strict = optimizer.on_region_simulated(
            space, (X2,), trials=50, seed=0, pe_max=1e-9
        )
        assert strict.mode == "simulated"
        assert strict.boundary == ((0,),)
        # ... while a vacuous one admits the whole range
        loose = optimizer.on_region_simulated(
            space, (X2,), trials=50, seed=0, pe_max=1.1
        )
        assert loose.boundary == ((40,),)


class TestAlgorithms:
    def test_algorithm1_single_class(self):
        space = space_for(((X2,),), (range(0, 201),))
        u = UtilityModel.log_utility([1.0])
        res = optimizer.algorithm1(space, u)
        assert res.counts == (100,)
        assert res.utility == pytest.approx(math.log(100))
        assert res.method == "alg1"

    def test_algorithm2_single_class(self):
        space = space_for(((X2,),), (range(0, 201),))
        u = UtilityModel.log_utility([1.0])
        res = optimizer.algorithm2(space, u)
        assert res.counts == (90,)
        assert res.method == "alg2"

    def test_unshrunk_boundary_carries_higher_nominal_utility(self):
        space = space_for(((E,), (A,)), (range(0, 161, 40), range(0, 201)))
        u = UtilityModel.log_utility([0.7, 0.3])
        res1 = optimizer.algorithm1(space, u)
        res2 = optimizer.algorithm2(space, u)
        assert res1.utility >= res2.utility

    def test_algorithm_skips_priority_violating_assignments(self):
        # A single-replica head strategy sits above every mixture pointwise,
        # so only (E, A) survives the dominance filter.
        x1 = DegreeDistribution({1: 1.0})
        space = space_for(((x1, E), (A,)), (range(0, 161, 40), range(0, 201)))
        u = UtilityModel.log_utility([0.7, 0.3])
        res = optimizer.algorithm1(space, u)
        assert res.dists == (E, A)

    def test_exhaustive_oracle_tiny_space(self):
        space = space_for(((X2,),), (range(0, 41, 20),), n_slots=50)
        u = UtilityModel.log_utility([1.0])
        res = optimizer.exhaustive_oracle(space, u, trials=30, seed=3)
        assert res.method == "exhaustive"
        assert res.counts in ((20,), (40,))
        assert res.utility > 0

    def test_exhaustive_oracle_deterministic(self):
        space = space_for(((X2,),), (range(0, 41, 20),), n_slots=50)
        u = UtilityModel.log_utility([1.0])
        a = optimizer.exhaustive_oracle(space, u, trials=30, seed=3)
        b = optimizer.exhaustive_oracle(space, u, trials=30, seed=3)
        assert a.counts == b.counts and a.utility == b.utility

    def test_exhaustive_trials_validated(self):
        space = space_for(((X2,),), (range(0, 11),), n_slots=50)
        with pytest.raises(ConfigError):
            optimizer.exhaustive_oracle(space, UtilityModel.log_utility([1.0]), trials=0, seed=0)
