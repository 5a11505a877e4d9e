"""Tests for the Δ ≤ 1 greedy solver."""

from __future__ import annotations

import time

import pytest
from conftest import product_weights

from fairrank.config import SolverConfig
from fairrank.constraints import check_constraints, make_instance, type_profile
from fairrank.errors import PreconditionError
from fairrank.generators import GenParams, gen_random
from fairrank.greedy import PropertyQueues, solve_greedy
from fairrank.metrics import MetricKind, MetricSpec
from fairrank.models import Ranking
from fairrank.oracle import brute_force_solve

KINDS = list(MetricKind)


def delta1_params(seed: int) -> GenParams:
    m = 3 + seed % 5
    return GenParams(
        m=m,
        n=1 + (seed // 5) % min(m, 5),
        p=1 + seed % 3,
        delta=1,
        metric=KINDS[seed % len(KINDS)],
        theta=(0.1, 0.3, 0.6)[(seed // 3) % 3],
        seed=seed,
    )


class TestGreedy:
    """Optimality and diagnostics of the greedy solver."""

    def test_pair_limit(self, pair_limit) -> None:
        result = solve_greedy(pair_limit)
        assert result.ranking == Ranking.from_one_based([1, 3, 2, 4])
        assert result.value == pytest.approx(29.0)

    def test_dcg_fixture(self, dcg_m4n3) -> None:
        result = solve_greedy(dcg_m4n3)
        assert result.ranking == Ranking.from_one_based([1, 2, 4])
        assert result.value == pytest.approx(6.3928, abs=1e-4)

    def test_unconstrained_gives_identity(self) -> None:
        inst = make_instance(5, 3, weights=product_weights(5, 3))
        assert solve_greedy(inst).ranking == Ranking((0, 1, 2))

    def test_matches_oracle(self) -> None:
        for seed in range(500):
            inst = gen_random(delta1_params(seed))
            greedy = solve_greedy(inst)
            oracle = brute_force_solve(inst)
            assert greedy.feasible == oracle.feasible, f"seed {seed}"
            if oracle.feasible:
                assert greedy.value == pytest.approx(oracle.value, abs=1e-9), f"seed {seed}"
                assert check_constraints(inst, greedy.ranking).feasible

    def test_each_property_contributes_a_prefix(self) -> None:
        for seed in range(200):
            inst = gen_random(delta1_params(seed))
            result = solve_greedy(inst)
            if not result.feasible:
                continue
            for members in type_profile(inst).classes:
                picked = [i for i in result.ranking.items if i in set(members.tolist())]
                assert picked == members[: len(picked)].tolist(), f"seed {seed}"

    def test_infeasible_reports_stuck_position(self) -> None:
        inst = make_instance(
            3, 3, [[1, 2, 3]], weights=product_weights(3, 3), upper={(3, 1): 2}
        )
        result = solve_greedy(inst)
        assert not result.feasible
        assert result.stuck_position == 2
        assert result.reason == "no admissible item for position 3"

    def test_step_count_is_linear(self, pair_limit) -> None:
        result = solve_greedy(pair_limit)
        # m initial steps plus p + 1 queue heads per position
        assert result.stats["steps"] == pair_limit.m + pair_limit.n * (pair_limit.p + 1)


class TestGreedyPreconditions:
    """Inputs outside the greedy's regime."""

    def test_lower_bounds_rejected(self, flow_m4n2) -> None:
        with pytest.raises(PreconditionError, match="upper bounds only"):
            solve_greedy(flow_m4n2)

    def test_overlapping_properties_rejected(self) -> None:
        inst = make_instance(3, 2, [[1, 2], [2, 3]], weights=product_weights(3, 2))
        with pytest.raises(PreconditionError, match="Δ ≤ 1 required"):
            solve_greedy(inst)

    def test_non_monge_matrix_rejected_unless_assumed(self) -> None:
        inst = make_instance(2, 2, weights=[[3, 2], [2, 0]])
        with pytest.raises(PreconditionError, match="not monotone Monge"):
            solve_greedy(inst)
        assert solve_greedy(inst, assume_monge=True).feasible
        assert solve_greedy(inst, SolverConfig(check_monge=False)).feasible


class TestPropertyQueues:
    def test_queues_are_truncated_to_n(self, pair_limit) -> None:
        from fairrank.constraints import property_owner

        queues = PropertyQueues.build(pair_limit, property_owner(pair_limit))
        assert [q.tolist() for q in queues.queues] == [[0, 1], [2, 3]]
        assert queues.head(0) == 0
        assert queues.pop(0) == 0
        assert queues.head(0) == 1
        assert queues.counts == [1, 0]


@pytest.mark.slow
class TestGreedyScaling:
    """Large metric-backed instances never materialize the value matrix."""

    @staticmethod
    def _instance(m: int, n: int, p: int):
        members = [[i + 1 for i in range(ell, m // 2, p)] for ell in range(p)]
        upper = {(k, ell + 1): k // 2 + 1 for ell in range(p) for k in range(1, n + 1)}
        qualities = MetricSpec(MetricKind.DCG, tuple(float(m - i) for i in range(m)))
        return make_instance(m, n, members, weights=qualities, upper=upper)

    def test_million_items(self) -> None:
        inst = self._instance(10**6, 10**3, 100)
        start = time.perf_counter()
        result = solve_greedy(inst)
        elapsed = time.perf_counter() - start
        assert result.feasible
        assert elapsed < 2.0

    def test_steps_grow_linearly(self) -> None:
        small = solve_greedy(self._instance(10**4, 10**2, 10)).stats["steps"]
        large = solve_greedy(self._instance(10**5, 10**3, 10)).stats["steps"]
        expected = (10**5 + 10**3 * 11) / (10**4 + 10**2 * 11)
        assert large / small == pytest.approx(expected, rel=0.5)
