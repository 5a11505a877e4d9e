"""Tests for algorithm selection and the solve/check/info orchestration."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from conftest import product_weights

from fairrank.config import SolverConfig
from fairrank.constraints import make_instance
from fairrank.errors import InfeasibleError, NoApplicableAlgorithmError, PreconditionError
from fairrank.formats import write_instance
from fairrank.generators import gen_triangle
from fairrank.models import Guarantee
from fairrank.pipeline import run_check, run_info, run_solve, select_algorithm, solve


def overlapping(**bounds):
    return make_instance(4, 2, [[1, 2], [2, 3]], weights=product_weights(4, 2), **bounds)


class TestSelectAlgorithm:
    """The automatic choice per regime."""

    def test_disjoint_upper_only_uses_greedy(self, pair_limit) -> None:
        assert select_algorithm(pair_limit) == "greedy"

    def test_disjoint_with_lower_bounds_uses_flow(self, flow_m4n2) -> None:
        assert select_algorithm(flow_m4n2) == "flow"

    def test_small_overlapping_instance_uses_dp(self) -> None:
        assert select_algorithm(overlapping(upper={(2, 1): 1})) == "dp"

    def test_large_state_space_falls_back_to_approx(self) -> None:
        cfg = SolverConfig(dp_auto_state_limit=1)
        assert select_algorithm(overlapping(upper={(2, 1): 1}), cfg) == "approx"

    def test_state_budget_also_caps_the_choice(self) -> None:
        cfg = SolverConfig(dp_state_budget=1)
        assert select_algorithm(overlapping(upper={(2, 1): 1}), cfg) == "approx"

    def test_nothing_applies(self) -> None:
        cfg = SolverConfig(dp_auto_state_limit=1)
        with pytest.raises(NoApplicableAlgorithmError) as exc_info:
            select_algorithm(overlapping(lower={(2, 1): 1}), cfg)
        assert exc_info.value.exit_code == 3
        assert exc_info.value.context["delta"] == 2


class TestSolve:
    """Solve reports and failure modes."""

    def test_auto_on_worked_example(self, pair_limit) -> None:
        report = solve(pair_limit)
        assert report.algorithm == "greedy"
        assert report.guarantee == Guarantee.EXACT
        assert report.value == pytest.approx(29.0)
        assert report.violations() == []
        assert report.stats["steps"] == 12

    @pytest.mark.parametrize("algorithm", ["greedy", "dp", "flow", "oracle"])
    def test_exact_solvers_agree(self, pair_limit, algorithm) -> None:
        report = solve(pair_limit, algorithm)
        assert report.ranking.one_based() == [1, 3, 2, 4]
        assert report.algorithm == algorithm

    def test_approx_report(self, pair_limit) -> None:
        report = solve(pair_limit, "approx")
        assert report.guarantee == Guarantee.APPROX
        assert set(report.stats) == {"phase1_cells", "filled"}
        assert report.constraints.max_violation_factor <= 2.0

    def test_infeasible_carries_the_position(self) -> None:
        with pytest.raises(InfeasibleError) as exc_info:
            solve(gen_triangle().instance(2), "dp")
        assert str(exc_info.value) == "infeasible: no feasible prefix of length 2"
        assert exc_info.value.context == {"algorithm": "dp", "position": 2}
        assert exc_info.value.exit_code == 2

    def test_oracle_infeasible(self) -> None:
        with pytest.raises(InfeasibleError, match="no feasible ranking exists"):
            solve(gen_triangle().instance(2), "oracle")

    def test_unknown_algorithm(self, pair_limit) -> None:
        with pytest.raises(PreconditionError, match="unknown algorithm 'simplex'"):
            solve(pair_limit, "simplex")


class TestRunners:
    """File-level entry points used by the CLI."""

    def test_run_solve_writes_solution(self, fixtures_dir: Path, tmp_path: Path) -> None:
        out = tmp_path / "out" / "sol.json"
        report = run_solve(fixtures_dir / "pair_limit.json", "auto", SolverConfig(), output=out)
        data = json.loads(out.read_text(encoding="utf-8"))
        assert data["ranking"] == [1, 3, 2, 4]
        assert data["value"] == pytest.approx(report.value)

    def test_run_check_reports_violations(self, fixtures_dir: Path, tmp_path: Path) -> None:
        ranking = tmp_path / "r.json"
        ranking.write_text("[1, 2, 3, 4]", encoding="utf-8")
        outcome = run_check(fixtures_dir / "pair_limit.json", ranking, SolverConfig())
        assert not outcome.feasible
        assert outcome.payload["value"] == pytest.approx(30.0)
        assert outcome.payload["max_violation_factor"] == pytest.approx(2.0)
        assert outcome.payload["violations"][0]["k"] == 2

    def test_run_check_zero_bound_is_null(self, tmp_path: Path) -> None:
        inst = make_instance(3, 2, [[1]], weights=product_weights(3, 2), upper={(1, 1): 0})
        path = write_instance(inst, tmp_path / "inst.json")
        ranking = tmp_path / "r.json"
        ranking.write_text("[1, 2]", encoding="utf-8")
        outcome = run_check(path, ranking, SolverConfig())
        assert outcome.payload["max_violation_factor"] is None
        json.dumps(outcome.payload, allow_nan=False)

    def test_run_info(self, fixtures_dir: Path) -> None:
        info = run_info(fixtures_dir / "pair_limit.json", SolverConfig())
        assert info["auto_algorithm"] == "greedy"
        assert info["dp_state_estimate"] == 9
        assert info["abundance"]["satisfied"] is False

    def test_run_info_reports_normalized_bounds(self, tmp_path: Path) -> None:
        path = tmp_path / "envelope.json"
        data = {
            "m": 4,
            "n": 3,
            "properties": [[1, 2]],
            "upper": [{"k": 3, "l": 1, "value": 1}],
            "weights": {"kind": "explicit", "matrix": product_weights(4, 3).tolist()},
        }
        path.write_text(json.dumps(data), encoding="utf-8")
        positions = run_info(path, SolverConfig())["abundance"]["positions"]
        # U_{2,1} is implied to be 1, so property 1 stops growing after position 1
        assert [p["growing"] for p in positions] == [[1], [], []]
        assert [p["count"] for p in positions] == [4, 2, 2]

    def test_run_info_without_applicable_algorithm(self, tmp_path: Path) -> None:
        path = write_instance(overlapping(lower={(2, 1): 1}), tmp_path / "inst.json")
        info = run_info(path, SolverConfig(dp_auto_state_limit=1))
        assert info["auto_algorithm"] is None
