"""Tests for the instance, solution and ranking file formats."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from fairrank.errors import InstanceFileError, InstanceValidationError, RankingShapeError
from fairrank.formats import (
    SolutionFile,
    dump_instance,
    dump_solution,
    instance_to_file,
    load_instance,
    load_ranking,
    write_instance,
)
from fairrank.generators import gen_pair_limit
from fairrank.models import Ranking
from fairrank.pipeline import solve


class TestInstanceFiles:
    """Parsing and serializing instance files."""

    def test_pair_limit_golden_file(self, fixtures_dir: Path, pair_limit) -> None:
        path = fixtures_dir / "pair_limit.json"
        assert load_instance(path) == pair_limit
        assert json.loads(dump_instance(pair_limit)) == json.loads(path.read_text())

    def test_dcg_golden_file(self, fixtures_dir: Path, dcg_m4n3) -> None:
        path = fixtures_dir / "dcg_m4n3.json"
        assert load_instance(path) == dcg_m4n3
        assert json.loads(dump_instance(dcg_m4n3)) == json.loads(path.read_text())

    @pytest.mark.parametrize("name", ["pair_limit.json", "dcg_m4n3.json", "flow_m4n2.json"])
    def test_round_trip_is_byte_stable(self, fixtures_dir: Path, tmp_path: Path, name) -> None:
        inst = load_instance(fixtures_dir / name)
        first = write_instance(inst, tmp_path / "a.json")
        again = load_instance(first)
        assert again == inst
        assert dump_instance(again) == first.read_text(encoding="utf-8")

    def test_only_non_default_bounds_are_written(self, flow_m4n2) -> None:
        file = instance_to_file(flow_m4n2)
        assert file.upper == []
        assert [(b.k, b.prop, b.value) for b in file.lower] == [(2, 2, 1)]

    def test_metric_weights_are_kept_symbolic(self, dcg_m4n3) -> None:
        data = json.loads(dump_instance(dcg_m4n3))
        assert data["weights"] == {"kind": "dcg", "qualities": [4.0, 3.0, 2.0, 1.0]}

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(InstanceFileError, match="File not found"):
            load_instance(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path: Path) -> None:
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(InstanceFileError, match="Invalid JSON"):
            load_instance(path)

    def test_unknown_weight_kind(self, tmp_path: Path) -> None:
        path = tmp_path / "inst.json"
        path.write_text(
            json.dumps(
                {"m": 2, "n": 1, "weights": {"kind": "ndcg", "qualities": [2, 1]}}
            ),
            encoding="utf-8",
        )
        with pytest.raises(InstanceValidationError, match="weights"):
            load_instance(path)


class TestSolutionFiles:
    """Solution documents produced from solve reports."""

    def test_exact_solution_has_no_violations(self, pair_limit) -> None:
        data = json.loads(dump_solution(solve(pair_limit, "greedy")))
        assert data["ranking"] == [1, 3, 2, 4]
        assert data["value"] == pytest.approx(29.0)
        assert data["algorithm"] == "greedy"
        assert data["guarantee"] == "exact"
        assert data["violations"] == []
        assert data["runtime_ms"] >= 0
        SolutionFile.model_validate(data)


class TestRankingFiles:
    """The three accepted ranking shapes."""

    def test_bare_list(self, tmp_path: Path) -> None:
        path = tmp_path / "r.json"
        path.write_text("[1, 3, 2, 4]", encoding="utf-8")
        assert load_ranking(path) == Ranking((0, 2, 1, 3))

    def test_solution_file(self, tmp_path: Path) -> None:
        path = tmp_path / "sol.json"
        path.write_text(dump_solution(solve(gen_pair_limit(), "oracle")), encoding="utf-8")
        assert load_ranking(path).one_based() == [1, 3, 2, 4]

    def test_assignment_matrix(self, tmp_path: Path) -> None:
        path = tmp_path / "x.json"
        path.write_text(json.dumps({"matrix": [[0, 1], [1, 0], [0, 0]]}), encoding="utf-8")
        assert load_ranking(path) == Ranking((1, 0))

    def test_non_integer_entries_rejected(self, tmp_path: Path) -> None:
        path = tmp_path / "r.json"
        path.write_text('["a", 2]', encoding="utf-8")
        with pytest.raises(RankingShapeError, match="1-based item indices"):
            load_ranking(path)

    def test_matrix_with_two_items_in_a_column_rejected(self, tmp_path: Path) -> None:
        path = tmp_path / "x.json"
        path.write_text(json.dumps({"matrix": [[1, 0], [1, 1]]}), encoding="utf-8")
        with pytest.raises(RankingShapeError, match="exactly one item"):
            load_ranking(path)
