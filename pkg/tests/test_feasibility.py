"""Tests for the abundance condition and exact feasibility."""

from __future__ import annotations

import pytest
from conftest import product_weights

from fairrank.config import SolverConfig
from fairrank.constraints import make_instance
from fairrank.errors import EnumerationCapError
from fairrank.feasibility import abundance_check, feasibility_exact
from fairrank.generators import gen_fano_plane, gen_triangle


class TestAbundance:
    """The sufficient condition on growing upper bounds."""

    def test_pair_limit_is_not_abundant(self, pair_limit) -> None:
        report = abundance_check(pair_limit)
        assert report.counts == (4, 2, 4, 4)
        assert not report.satisfied
        assert report.first_short_position == 1
        assert report.growing[1] == frozenset()

    def test_free_items_make_it_abundant(self) -> None:
        inst = make_instance(
            6,
            2,
            [[1, 2], [3, 4]],
            weights=product_weights(6, 2),
            upper={(2, 1): 1, (2, 2): 1},
        )
        report = abundance_check(inst)
        assert report.counts == (6, 2)
        assert report.satisfied
        assert report.first_short_position is None

    def test_lower_bounds_produce_a_warning(self, flow_m4n2) -> None:
        report = abundance_check(flow_m4n2)
        assert report.warnings == ("lower bounds are ignored by the abundance condition",)

    def test_report_dict_is_one_based(self, pair_limit) -> None:
        data = abundance_check(pair_limit).to_dict()
        assert data["satisfied"] is False
        assert data["positions"][0] == {"k": 1, "growing": [1], "count": 4}
        assert data["positions"][1] == {"k": 2, "growing": [], "count": 2}

    @pytest.mark.parametrize("seed", range(60))
    def test_abundance_implies_feasibility(self, seeded, seed) -> None:
        inst = seeded(m=7, n=4, p=3, delta=2, theta=0.2, seed=seed)
        if abundance_check(inst).satisfied:
            assert feasibility_exact(inst).feasible


class TestExactFeasibility:
    """Exhaustive feasibility with a witness."""

    def test_pair_limit_is_feasible(self, pair_limit) -> None:
        result = feasibility_exact(pair_limit)
        assert result.feasible
        assert result.witness is not None
        assert result.witness.one_based() == [1, 3, 2, 4]

    def test_feasible_but_not_abundant_witness(self, pair_limit) -> None:
        assert not abundance_check(pair_limit).satisfied
        assert feasibility_exact(pair_limit).feasible

    def test_triangle_has_no_two_disjoint_edges(self) -> None:
        result = feasibility_exact(gen_triangle().instance(2))
        assert not result.feasible
        assert result.witness is None

    def test_fano_plane_lines_all_meet(self) -> None:
        assert not feasibility_exact(gen_fano_plane().instance(2)).feasible

    def test_item_cap(self, seeded) -> None:
        inst = seeded(m=11, n=2, p=1, delta=1, seed=0)
        with pytest.raises(EnumerationCapError, match="m ≤ 10"):
            feasibility_exact(inst)
        assert feasibility_exact(inst, SolverConfig(feasibility_item_cap=11)).feasible
