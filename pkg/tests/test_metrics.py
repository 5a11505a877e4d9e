"""Tests for metric-derived value matrices and the monotone-Monge checks."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairrank.errors import MetricSpecError
from fairrank.metrics import (
    ExplicitWeights,
    MetricKind,
    MetricSpec,
    MongeCondition,
    check_monge,
    check_monge_exhaustive,
    dcg_discount,
    gen_weights,
)


@st.composite
def sorted_qualities(draw: st.DrawFn, min_value: float = 0.0) -> tuple[int, tuple[float, ...]]:
    m = draw(st.integers(min_value=1, max_value=9))
    values = draw(
        st.lists(
            st.floats(min_value=min_value, max_value=100.0, allow_nan=False),
            min_size=m,
            max_size=m,
        )
    )
    n = draw(st.integers(min_value=1, max_value=m))
    return n, tuple(sorted(values, reverse=True))


small_matrices = st.integers(min_value=1, max_value=6).flatmap(
    lambda m: st.integers(min_value=1, max_value=6).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(min_value=0, max_value=4), min_size=n, max_size=n),
            min_size=m,
            max_size=m,
        )
    )
)


class TestMetricWeights:
    """Weight constructions for every metric kind."""

    @pytest.mark.parametrize(
        "kind", [MetricKind.DCG, MetricKind.FOOTRULE, MetricKind.RHO, MetricKind.RANK1]
    )
    @settings(max_examples=250, derandomize=True, deadline=None)
    @given(data=sorted_qualities())
    def test_generated_matrices_are_monotone_monge(self, kind, data) -> None:
        n, qualities = data
        discount = dcg_discount(n) if kind is MetricKind.RANK1 else None
        W = gen_weights(MetricSpec(kind, qualities, discount), len(qualities), n)
        assert W.shape == (len(qualities), n)
        assert check_monge(W).holds

    @settings(max_examples=250, derandomize=True, deadline=None)
    @given(data=sorted_qualities(min_value=1.0))
    def test_bradley_terry_is_monotone_monge(self, data) -> None:
        n, qualities = data
        W = gen_weights(MetricSpec(MetricKind.BRADLEY_TERRY, qualities), len(qualities), n)
        assert check_monge(W).holds

    def test_dcg_entries(self) -> None:
        W = gen_weights(MetricSpec(MetricKind.DCG, (4.0, 3.0, 2.0, 1.0)), 4, 3)
        assert W[0, 0] == pytest.approx(4.0)
        assert W[1, 1] == pytest.approx(3.0 / math.log2(3))
        assert W[3, 2] == pytest.approx(0.5)

    def test_footrule_and_rho_entries(self) -> None:
        qualities = (3.0, 2.0, 1.0)
        footrule = gen_weights(MetricSpec(MetricKind.FOOTRULE, qualities), 3, 3)
        rho = gen_weights(MetricSpec(MetricKind.RHO, qualities), 3, 3)
        assert footrule[0, 0] == 4.0
        assert footrule[0, 2] == 0.0
        # (2m - i - j)^2 - (j - i)^2 = 4(m - i)(m - j)
        assert rho.tolist() == [[16.0, 8.0, 0.0], [8.0, 4.0, 0.0], [0.0, 0.0, 0.0]]

    def test_rank1_uses_discount_table(self) -> None:
        spec = MetricSpec(MetricKind.RANK1, (2.0, 1.0), (1.0, 0.5))
        assert gen_weights(spec, 2, 2).tolist() == [[2.0, 1.0], [1.0, 0.5]]

    def test_entries_match_materialized_matrix(self) -> None:
        spec = MetricSpec(MetricKind.DCG, (5.0, 4.0, 1.0, 0.5))
        W = spec.materialize(4, 2)
        rows = np.array([3, 0, 2])
        cols = np.array([1, 0, 1])
        assert np.allclose(spec.entries(rows, cols), W[rows, cols])

    def test_generated_matrix_is_read_only(self) -> None:
        W = gen_weights(MetricSpec(MetricKind.DCG, (2.0, 1.0)), 2, 2)
        with pytest.raises(ValueError, match="read-only"):
            W[0, 0] = 7.0


class TestMetricValidation:
    """Malformed metric specs raise MetricSpecError."""

    def test_unsorted_qualities_rejected(self) -> None:
        with pytest.raises(MetricSpecError, match="sorted non-increasing"):
            MetricSpec(MetricKind.DCG, (1.0, 2.0))

    def test_bradley_terry_needs_qualities_at_least_one(self) -> None:
        with pytest.raises(MetricSpecError, match="bradley_terry"):
            MetricSpec(MetricKind.BRADLEY_TERRY, (2.0, 0.5))

    def test_rank1_needs_discount(self) -> None:
        with pytest.raises(MetricSpecError, match="discount"):
            MetricSpec(MetricKind.RANK1, (2.0, 1.0))

    def test_rank1_discount_must_not_increase(self) -> None:
        with pytest.raises(MetricSpecError, match="non-increasing"):
            MetricSpec(MetricKind.RANK1, (2.0, 1.0), (0.5, 1.0))

    def test_shape_mismatch_reported(self) -> None:
        spec = MetricSpec(MetricKind.DCG, (2.0, 1.0))
        assert spec.check_shape(3, 2) == ["metric has 2 qualities but instance has m=3 items"]
        with pytest.raises(MetricSpecError):
            gen_weights(spec, 3, 2)

    def test_explicit_weights_reject_negative_entries(self) -> None:
        with pytest.raises(MetricSpecError, match="non-negative"):
            ExplicitWeights(np.array([[1.0, -1.0]]))

    def test_specs_compare_by_value(self) -> None:
        a = MetricSpec(MetricKind.DCG, (2, 1))
        b = MetricSpec("dcg", (2.0, 1.0))
        assert a == b
        assert hash(a) == hash(b)


class TestMongeCheck:
    """Adjacent-pair checker, its witnesses and the exhaustive reference."""

    def test_items_witness(self) -> None:
        w = check_monge([[1, 2], [3, 4]])
        assert not w.holds
        assert w.condition is MongeCondition.ITEMS
        assert (w.i1, w.i2, w.j1, w.j2) == (0, 1, 0, 0)
        assert "not non-increasing in items" in w.describe()

    def test_positions_witness(self) -> None:
        w = check_monge([[2, 3], [1, 2]])
        assert w.condition is MongeCondition.POSITIONS
        assert (w.i1, w.i2, w.j1, w.j2) == (0, 0, 0, 1)

    def test_exchange_witness(self) -> None:
        W = [[3, 2], [2, 0]]
        w = check_monge(W)
        assert w.condition is MongeCondition.EXCHANGE
        assert (w.i1, w.i2, w.j1, w.j2) == (0, 1, 0, 1)
        assert w.violated_in(W)
        assert "Monge exchange fails" in w.describe()

    def test_constant_matrix_is_monge_but_not_strict(self) -> None:
        W = np.ones((3, 3))
        assert check_monge(W).holds
        assert not check_monge(W, strict=True).holds
        assert not check_monge_exhaustive(W, strict=True).holds

    def test_strictly_monge_product(self) -> None:
        W = np.outer([3.0, 2.0, 1.0], [3.0, 2.0, 1.0])
        assert check_monge(W, strict=True).holds
        assert check_monge_exhaustive(W, strict=True).holds

    def test_tolerance_absorbs_rounding(self) -> None:
        W = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-12]])
        assert check_monge(W).holds
        assert not check_monge(W, tolerance=0.0).holds

    @settings(max_examples=300, derandomize=True, deadline=None)
    @given(rows=small_matrices)
    def test_adjacent_check_agrees_with_exhaustive(self, rows) -> None:
        W = np.array(rows, dtype=float)
        fast = check_monge(W)
        slow = check_monge_exhaustive(W)
        assert fast.holds == slow.holds
        if not fast.holds:
            assert fast.violated_in(W)
            assert slow.violated_in(W)

    def test_dcg_discount(self) -> None:
        assert dcg_discount(3) == pytest.approx((1.0, 1.0 / math.log2(3), 0.5))
