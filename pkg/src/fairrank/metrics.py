"""Value matrices from ranking metrics, and the monotone-Monge check.

A value matrix ``W`` (items × positions) is what every solver maximizes. It is
either given explicitly or derived from per-item qualities ``a_1 ≥ ... ≥ a_m``
through one of the metrics below. All derived matrices are non-increasing in
both indices and satisfy the Monge exchange inequality

    W[i1, j1] + W[i2, j2] >= W[i1, j2] + W[i2, j1]   for i1 < i2, j1 < j2,

which is what makes the exchange arguments in the exact solvers work.

Indices are 0-based here; formulas are written with 1-based ``i`` and ``j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

import numpy as np
import numpy.typing as npt

from .errors import MetricSpecError

FloatArray = npt.NDArray[np.float64]


class MetricKind(StrEnum):
    RANK1 = "rank1"
    DCG = "dcg"
    BRADLEY_TERRY = "bradley_terry"
    FOOTRULE = "footrule"
    RHO = "rho"


class MongeCondition(StrEnum):
    ITEMS = "non_increasing_in_items"
    POSITIONS = "non_increasing_in_positions"
    EXCHANGE = "monge_exchange"


def _readonly(values: npt.ArrayLike) -> FloatArray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MetricSpec:
    """Quality-based description of a value matrix.

    ``qualities`` must be sorted non-increasing so that the unconstrained
    optimum ranks item ``i`` at position ``i``; unsorted input is rejected
    instead of sorted, which would silently renumber items.
    """

    kind: MetricKind
    qualities: tuple[float, ...]
    discount: tuple[float, ...] | None = None
    _a: FloatArray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        kind = MetricKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qualities", tuple(float(a) for a in self.qualities))
        if self.discount is not None:
            object.__setattr__(self, "discount", tuple(float(f) for f in self.discount))
        a = _readonly(self.qualities)
        if a.size == 0:
            raise MetricSpecError("qualities must be non-empty", {"kind": kind.value})
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise MetricSpecError(
                "qualities must be finite and non-negative", {"kind": kind.value}
            )
        drops = np.flatnonzero(np.diff(a) > 0)
        if drops.size:
            i = int(drops[0])
            raise MetricSpecError(
                f"qualities must be sorted non-increasing: "
                f"a_{i + 1}={a[i]} < a_{i + 2}={a[i + 1]}",
                {"kind": kind.value, "item": i + 2},
            )
        if kind is MetricKind.BRADLEY_TERRY and float(a.min()) < 1.0:
            raise MetricSpecError(
                "bradley_terry requires every quality >= 1 (shift qualities so log a_i >= 0)",
                {"kind": kind.value, "min_quality": float(a.min())},
            )
        if kind is MetricKind.RANK1:
            if self.discount is None:
                raise MetricSpecError("rank1 requires a discount table", {"kind": kind.value})
            f = np.array(self.discount, dtype=np.float64)
            if f.size == 0 or not np.all(np.isfinite(f)) or np.any(f <= 0):
                raise MetricSpecError(
                    "discount values must be finite and positive", {"kind": kind.value}
                )
            if np.any(np.diff(f) > 0):
                raise MetricSpecError(
                    "discount table must be non-increasing", {"kind": kind.value}
                )
        object.__setattr__(self, "_a", a)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MetricSpec):
            return NotImplemented
        return (self.kind, self.qualities, self.discount) == (
            other.kind,
            other.qualities,
            other.discount,
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.qualities, self.discount))

    @property
    def m(self) -> int:
        return len(self.qualities)

    def check_shape(self, m: int, n: int) -> list[str]:
        problems = []
        if self.m != m:
            problems.append(f"metric has {self.m} qualities but instance has m={m} items")
        if self.kind is MetricKind.RANK1 and self.discount is not None and len(self.discount) < n:
            problems.append(f"discount table has {len(self.discount)} entries, need n={n}")
        return problems

    def entries(self, rows: npt.ArrayLike, cols: npt.ArrayLike) -> FloatArray:
        """Evaluate ``W[rows, cols]`` elementwise (broadcasting), without materializing W."""
        r = np.asarray(rows, dtype=np.int64)
        c = np.asarray(cols, dtype=np.int64)
        i = r + 1
        j = c + 1
        m = self.m
        if self.kind is MetricKind.RANK1:
            f = np.asarray(self.discount or (), dtype=np.float64)
            return self._a[r] * f[c]
        if self.kind is MetricKind.DCG:
            return self._a[r] / np.log2(j + 1.0)
        if self.kind is MetricKind.BRADLEY_TERRY:
            return (m - j) * np.log(self._a[r])
        if self.kind is MetricKind.FOOTRULE:
            return ((2 * m - i - j) - np.abs(j - i)).astype(np.float64)
        # rho
        return ((2 * m - i - j) ** 2 - (j - i) ** 2).astype(np.float64)

    def materialize(self, m: int, n: int) -> FloatArray:
        return gen_weights(self, m, n)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"kind": self.kind.value, "qualities": list(self.qualities)}
        if self.discount is not None:
            data["discount"] = list(self.discount)
        return data


@dataclass(frozen=True, eq=False)
class ExplicitWeights:
    """A dense, user-supplied value matrix."""

    matrix: FloatArray

    def __post_init__(self) -> None:
        mat = np.array(self.matrix, dtype=np.float64)
        if mat.ndim != 2:
            raise MetricSpecError("explicit weight matrix must be two-dimensional")
        if not np.all(np.isfinite(mat)) or np.any(mat < 0):
            raise MetricSpecError("explicit weights must be finite and non-negative")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExplicitWeights):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and bool(
            np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self) -> int:
        return hash((self.matrix.shape, self.matrix.tobytes()))

    def check_shape(self, m: int, n: int) -> list[str]:
        if self.matrix.shape != (m, n):
            rows, cols = self.matrix.shape
            return [f"weight matrix is {rows}x{cols}, expected {m}x{n}"]
        return []

    def entries(self, rows: npt.ArrayLike, cols: npt.ArrayLike) -> FloatArray:
        return self.matrix[np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64)]

    def materialize(self, m: int, n: int) -> FloatArray:
        problems = self.check_shape(m, n)
        if problems:
            raise MetricSpecError(problems[0], {"shape": list(self.matrix.shape)})
        return self.matrix

    def to_dict(self) -> dict[str, Any]:
        return {"kind": "explicit", "matrix": self.matrix.tolist()}


WeightSource = MetricSpec | ExplicitWeights


def gen_weights(spec: MetricSpec, m: int, n: int) -> FloatArray:
    """Materialize the m×n value matrix of a metric.

    Examples:
        >>> spec = MetricSpec(MetricKind.FOOTRULE, (3.0, 2.0, 1.0))
        >>> float(gen_weights(spec, 3, 2)[0, 0])
        4.0
    """
    if n > m:
        raise MetricSpecError(f"n={n} exceeds m={m}", {"m": m, "n": n})
    problems = spec.check_shape(m, n)
    if problems:
        raise MetricSpecError(problems[0], {"m": m, "n": n})
    rows = np.arange(m, dtype=np.int64)[:, None]
    cols = np.arange(n, dtype=np.int64)[None, :]
    W = np.ascontiguousarray(spec.entries(rows, cols), dtype=np.float64)
    W.setflags(write=False)
    return W


@dataclass(frozen=True)
class MongeWitness:
    """Outcome of a Monge check.

    When the check fails, ``(i1, i2, j1, j2)`` locate the failing inequality
    (0-based). Exchange failures have ``i1 < i2`` and ``j1 < j2``; a
    monotonicity failure collapses the axis it does not compare, e.g. a
    failure of "non-increasing in items" at column ``j`` reads ``(i, i+1, j, j)``.
    """

    holds: bool
    condition: MongeCondition | None = None
    i1: int = -1
    i2: int = -1
    j1: int = -1
    j2: int = -1

    def describe(self) -> str:
        if self.holds:
            return "holds"
        a, b, c, d = self.i1 + 1, self.i2 + 1, self.j1 + 1, self.j2 + 1
        if self.condition is MongeCondition.ITEMS:
            return f"W[{a},{c}] < W[{b},{c}]: not non-increasing in items"
        if self.condition is MongeCondition.POSITIONS:
            return f"W[{a},{c}] < W[{a},{d}]: not non-increasing in positions"
        return f"W[{a},{c}]+W[{b},{d}] < W[{a},{d}]+W[{b},{c}]: Monge exchange fails"

    def violated_in(
        self, W: npt.ArrayLike, *, strict: bool = False, tolerance: float = 0.0
    ) -> bool:
        """Re-evaluate the recorded inequality on ``W``; True when it genuinely fails."""
        if self.holds:
            return False
        arr = np.asarray(W, dtype=np.float64)
        eps = _epsilon(arr, tolerance)
        if self.condition is MongeCondition.ITEMS:
            gap = arr[self.i1, self.j1] - arr[self.i2, self.j1]
        elif self.condition is MongeCondition.POSITIONS:
            gap = arr[self.i1, self.j1] - arr[self.i1, self.j2]
        else:
            gap = (
                arr[self.i1, self.j1]
                + arr[self.i2, self.j2]
                - arr[self.i1, self.j2]
                - arr[self.i2, self.j1]
            )
        return bool(gap <= eps) if strict else bool(gap < -eps)


MONGE_HOLDS = MongeWitness(holds=True)


def _epsilon(W: FloatArray, tolerance: float) -> float:
    if W.size == 0:
        return tolerance
    return tolerance * max(1.0, float(np.max(np.abs(W))))


def _fails(gaps: FloatArray, eps: float, strict: bool) -> npt.NDArray[np.bool_]:
    return gaps <= eps if strict else gaps < -eps


def check_monge(
    W: npt.ArrayLike, *, strict: bool = False, tolerance: float = 1e-9
) -> MongeWitness:
    """Check monotonicity and the Monge condition in O(mn) using adjacent pairs.

    Adjacent rows/columns suffice: the quadruple inequality for (i1, i2, j1, j2)
    is a sum of adjacent 2×2 inequalities, and monotonicity chains likewise.

    Args:
        W: value matrix (items × positions)
        strict: require every inequality to hold with a margin above the tolerance
        tolerance: relative slack, scaled by ``max(1, max|W|)``

    Examples:
        >>> check_monge([[2, 1], [1, 1]]).holds
        True
        >>> check_monge([[1, 2], [0, 0]]).condition
        <MongeCondition.POSITIONS: 'non_increasing_in_positions'>
    """
    arr = np.asarray(W, dtype=np.float64)
    eps = _epsilon(arr, tolerance)

    item_gaps = arr[:-1, :] - arr[1:, :]
    bad = np.argwhere(_fails(item_gaps, eps, strict))
    if bad.size:
        i, j = (int(x) for x in bad[0])
        return MongeWitness(False, MongeCondition.ITEMS, i, i + 1, j, j)

    pos_gaps = arr[:, :-1] - arr[:, 1:]
    bad = np.argwhere(_fails(pos_gaps, eps, strict))
    if bad.size:
        i, j = (int(x) for x in bad[0])
        return MongeWitness(False, MongeCondition.POSITIONS, i, i, j, j + 1)

    exchange = arr[:-1, :-1] + arr[1:, 1:] - arr[:-1, 1:] - arr[1:, :-1]
    bad = np.argwhere(_fails(exchange, eps, strict))
    if bad.size:
        i, j = (int(x) for x in bad[0])
        return MongeWitness(False, MongeCondition.EXCHANGE, i, i + 1, j, j + 1)
    return MONGE_HOLDS


def check_monge_exhaustive(
    W: npt.ArrayLike, *, strict: bool = False, tolerance: float = 1e-9
) -> MongeWitness:
    """Reference check enumerating every pair and quadruple, O(m²n²)."""
    arr = np.asarray(W, dtype=np.float64)
    m, n = arr.shape
    eps = _epsilon(arr, tolerance)

    def fails(gap: float) -> bool:
        return gap <= eps if strict else gap < -eps

    for j in range(n):
        for i1 in range(m):
            for i2 in range(i1 + 1, m):
                if fails(arr[i1, j] - arr[i2, j]):
                    return MongeWitness(False, MongeCondition.ITEMS, i1, i2, j, j)
    for i in range(m):
        for j1 in range(n):
            for j2 in range(j1 + 1, n):
                if fails(arr[i, j1] - arr[i, j2]):
                    return MongeWitness(False, MongeCondition.POSITIONS, i, i, j1, j2)
    for i1 in range(m):
        for i2 in range(i1 + 1, m):
            for j1 in range(n):
                for j2 in range(j1 + 1, n):
                    gap = arr[i1, j1] + arr[i2, j2] - arr[i1, j2] - arr[i2, j1]
                    if fails(gap):
                        return MongeWitness(False, MongeCondition.EXCHANGE, i1, i2, j1, j2)
    return MONGE_HOLDS


def dcg_discount(n: int) -> tuple[float, ...]:
    """Position discounts ``1/log2(j+1)`` for j = 1..n."""
    return tuple(1.0 / math.log2(j + 1) for j in range(1, n + 1))
