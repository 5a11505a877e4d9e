from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Any

import numpy as np
import numpy.typing as npt

if TYPE_CHECKING:
    from .metrics import FloatArray, WeightSource

IntArray = npt.NDArray[np.int64]
BoolArray = npt.NDArray[np.bool_]


class Guarantee:
    EXACT = "exact"
    APPROX = "(Δ+2)-approx"


class Algorithm:
    GREEDY = "greedy"
    DP = "dp"
    FLOW = "flow"
    APPROX = "approx"
    ORACLE = "oracle"


def readonly_ints(values: Iterable[int] | npt.ArrayLike) -> IntArray:
    arr = np.array(values, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Instance:
    """A normalized constrained-ranking instance.

    Items and positions are 0-based. ``lower`` and ``upper`` are dense
    ``(n, p)`` arrays where row ``k-1`` holds the bounds on the top-``k`` prefix;
    both are non-decreasing down each column and ``0 <= lower <= upper <= k``.
    Build instances with ``fairrank.constraints.validate_instance`` or
    ``make_instance`` rather than directly.
    """

    m: int
    n: int
    properties: tuple[IntArray, ...]
    lower: IntArray
    upper: IntArray
    weight_source: WeightSource

    @property
    def p(self) -> int:
        return len(self.properties)

    @cached_property
    def weights(self) -> FloatArray:
        """The materialized m×n value matrix (computed once, read-only)."""
        return self.weight_source.materialize(self.m, self.n)

    @property
    def has_lower_bounds(self) -> bool:
        return bool(self.lower.size and self.lower.max() > 0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.m == other.m
            and self.n == other.n
            and self.p == other.p
            and all(
                np.array_equal(a, b) for a, b in zip(self.properties, other.properties, strict=True)
            )
            and np.array_equal(self.lower, other.lower)
            and np.array_equal(self.upper, other.upper)
            and self.weight_source == other.weight_source
        )

    def __hash__(self) -> int:
        return hash((self.m, self.n, tuple(p.tobytes() for p in self.properties)))


@dataclass(frozen=True)
class Ranking:
    """Injective assignment of positions to items: ``items[j]`` sits at position ``j``."""

    items: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(int(i) for i in self.items))

    def __len__(self) -> int:
        return len(self.items)

    @classmethod
    def from_one_based(cls, items: Sequence[int]) -> Ranking:
        return cls(tuple(int(i) - 1 for i in items))

    def one_based(self) -> list[int]:
        return [i + 1 for i in self.items]

    def as_array(self) -> IntArray:
        return np.asarray(self.items, dtype=np.int64)

    def to_matrix(self, m: int) -> npt.NDArray[np.int8]:
        """The 0/1 assignment matrix ``x`` with ``x[i, j] = 1`` iff item i is at position j."""
        x = np.zeros((m, len(self.items)), dtype=np.int8)
        x[self.as_array(), np.arange(len(self.items))] = 1
        return x

    @classmethod
    def from_matrix(cls, x: npt.ArrayLike) -> Ranking:
        """Read a ranking back from an assignment matrix with one 1 per column."""
        from .errors import RankingShapeError

        arr = np.asarray(x)
        if arr.ndim != 2 or not np.all((arr == 0) | (arr == 1)):
            raise RankingShapeError("assignment matrix must be a 0/1 matrix")
        if np.any(arr.sum(axis=0) != 1):
            raise RankingShapeError("every position needs exactly one item")
        return cls(tuple(int(i) for i in np.argmax(arr, axis=0)))


@dataclass(frozen=True, eq=False)
class TypeProfile:
    """Per-item property types and the classes of items sharing a type.

    ``vectors[i]`` is the 0/1 type vector of item i; ``distinct_types[c]`` lists
    the properties of class c; ``classes[c]`` its items in ascending order.
    Classes are numbered by their smallest item.
    """

    vectors: BoolArray
    item_class: IntArray
    distinct_types: tuple[tuple[int, ...], ...]
    classes: tuple[IntArray, ...]
    delta: int

    @property
    def q(self) -> int:
        return len(self.distinct_types)

    @property
    def class_sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    def type_of(self, item: int) -> tuple[int, ...]:
        return self.distinct_types[int(self.item_class[item])]

    def class_vectors(self) -> IntArray:
        """``(q, p)`` matrix whose rows are the distinct type vectors ``v_c``."""
        return readonly_ints(self.vectors[[int(c[0]) for c in self.classes]].astype(np.int64))


@dataclass(frozen=True)
class ConstraintEntry:
    k: int
    prop: int
    count: int
    lower: int
    upper: int
    factor: float

    def to_dict(self) -> dict[str, Any]:
        """1-based view used in reports."""
        return {
            "k": self.k + 1,
            "l": self.prop + 1,
            "count": self.count,
            "lower": self.lower,
            "bound": self.upper,
            "factor": self.factor,
        }


@dataclass(frozen=True, eq=False)
class ConstraintReport:
    """Prefix counts of a ranking against every (k, ℓ) bound.

    All arrays are ``(n, p)``. ``factors`` is ``max(count/U, 1)`` with ``inf``
    when ``U = 0`` and the count is positive.
    """

    counts: IntArray
    slack: IntArray
    deficit: IntArray
    factors: npt.NDArray[np.float64]
    lower: IntArray
    upper: IntArray

    @property
    def feasible(self) -> bool:
        return bool(np.all(self.factors == 1.0) and np.all(self.deficit == 0))

    @property
    def max_violation_factor(self) -> float:
        return float(self.factors.max()) if self.factors.size else 1.0

    def violations(self) -> list[ConstraintEntry]:
        """Entries that break an upper bound or fall short of a lower bound."""
        bad = np.argwhere((self.factors > 1.0) | (self.deficit > 0))
        return [
            ConstraintEntry(
                k=int(k),
                prop=int(ell),
                count=int(self.counts[k, ell]),
                lower=int(self.lower[k, ell]),
                upper=int(self.upper[k, ell]),
                factor=float(self.factors[k, ell]),
            )
            for k, ell in bad
        ]

    def count_at(self, k: int, prop: int) -> int:
        """Prefix count with 1-based k and ℓ, matching how bounds are written."""
        return int(self.counts[k - 1, prop - 1])

    def factor_at(self, k: int, prop: int) -> float:
        return float(self.factors[k - 1, prop - 1])


@dataclass(frozen=True)
class SolverResult:
    """What an exact solver returns: a ranking, or an infeasible verdict with its reason."""

    algorithm: str
    ranking: Ranking | None
    value: float | None = None
    reason: str | None = None
    stuck_position: int | None = None
    stats: Mapping[str, int] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.ranking is not None


@dataclass(frozen=True)
class SolveReport:
    """Solution plus diagnostics, the payload of the solution file."""

    ranking: Ranking
    value: float
    algorithm: str
    guarantee: str
    constraints: ConstraintReport
    runtime_ms: float
    stats: Mapping[str, int] = field(default_factory=dict)

    def violations(self) -> list[ConstraintEntry]:
        return self.constraints.violations()
