"""Seeded instance generators for tests and benchmarks.

Random instances draw from numpy's PCG64 bit generator
(``np.random.default_rng(seed)``), whose stream is fixed across platforms,
so a seed always yields the same instance file.

Bound tightness is our own parameterization. For a property of size ``s``:

    U[k] = min(k, ceil(k·s/m + θ·k))      (emitted only when below k)
    L[k] = floor(λ·k·s/m)                 (emitted only when positive)

so ``θ = 1`` leaves the upper bounds vacuous and ``λ = 0`` adds no lower
bounds. Since ``λ ≤ 1`` every generated ``L`` stays below its ``U``.

The hypergraph family maps hyperedges to items and vertices to properties
with every bound equal to 1: a feasible ranking of length n is exactly a
matching of size n.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass
from enum import StrEnum
from typing import Any

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .constraints import make_instance
from .errors import GeneratorParamsError
from .metrics import MetricKind, MetricSpec, dcg_discount
from .models import Instance

logger = logging.getLogger(__name__)

PAIR_LIMIT_SIZE = 4


class QualityDistribution(StrEnum):
    UNIFORM = "uniform"
    EXPONENTIAL = "exponential"
    EQUAL = "equal"


class GenParams(BaseModel):
    """Parameters of ``gen_random``."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    m: int = Field(ge=1)
    n: int = Field(ge=1)
    p: int = Field(default=2, ge=0)
    delta: int = Field(default=1, ge=0)
    metric: MetricKind = MetricKind.DCG
    qualities: QualityDistribution = QualityDistribution.UNIFORM
    theta: float = Field(default=0.5, gt=0.0, le=1.0)
    lower_rate: float = Field(default=0.0, ge=0.0, le=1.0)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def check_consistent(self) -> GenParams:
        if self.n > self.m:
            raise ValueError(f"n={self.n} exceeds m={self.m}")
        if self.delta > self.p:
            raise ValueError(f"delta={self.delta} exceeds p={self.p}")
        if self.m * self.delta < self.p:
            raise ValueError(
                f"{self.p} properties cannot all be non-empty with m={self.m} "
                f"items of at most {self.delta} properties each"
            )
        return self

    @classmethod
    def parse(cls, data: Mapping[str, Any]) -> GenParams:
        """Validate a mapping, raising ``GeneratorParamsError`` with every problem."""
        try:
            return cls.model_validate(dict(data))
        except ValidationError as e:
            problems = [
                f"{'.'.join(str(part) for part in err['loc']) or 'params'}: {err['msg']}"
                for err in e.errors()
            ]
            raise GeneratorParamsError(
                "; ".join(problems), {"errors": problems, "params": dict(data)}
            ) from e


def _draw_qualities(rng: np.random.Generator, params: GenParams) -> tuple[float, ...]:
    m = params.m
    if params.qualities is QualityDistribution.EQUAL:
        raw = np.ones(m)
    elif params.qualities is QualityDistribution.EXPONENTIAL:
        raw = rng.exponential(1.0, size=m)
    else:
        raw = rng.uniform(0.0, 1.0, size=m)
    if params.metric is MetricKind.BRADLEY_TERRY:
        raw = raw + 1.0
    values = np.sort(np.round(raw, 6))[::-1]
    return tuple(float(a) for a in values)


def _draw_types(rng: np.random.Generator, params: GenParams) -> list[set[int]]:
    """Item property sets with every property non-empty and at most ``delta`` per item.

    One item is filled up to exactly ``delta`` properties so the target degree
    is reached whenever ``p ≥ delta``.
    """
    m, p, delta = params.m, params.p, params.delta
    types: list[set[int]] = [set() for _ in range(m)]
    if p == 0:
        return types
    for ell in rng.permutation(p):
        spare = [i for i in range(m) if len(types[i]) < delta]
        types[int(rng.choice(spare))].add(int(ell))
    for i in range(m):
        target = int(rng.integers(0, delta + 1))
        missing = [ell for ell in range(p) if ell not in types[i]]
        extra = max(0, target - len(types[i]))
        if extra:
            types[i].update(int(ell) for ell in rng.choice(missing, size=extra, replace=False))
    full = int(rng.integers(0, m))
    missing = [ell for ell in range(p) if ell not in types[full]]
    extra = delta - len(types[full])
    if extra > 0:
        types[full].update(int(ell) for ell in rng.choice(missing, size=extra, replace=False))
    return types


def _bounds(
    params: GenParams, sizes: Sequence[int]
) -> tuple[dict[tuple[int, int], int], dict[tuple[int, int], int]]:
    m, n = params.m, params.n
    upper: dict[tuple[int, int], int] = {}
    lower: dict[tuple[int, int], int] = {}
    for ell, size in enumerate(sizes, start=1):
        share = size / m
        for k in range(1, n + 1):
            u = min(k, math.ceil(k * share + params.theta * k))
            low = math.floor(params.lower_rate * k * share)
            if low > u:
                raise GeneratorParamsError(
                    f"lower bound {low} exceeds upper bound {u} at k={k}, property {ell}",
                    {"k": k, "l": ell},
                )
            if u < k:
                upper[(k, ell)] = u
            if low > 0:
                lower[(k, ell)] = low
    return upper, lower


def gen_random(params: GenParams) -> Instance:
    """Reproducible random instance with metric-derived (hence Monge) weights.

    Examples:
        >>> inst = gen_random(GenParams(m=7, n=4, p=2, delta=1, seed=1))
        >>> (inst.m, inst.n, inst.p)
        (7, 4, 2)
    """
    rng = np.random.default_rng(params.seed)
    qualities = _draw_qualities(rng, params)
    types = _draw_types(rng, params)
    properties = [
        [i + 1 for i in range(params.m) if ell in types[i]] for ell in range(params.p)
    ]
    upper, lower = _bounds(params, [len(members) for members in properties])
    discount = dcg_discount(params.n) if params.metric is MetricKind.RANK1 else None
    weights = MetricSpec(params.metric, qualities, discount)
    inst = make_instance(
        params.m, params.n, properties, weights=weights, upper=upper, lower=lower
    )
    logger.debug(
        "instance_generated",
        extra={"seed": params.seed, "m": params.m, "n": params.n, "p": params.p},
    )
    return inst


@dataclass(frozen=True)
class Hypergraph:
    """Vertices ``1..vertices`` and hyperedges as tuples of vertex ids."""

    vertices: int
    edges: tuple[tuple[int, ...], ...]

    def instance(self, n: int) -> Instance:
        return gen_from_hypergraph(range(1, self.vertices + 1), self.edges, n)


def gen_from_hypergraph(
    vertices: int | Sequence[Hashable],
    hyperedges: Sequence[Sequence[Hashable]],
    n: int,
    *,
    weights: MetricSpec | npt.ArrayLike | None = None,
) -> Instance:
    """Matching instance: items are hyperedges, properties are vertices, every U is 1.

    ``vertices`` is either a count (labels ``1..vertices``) or the labels
    themselves. Vertices on no hyperedge constrain nothing and get no
    property. Default weights are DCG with equal qualities, so every feasible
    ranking has the same value and the instance tests feasibility alone.

    Raises:
        GeneratorParamsError: on an empty hyperedge, an unknown vertex or
            ``n`` larger than the number of hyperedges.
    """
    labels = list(range(1, vertices + 1)) if isinstance(vertices, int) else list(vertices)
    index = {v: pos for pos, v in enumerate(labels)}
    m = len(hyperedges)
    if not 1 <= n <= m:
        raise GeneratorParamsError(
            f"n={n} must be between 1 and the number of hyperedges ({m})",
            {"n": n, "edges": m},
        )
    incident: list[list[int]] = [[] for _ in labels]
    for item, edge in enumerate(hyperedges, start=1):
        if not edge:
            raise GeneratorParamsError(f"hyperedge {item} is empty", {"edge": item})
        for v in edge:
            if v not in index:
                raise GeneratorParamsError(
                    f"hyperedge {item} names unknown vertex {v!r}", {"edge": item}
                )
            if item not in incident[index[v]]:
                incident[index[v]].append(item)
    properties = [members for members in incident if members]
    upper = {(k, ell): 1 for ell in range(1, len(properties) + 1) for k in range(2, n + 1)}
    source = weights if weights is not None else MetricSpec(MetricKind.DCG, (1.0,) * m)
    return make_instance(m, n, properties, weights=source, upper=upper)


def gen_fano_plane() -> Hypergraph:
    """The seven lines of the Fano plane; any two lines meet, so the matching number is 1."""
    return Hypergraph(
        vertices=7,
        edges=((1, 2, 3), (1, 4, 5), (1, 6, 7), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 5, 6)),
    )


def gen_triangle() -> Hypergraph:
    return Hypergraph(vertices=3, edges=((1, 2), (1, 3), (2, 3)))


def pair_limit_weights() -> npt.NDArray[np.float64]:
    """``W[i, j] = (5 - i)(5 - j)`` with 1-based i and j."""
    idx = np.arange(PAIR_LIMIT_SIZE, 0, -1, dtype=np.float64)
    return np.outer(idx, idx)


def gen_pair_limit(weights: MetricSpec | npt.ArrayLike | None = None) -> Instance:
    """m = n = 4, one property {1, 2}, at most one of its items in the top 2.

    Examples:
        >>> inst = gen_pair_limit()
        >>> [members.tolist() for members in inst.properties], int(inst.upper[1, 0])
        ([[0, 1]], 1)
    """
    source = weights if weights is not None else pair_limit_weights()
    return make_instance(
        PAIR_LIMIT_SIZE, PAIR_LIMIT_SIZE, [[1, 2]], weights=source, upper={(2, 1): 1}
    )


def gen_fractional_vertex_point() -> npt.NDArray[np.float64]:
    """A doubly stochastic point satisfying every bound of ``gen_pair_limit`` fractionally.

    Rows are items and columns positions. Its support has 2m cells and it is
    a vertex of the relaxed feasible region, so the relaxation is not integral
    even with a single property.
    """
    half = 0.5
    return np.array(
        [
            [half, 0.0, 0.0, half],
            [0.0, half, half, 0.0],
            [half, 0.0, half, 0.0],
            [0.0, half, 0.0, half],
        ]
    )
