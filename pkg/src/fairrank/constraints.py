"""Instance validation, ranking evaluation and prefix-constraint checking."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence
from typing import Any

import numpy as np
import numpy.typing as npt
from pydantic import ValidationError

from .config import SolverConfig, resolve_config
from .errors import (
    InstanceValidationError,
    MetricSpecError,
    PreconditionError,
    RankingShapeError,
)
from .formats import BoundEntry, ExplicitWeightsModel, InstanceFile, instance_to_file
from .metrics import ExplicitWeights, MetricKind, MetricSpec, WeightSource, check_monge
from .models import (
    ConstraintReport,
    Instance,
    IntArray,
    Ranking,
    TypeProfile,
    readonly_ints,
)

logger = logging.getLogger(__name__)

RawInstance = Instance | InstanceFile | Mapping[str, Any]
BoundMap = Mapping[tuple[int, int], int]


def _parse_raw(raw: RawInstance) -> InstanceFile:
    if isinstance(raw, InstanceFile):
        return raw
    if isinstance(raw, Instance):
        return instance_to_file(raw)
    try:
        return InstanceFile.model_validate(raw)
    except ValidationError as e:
        errors = [
            f"{'.'.join(str(part) for part in err['loc']) or 'instance'}: {err['msg']}"
            for err in e.errors()
        ]
        raise InstanceValidationError(errors) from e


def _collect_bounds(
    name: str, entries: Sequence[BoundEntry], n: int, p: int, errors: list[str]
) -> dict[tuple[int, int], int]:
    symbol = "U" if name == "upper" else "L"
    found: dict[tuple[int, int], int] = {}
    for e in entries:
        label = f"{symbol}_{{{e.k},{e.prop}}}"
        if not 1 <= e.k <= n:
            errors.append(f"{name} bound {label}: prefix k out of range 1..{n}")
            continue
        if not 1 <= e.prop <= p:
            errors.append(f"{name} bound {label}: property index out of range 1..{p}")
            continue
        if e.value < 0:
            errors.append(f"{name} bound {label}={e.value} is negative")
            continue
        if e.value > e.k:
            errors.append(f"{name} bound {label}={e.value} exceeds k={e.k}")
            continue
        key = (e.k - 1, e.prop - 1)
        if key in found:
            errors.append(f"{name} bound {label} given twice")
            continue
        found[key] = e.value

    by_prop: dict[int, list[tuple[int, int]]] = {}
    for (k, ell), v in found.items():
        by_prop.setdefault(ell, []).append((k, v))
    for ell, pairs in sorted(by_prop.items()):
        pairs.sort()
        for (k1, v1), (k2, v2) in zip(pairs, pairs[1:], strict=False):
            if v2 < v1:
                errors.append(
                    f"{name} bounds of property {ell + 1} decrease in k: "
                    f"{symbol}_{{{k1 + 1},{ell + 1}}}={v1} > {symbol}_{{{k2 + 1},{ell + 1}}}={v2}"
                )
    return found


def _dense_bounds(
    n: int, p: int, upper: Mapping[tuple[int, int], int], lower: Mapping[tuple[int, int], int]
) -> tuple[IntArray, IntArray]:
    """Fill unspecified bounds with the envelope implied by the supplied ones.

    Unspecified ``U[k]`` becomes ``min(k, U[k+1])`` walking down from ``k = n``;
    unspecified ``L[k]`` becomes ``L[k-1]`` walking up from ``L[0] = 0``.
    """
    U = np.repeat(np.arange(1, n + 1, dtype=np.int64)[:, None], p, axis=1)
    L = np.zeros((n, p), dtype=np.int64)
    for (k, ell), v in upper.items():
        U[k, ell] = v
    for (k, ell), v in lower.items():
        L[k, ell] = v
    for ell in range(p):
        for k in range(n - 2, -1, -1):
            if (k, ell) not in upper:
                U[k, ell] = min(U[k, ell], U[k + 1, ell])
        for k in range(1, n):
            if (k, ell) not in lower:
                L[k, ell] = L[k - 1, ell]
    U.setflags(write=False)
    L.setflags(write=False)
    return L, U


def _weight_source(file: InstanceFile, cfg: SolverConfig, errors: list[str]) -> WeightSource | None:
    w = file.weights
    try:
        if isinstance(w, ExplicitWeightsModel):
            cells = sum(len(row) for row in w.matrix)
            if cells > cfg.explicit_cell_limit:
                errors.append(
                    f"explicit weight matrix has {cells} cells, above the limit of "
                    f"{cfg.explicit_cell_limit}; describe large matrices with a metric spec"
                )
                return None
            if len({len(row) for row in w.matrix}) > 1:
                errors.append("weight matrix rows have unequal lengths")
                return None
            source: WeightSource = ExplicitWeights(np.array(w.matrix, dtype=np.float64))
        else:
            discount = tuple(w.discount) if w.discount is not None else None
            source = MetricSpec(MetricKind(w.kind), tuple(w.qualities), discount)
    except MetricSpecError as e:
        errors.append(e.message)
        return None
    errors.extend(source.check_shape(file.m, file.n))
    return source


def validate_instance(raw: RawInstance, config: SolverConfig | None = None) -> Instance:
    """Validate a raw instance description and normalize it.

    Args:
        raw: an instance-file mapping (1-based indices), a parsed ``InstanceFile``
            or an ``Instance`` (re-validated through its serialized form)
        config: solver configuration (only ``explicit_cell_limit`` is used)

    Returns:
        The normalized instance with dense, monotone bound matrices.

    Raises:
        InstanceValidationError: listing every problem found.

    Examples:
        >>> inst = validate_instance({
        ...     "m": 4, "n": 4, "properties": [[1, 2]],
        ...     "upper": [{"k": 2, "l": 1, "value": 1}],
        ...     "weights": {"kind": "footrule", "qualities": [4, 3, 2, 1]},
        ... })
        >>> inst.upper[:, 0].tolist()
        [1, 1, 3, 4]
    """
    cfg = resolve_config(config)
    file = _parse_raw(raw)
    m, n, p = file.m, file.n, len(file.properties)

    errors: list[str] = []
    if m < 1:
        errors.append(f"m must be positive, got {m}")
    if n < 1:
        errors.append(f"n must be positive, got {n}")
    if n > m:
        errors.append(f"n ≤ m violated: n={n}, m={m}")
    if errors:
        raise InstanceValidationError(errors, {"m": m, "n": n})

    properties: list[IntArray] = []
    for idx, members in enumerate(file.properties, start=1):
        if not members:
            errors.append(f"property {idx} is empty")
        bad = sorted({i for i in members if not 1 <= i <= m})
        if bad:
            errors.append(f"property {idx}: item index out of range 1..{m}: {bad}")
        if len(set(members)) != len(members):
            errors.append(f"property {idx} lists an item more than once")
        properties.append(readonly_ints(sorted({i - 1 for i in members if 1 <= i <= m})))

    upper = _collect_bounds("upper", file.upper, n, p, errors)
    lower = _collect_bounds("lower", file.lower, n, p, errors)
    L, U = _dense_bounds(n, p, upper, lower)
    for k, ell in np.argwhere(L > U):
        errors.append(
            f"L_{{{k + 1},{ell + 1}}}={L[k, ell]} > U_{{{k + 1},{ell + 1}}}={U[k, ell]}"
        )

    source = _weight_source(file, cfg, errors)
    if errors or source is None:
        raise InstanceValidationError(errors, {"m": m, "n": n, "p": p})

    inst = Instance(m=m, n=n, properties=tuple(properties), lower=L, upper=U, weight_source=source)
    logger.debug("instance_validated", extra={"m": m, "n": n, "p": p})
    return inst


def make_instance(
    m: int,
    n: int,
    properties: Iterable[Iterable[int]] = (),
    *,
    weights: WeightSource | npt.ArrayLike,
    upper: BoundMap | None = None,
    lower: BoundMap | None = None,
    config: SolverConfig | None = None,
) -> Instance:
    """Build an instance from Python values using the file conventions.

    ``properties`` hold 1-based items and ``upper``/``lower`` map 1-based
    ``(k, ℓ)`` pairs to bounds, so instances read the way they are written
    on paper.

    Examples:
        >>> W = [[(5 - i) * (5 - j) for j in range(1, 5)] for i in range(1, 5)]
        >>> make_instance(4, 4, [[1, 2]], weights=W, upper={(2, 1): 1}).p
        1
    """
    if isinstance(weights, MetricSpec | ExplicitWeights):
        weight_dict = weights.to_dict()
    else:
        weight_dict = {"kind": "explicit", "matrix": np.asarray(weights, dtype=float).tolist()}

    def entries(bounds: BoundMap | None) -> list[dict[str, int]]:
        return [
            {"k": k, "l": ell, "value": v} for (k, ell), v in sorted((bounds or {}).items())
        ]

    raw = {
        "m": m,
        "n": n,
        "properties": [list(members) for members in properties],
        "upper": entries(upper),
        "lower": entries(lower),
        "weights": weight_dict,
    }
    return validate_instance(raw, config)


def validate_ranking(inst: Instance, r: Ranking | Sequence[int]) -> IntArray:
    """Return the ranking as a 0-based item array, raising on shape errors."""
    items = r.as_array() if isinstance(r, Ranking) else np.asarray(r, dtype=np.int64)
    if items.ndim != 1 or items.size != inst.n:
        raise RankingShapeError(
            f"ranking has {items.size} positions, instance needs n={inst.n}",
            {"length": int(items.size), "n": inst.n},
        )
    bad = items[(items < 0) | (items >= inst.m)]
    if bad.size:
        raise RankingShapeError(
            f"item index out of range 1..{inst.m}: {int(bad[0]) + 1}",
            {"item": int(bad[0]) + 1, "m": inst.m},
        )
    uniq, counts = np.unique(items, return_counts=True)
    dup = uniq[counts > 1]
    if dup.size:
        raise RankingShapeError(
            f"duplicate item {int(dup[0]) + 1} in ranking", {"item": int(dup[0]) + 1}
        )
    return items


def ranking_value(inst: Instance, r: Ranking | Sequence[int]) -> float:
    """Sum of ``W[π(j), j]`` over the ranked positions.

    Examples:
        >>> W = [[(5 - i) * (5 - j) for j in range(1, 5)] for i in range(1, 5)]
        >>> inst = make_instance(4, 4, weights=W)
        >>> ranking_value(inst, Ranking.from_one_based([1, 3, 2, 4]))
        29.0
    """
    items = validate_ranking(inst, r)
    return float(np.sum(inst.weight_source.entries(items, np.arange(inst.n))))


def prefix_type_sums(inst: Instance, r: Ranking | Sequence[int]) -> IntArray:
    """``(n, p)`` partial sums of type vectors: row k-1 counts each property in the top k."""
    items = validate_ranking(inst, r)
    sums = np.zeros((inst.n, inst.p), dtype=np.int64)
    for ell, members in enumerate(inst.properties):
        sums[:, ell] = np.cumsum(np.isin(items, members))
    return sums


def check_constraints(inst: Instance, r: Ranking | Sequence[int]) -> ConstraintReport:
    counts = prefix_type_sums(inst, r)
    U, L = inst.upper, inst.lower
    over = counts > U
    factors = np.ones(counts.shape, dtype=np.float64)
    np.divide(counts, U, out=factors, where=over & (U > 0))
    factors[over & (U == 0)] = np.inf
    return ConstraintReport(
        counts=counts,
        slack=U - counts,
        deficit=np.maximum(L - counts, 0),
        factors=factors,
        lower=L,
        upper=U,
    )


def property_degrees(inst: Instance) -> IntArray:
    """Number of properties each item belongs to (``|T_i|``)."""
    if inst.p == 0:
        return np.zeros(inst.m, dtype=np.int64)
    return np.bincount(np.concatenate(inst.properties), minlength=inst.m).astype(np.int64)


def max_degree(inst: Instance) -> int:
    """Δ, computed without building type vectors."""
    return int(property_degrees(inst).max()) if inst.p else 0


def property_owner(inst: Instance) -> IntArray:
    """For Δ ≤ 1: the property of each item, with ``p`` marking property-free items.

    Raises:
        PreconditionError: when an item belongs to two properties.
    """
    degrees = property_degrees(inst)
    shared = np.flatnonzero(degrees > 1)
    if shared.size:
        item = int(shared[0])
        raise PreconditionError(
            f"item {item + 1} belongs to {int(degrees[item])} properties; Δ ≤ 1 required",
            {"item": item + 1, "delta": int(degrees.max())},
        )
    owner = np.full(inst.m, inst.p, dtype=np.int64)
    for ell, members in enumerate(inst.properties):
        owner[members] = ell
    return owner


def type_profile(inst: Instance) -> TypeProfile:
    """Group items by their property set.

    Examples:
        >>> inst = make_instance(4, 2, [[1, 2], [2, 3]], weights=[[1, 1]] * 4)
        >>> prof = type_profile(inst)
        >>> prof.delta, prof.q
        (2, 4)
    """
    m, p = inst.m, inst.p
    vectors = np.zeros((m, p), dtype=np.bool_)
    for ell, members in enumerate(inst.properties):
        vectors[members, ell] = True
    vectors.setflags(write=False)

    packed = np.packbits(vectors, axis=1) if p else np.zeros((m, 0), dtype=np.uint8)
    index: dict[bytes, int] = {}
    types: list[tuple[int, ...]] = []
    item_class = np.empty(m, dtype=np.int64)
    for i in range(m):
        key = packed[i].tobytes()
        c = index.get(key)
        if c is None:
            c = index[key] = len(types)
            types.append(tuple(int(x) for x in np.flatnonzero(vectors[i])))
        item_class[i] = c
    item_class.setflags(write=False)

    order = np.argsort(item_class, kind="stable")
    splits = np.cumsum(np.bincount(item_class, minlength=len(types)))[:-1]
    classes = tuple(readonly_ints(c) for c in np.split(order, splits))
    delta = int(vectors.sum(axis=1).max()) if p else 0
    return TypeProfile(
        vectors=vectors,
        item_class=item_class,
        distinct_types=tuple(types),
        classes=classes,
        delta=delta,
    )


def to_assignment_matrix(inst: Instance, r: Ranking | Sequence[int]) -> npt.NDArray[np.int8]:
    items = validate_ranking(inst, r)
    return Ranking(tuple(int(i) for i in items)).to_matrix(inst.m)


def ranking_from_assignment_matrix(inst: Instance, x: npt.ArrayLike) -> Ranking:
    arr = np.asarray(x)
    if arr.shape != (inst.m, inst.n):
        raise RankingShapeError(
            f"assignment matrix is {arr.shape}, expected ({inst.m}, {inst.n})",
            {"shape": list(arr.shape)},
        )
    r = Ranking.from_matrix(arr)
    validate_ranking(inst, r)
    return r


def summarize(inst: Instance) -> dict[str, Any]:
    """Headline numbers of an instance, 1-based where indices appear.

    ``lower_bounds`` refers to the normalized bounds; see ``validate_instance``.
    """
    prof = type_profile(inst)
    kind = (
        inst.weight_source.kind.value
        if isinstance(inst.weight_source, MetricSpec)
        else "explicit"
    )
    return {
        "m": inst.m,
        "n": inst.n,
        "p": inst.p,
        "delta": prof.delta,
        "q": prof.q,
        "property_sizes": [len(members) for members in inst.properties],
        "lower_bounds": inst.has_lower_bounds,
        "weights": kind,
    }


def require_monge(
    inst: Instance, config: SolverConfig | None = None, *, assume_monge: bool = False
) -> None:
    """Raise PreconditionError unless the value matrix is monotone Monge.

    Metric-derived matrices satisfy the condition by construction and are not
    materialized for the check; explicit matrices are checked in O(mn).
    """
    cfg = resolve_config(config)
    if assume_monge or not cfg.check_monge or isinstance(inst.weight_source, MetricSpec):
        return
    witness = check_monge(inst.weights, tolerance=cfg.monge_tolerance)
    if not witness.holds:
        raise PreconditionError(
            f"value matrix is not monotone Monge: {witness.describe()}",
            {
                "condition": str(witness.condition),
                "i1": witness.i1 + 1,
                "i2": witness.i2 + 1,
                "j1": witness.j1 + 1,
                "j2": witness.j2 + 1,
            },
        )
