"""JSON file formats: instance files, solution files and ranking files.

Item, position, prefix and property indices are 1-based in every file and
0-based once loaded. Unknown keys are rejected so that typos in hand-written
instances surface as errors instead of silently vanishing constraints.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import TYPE_CHECKING, Annotated, Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .errors import InstanceFileError, RankingShapeError
from .models import Ranking

if TYPE_CHECKING:
    from .config import SolverConfig
    from .models import Instance, SolveReport


class BoundEntry(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    k: int
    prop: int = Field(alias="l")
    value: int


class ExplicitWeightsModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["explicit"]
    matrix: list[list[float]]


class MetricWeightsModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["rank1", "dcg", "bradley_terry", "footrule", "rho"]
    qualities: list[float]
    discount: list[float] | None = None


WeightsModel = Annotated[ExplicitWeightsModel | MetricWeightsModel, Field(discriminator="kind")]


class InstanceFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    m: int
    n: int
    properties: list[list[int]] = Field(default_factory=list)
    lower: list[BoundEntry] = Field(default_factory=list)
    upper: list[BoundEntry] = Field(default_factory=list)
    weights: WeightsModel


class ViolationEntry(BaseModel):
    """One broken prefix bound; ``factor`` is ``None`` when the bound is 0."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    k: int
    prop: int = Field(alias="l")
    count: int
    bound: int
    factor: float | None


class SolutionFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    ranking: list[int]
    value: float
    algorithm: str
    guarantee: Literal["exact", "(Δ+2)-approx"]
    violations: list[ViolationEntry] = Field(default_factory=list)
    runtime_ms: float


def read_json(path: Path) -> Any:
    """Read a JSON document, mapping I/O and syntax failures to InstanceFileError."""
    if not path.exists():
        raise InstanceFileError(f"File not found: {path}", {"path": str(path)})
    if not path.is_file():
        raise InstanceFileError(f"Path is not a file: {path}", {"path": str(path)})
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InstanceFileError(
            f"Invalid JSON in {path}: {e}", {"path": str(path), "error": str(e)}
        ) from e
    except OSError as e:
        raise InstanceFileError(
            f"Cannot read {path}: {e}", {"path": str(path), "error": str(e)}
        ) from e


def instance_to_file(inst: Instance) -> InstanceFile:
    """Serialize an instance, keeping only bounds that differ from their defaults.

    Defaults are ``L = 0`` and ``U = k``; envelope-derived entries are written
    out, which makes loading the result reproduce the same dense bounds.
    """
    ks = np.arange(1, inst.n + 1)
    upper = [
        BoundEntry(k=int(k) + 1, prop=int(ell) + 1, value=int(inst.upper[k, ell]))
        for k, ell in np.argwhere(inst.upper != ks[:, None])
    ]
    lower = [
        BoundEntry(k=int(k) + 1, prop=int(ell) + 1, value=int(inst.lower[k, ell]))
        for k, ell in np.argwhere(inst.lower != 0)
    ]
    # argwhere walks row-major (k first); files group bounds by property
    upper.sort(key=lambda b: (b.prop, b.k))
    lower.sort(key=lambda b: (b.prop, b.k))
    return InstanceFile.model_validate(
        {
            "m": inst.m,
            "n": inst.n,
            "properties": [[int(i) + 1 for i in members] for members in inst.properties],
            "lower": [b.model_dump(by_alias=True) for b in lower],
            "upper": [b.model_dump(by_alias=True) for b in upper],
            "weights": inst.weight_source.to_dict(),
        }
    )


def dump_instance(inst: Instance) -> str:
    data = instance_to_file(inst).model_dump(by_alias=True, exclude_none=True)
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def write_instance(inst: Instance, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_instance(inst), encoding="utf-8")
    return path


def load_instance(path: Path, config: SolverConfig | None = None) -> Instance:
    from .constraints import validate_instance

    return validate_instance(read_json(path), config)


def solution_from_report(report: SolveReport) -> SolutionFile:
    violations = [
        ViolationEntry(
            k=v.k + 1,
            prop=v.prop + 1,
            count=v.count,
            bound=v.upper,
            factor=None if math.isinf(v.factor) else v.factor,
        )
        for v in report.violations()
        if v.factor > 1.0
    ]
    return SolutionFile(
        ranking=report.ranking.one_based(),
        value=report.value,
        algorithm=report.algorithm,
        guarantee=report.guarantee,  # type: ignore[arg-type]
        violations=violations,
        runtime_ms=report.runtime_ms,
    )


def dump_solution(report: SolveReport) -> str:
    data = solution_from_report(report).model_dump(by_alias=True)
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def load_ranking(path: Path) -> Ranking:
    """Load a ranking file.

    Accepted shapes: a bare list of 1-based items, a solution file (its
    ``ranking`` key is used), or ``{"matrix": [[...]]}`` holding the m×n 0/1
    assignment matrix.
    """
    data = read_json(path)
    if isinstance(data, dict) and "matrix" in data:
        return Ranking.from_matrix(data["matrix"])
    items = data.get("ranking") if isinstance(data, dict) else data
    if not isinstance(items, list) or not all(
        isinstance(i, int) and not isinstance(i, bool) for i in items
    ):
        raise RankingShapeError(
            f"{path} does not hold a list of 1-based item indices", {"path": str(path)}
        )
    return Ranking.from_one_based(items)
