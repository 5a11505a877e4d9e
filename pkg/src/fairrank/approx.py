"""(Δ+2)-approximation for overlapping properties with upper bounds only.

Phase 1 scans all cells (i, j) by decreasing weight and keeps a cell when its
row and column are free and every prefix bound still holds. Phase 2 fills
the remaining positions in increasing order with the smallest free item
that fits the bounds when counted against phase-2 placements alone. The
two layers each respect U, so the final ranking exceeds any bound by at most
a factor of 2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .config import SolverConfig, resolve_config
from .constraints import check_constraints, max_degree, ranking_value
from .errors import CompletionError, PreconditionError
from .feasibility import abundance_check
from .models import Algorithm, BoolArray, ConstraintReport, Guarantee, Instance, IntArray, Ranking

logger = logging.getLogger(__name__)


def _item_types(inst: Instance) -> list[list[int]]:
    types: list[list[int]] = [[] for _ in range(inst.m)]
    for ell, members in enumerate(inst.properties):
        for i in members:
            types[int(i)].append(ell)
    return types


@dataclass
class PrefixCounter:
    """Per-(k, ℓ) counts of placed items among the top k, for one layer of placements."""

    upper: IntArray
    counts: IntArray = field(init=False)

    def __post_init__(self) -> None:
        self.counts = np.zeros(self.upper.shape, dtype=np.int64)

    def fits(self, props: list[int], j: int) -> bool:
        """Whether one more item with properties ``props`` at position ``j`` keeps every bound."""
        return all(np.all(self.counts[j:, ell] < self.upper[j:, ell]) for ell in props)

    def add(self, props: list[int], j: int) -> None:
        for ell in props:
            self.counts[j:, ell] += 1


@dataclass
class PartialAssignment:
    """Phase-1 result: admitted cells plus the rows and columns left over."""

    cells: list[tuple[int, int]]
    counter: PrefixCounter
    row_used: BoolArray
    col_used: BoolArray

    @property
    def free_items(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(~self.row_used)]

    @property
    def open_positions(self) -> list[int]:
        return [int(j) for j in np.flatnonzero(~self.col_used)]

    def prefix_counts(self) -> IntArray:
        return self.counter.counts


@dataclass(frozen=True)
class ApproxReport:
    ranking: Ranking
    value: float
    delta: int
    constraints: ConstraintReport
    phase1_cells: tuple[tuple[int, int], ...]
    fill_order: tuple[tuple[int, int], ...]
    abundance_satisfied: bool
    warnings: tuple[str, ...] = ()

    @property
    def guarantee_factor(self) -> int:
        return self.delta + 2

    @property
    def guarantee(self) -> str:
        return Guarantee.APPROX

    @property
    def max_violation_factor(self) -> float:
        return self.constraints.max_violation_factor


def greedy_cells(inst: Instance, types: list[list[int]] | None = None) -> PartialAssignment:
    """Phase 1: admit cells by decreasing weight while every bound holds.

    Ties in weight go to the smaller item, then the smaller position.
    """
    types = types if types is not None else _item_types(inst)
    m, n = inst.m, inst.n
    W = inst.weights
    order = np.argsort(-W.ravel(), kind="stable")
    counter = PrefixCounter(inst.upper)
    row_used = np.zeros(m, dtype=np.bool_)
    col_used = np.zeros(n, dtype=np.bool_)
    cells: list[tuple[int, int]] = []
    for flat in order:
        i, j = divmod(int(flat), n)
        if row_used[i] or col_used[j] or not counter.fits(types[i], j):
            continue
        counter.add(types[i], j)
        row_used[i] = col_used[j] = True
        cells.append((i, j))
        if len(cells) == n:
            break
    logger.debug("approx_phase1_done", extra={"cells": len(cells)})
    return PartialAssignment(cells=cells, counter=counter, row_used=row_used, col_used=col_used)


def complete(
    inst: Instance, partial: PartialAssignment, types: list[list[int]] | None = None
) -> list[tuple[int, int]]:
    """Phase 2: fill open positions against a fresh counter; returns (position, item) pairs.

    Raises:
        CompletionError: when some open position has no admissible free item.
    """
    types = types if types is not None else _item_types(inst)
    layer = PrefixCounter(inst.upper)
    free = partial.free_items
    fills: list[tuple[int, int]] = []
    for j in partial.open_positions:
        pick = next((i for i in free if layer.fits(types[i], j)), None)
        if pick is None:
            raise CompletionError(
                f"no admissible item for position {j + 1} while completing the ranking",
                {"position": j + 1, "filled": inst.n - len(partial.open_positions) + len(fills)},
            )
        layer.add(types[pick], j)
        free.remove(pick)
        fills.append((j, pick))
        logger.debug("approx_phase2_fill", extra={"position": j + 1, "item": pick + 1})
    return fills


def solve_approx(inst: Instance, config: SolverConfig | None = None) -> ApproxReport:
    """Two-phase approximation; value ≥ OPT/(Δ+2) and prefix counts ≤ 2·U.

    Raises:
        PreconditionError: when lower bounds are present or m·n exceeds
            ``explicit_cell_limit``.
        CompletionError: when phase 2 dead-ends (only possible without abundance).
    """
    cfg = resolve_config(config)
    if inst.m * inst.n > cfg.explicit_cell_limit:
        raise PreconditionError(
            f"the approximation scans all {inst.m * inst.n} cells, above the limit of "
            f"{cfg.explicit_cell_limit}",
            {"algorithm": Algorithm.APPROX, "cells": inst.m * inst.n},
        )
    if inst.has_lower_bounds:
        raise PreconditionError(
            "the approximation handles upper bounds only",
            {"algorithm": Algorithm.APPROX},
        )
    warnings: list[str] = []
    abundance = abundance_check(inst)
    if not abundance.satisfied:
        short = abundance.first_short_position
        warnings.append(
            f"abundance condition fails at position {(short or 0) + 1}; completion may fail"
        )
        logger.warning("approx_abundance_fails", extra={"position": (short or 0) + 1})

    types = _item_types(inst)
    partial = greedy_cells(inst, types)
    fills = complete(inst, partial, types)

    placed = [-1] * inst.n
    for i, j in partial.cells:
        placed[j] = i
    for j, i in fills:
        placed[j] = i
    ranking = Ranking(tuple(placed))
    report = ApproxReport(
        ranking=ranking,
        value=ranking_value(inst, ranking),
        delta=max_degree(inst),
        constraints=check_constraints(inst, ranking),
        phase1_cells=tuple(partial.cells),
        fill_order=tuple(fills),
        abundance_satisfied=abundance.satisfied,
        warnings=tuple(warnings),
    )
    logger.debug(
        "approx_done",
        extra={"value": report.value, "max_factor": report.max_violation_factor},
    )
    return report
