"""Exact greedy for disjoint properties (Δ ≤ 1) with upper bounds only.

Each position takes the smallest-index unpicked item whose property can
still grow. Within a property the candidates are always that property's
best remaining item, so only one queue head per property is examined and
a solve costs O(m + n·p).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .config import SolverConfig, resolve_config
from .constraints import property_owner, ranking_value, require_monge
from .errors import PreconditionError
from .models import Algorithm, Instance, IntArray, Ranking, SolverResult

logger = logging.getLogger(__name__)


@dataclass
class PropertyQueues:
    """Sorted candidate lists per property, the last one holding property-free items.

    Each list keeps only its n best (smallest-index) items; ``heads[ℓ]`` points
    at the next unpicked item and ``counts[ℓ]`` is the number already ranked.
    """

    queues: list[IntArray]
    heads: list[int] = field(default_factory=list)
    counts: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.heads:
            self.heads = [0] * len(self.queues)
        if not self.counts:
            self.counts = [0] * len(self.queues)

    @classmethod
    def build(cls, inst: Instance, owner: IntArray) -> PropertyQueues:
        n = inst.n
        queues = [members[:n] for members in inst.properties]
        queues.append(np.flatnonzero(owner == inst.p)[:n].astype(np.int64))
        return cls(queues=queues)

    def head(self, ell: int) -> int | None:
        q = self.queues[ell]
        h = self.heads[ell]
        return int(q[h]) if h < len(q) else None

    def pop(self, ell: int) -> int:
        item = int(self.queues[ell][self.heads[ell]])
        self.heads[ell] += 1
        self.counts[ell] += 1
        return item


def solve_greedy(
    inst: Instance, config: SolverConfig | None = None, *, assume_monge: bool = False
) -> SolverResult:
    """Optimal ranking for Δ ≤ 1 and upper bounds only.

    Args:
        inst: instance with disjoint properties and no lower bounds
        config: solver configuration (Monge checking switches)
        assume_monge: skip the O(mn) Monge check on explicit matrices

    Returns:
        ``SolverResult`` with the ranking and its value, or an infeasible
        verdict naming the first position no item can fill.
        ``stats["steps"]`` counts elementary queue operations.

    Raises:
        PreconditionError: Δ > 1, nonzero lower bounds, or a non-Monge matrix.
    """
    cfg = resolve_config(config)
    if inst.has_lower_bounds:
        raise PreconditionError(
            "greedy handles upper bounds only; use the flow solver for lower bounds",
            {"algorithm": Algorithm.GREEDY},
        )
    owner = property_owner(inst)
    require_monge(inst, cfg, assume_monge=assume_monge)

    queues = PropertyQueues.build(inst, owner)
    U = inst.upper.tolist()
    p = inst.p
    free = p
    steps = inst.m
    chosen: list[int] = []
    for j in range(inst.n):
        best_ell = -1
        best_item = inst.m
        row = U[j]
        for ell in range(p + 1):
            steps += 1
            item = queues.head(ell)
            if item is None or item >= best_item:
                continue
            if ell != free and queues.counts[ell] + 1 > row[ell]:
                continue
            best_ell, best_item = ell, item
        if best_ell < 0:
            logger.info("greedy_position_blocked", extra={"position": j + 1})
            return SolverResult(
                algorithm=Algorithm.GREEDY,
                ranking=None,
                reason=f"no admissible item for position {j + 1}",
                stuck_position=j,
                stats={"steps": steps},
            )
        chosen.append(queues.pop(best_ell))

    ranking = Ranking(tuple(chosen))
    value = ranking_value(inst, ranking)
    logger.debug("greedy_done", extra={"steps": steps, "value": value})
    return SolverResult(
        algorithm=Algorithm.GREEDY, ranking=ranking, value=value, stats={"steps": steps}
    )
