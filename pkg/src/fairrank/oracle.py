"""Exhaustive search over injective assignments.

This is the reference every other solver is measured against; it has no
scalability ambitions. Enumeration runs in lexicographic order of the
ranking, so the first optimum found is the lexicographically smallest one.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass

from .config import SolverConfig, resolve_config
from .errors import EnumerationCapError
from .models import Instance, Ranking

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleResult:
    ranking: Ranking | None
    value: float | None
    examined: int

    @property
    def feasible(self) -> bool:
        return self.ranking is not None


class PrefixSearch:
    """Depth-first enumeration of feasible rankings with prefix pruning.

    A partial ranking is extended only while every prefix satisfies its
    bounds, which is exact because every constraint is a prefix constraint.
    """

    def __init__(self, inst: Instance) -> None:
        self.inst = inst
        self.W = inst.weights.tolist()
        self.types: list[list[int]] = [[] for _ in range(inst.m)]
        for ell, members in enumerate(inst.properties):
            for i in members:
                self.types[int(i)].append(ell)
        self.U = inst.upper.tolist()
        self.L = inst.lower.tolist()
        self.lower_props = [ell for ell in range(inst.p) if int(inst.lower[:, ell].max()) > 0]

    def admissible(self, counts: list[int], item: int, j: int) -> bool:
        """Whether placing ``item`` at position ``j`` keeps prefix j+1 within bounds."""
        row_u = self.U[j]
        for ell in self.types[item]:
            if counts[ell] + 1 > row_u[ell]:
                return False
        row_l = self.L[j]
        for ell in self.lower_props:
            c = counts[ell] + (1 if ell in self.types[item] else 0)
            if c < row_l[ell]:
                return False
        return True

    def walk(self) -> Iterator[tuple[tuple[int, ...], float]]:
        """Yield every feasible ranking with its value, in lexicographic order."""
        m, n = self.inst.m, self.inst.n
        used = [False] * m
        chosen: list[int] = []
        counts = [0] * self.inst.p

        def extend(j: int, value: float) -> Iterator[tuple[tuple[int, ...], float]]:
            if j == n:
                yield tuple(chosen), value
                return
            for i in range(m):
                if used[i] or not self.admissible(counts, i, j):
                    continue
                used[i] = True
                chosen.append(i)
                for ell in self.types[i]:
                    counts[ell] += 1
                yield from extend(j + 1, value + self.W[i][j])
                for ell in self.types[i]:
                    counts[ell] -= 1
                chosen.pop()
                used[i] = False

        yield from extend(0, 0.0)

    def feasible(self, ranking: tuple[int, ...]) -> bool:
        counts = [0] * self.inst.p
        ok = True
        for j, i in enumerate(ranking):
            ok = self.admissible(counts, i, j) and ok
            for ell in self.types[i]:
                counts[ell] += 1
        return ok

    def walk_unpruned(self) -> Iterator[tuple[tuple[int, ...], float]]:
        """Same output as ``walk`` but checks whole permutations after the fact."""
        n = self.inst.n
        for perm in itertools.permutations(range(self.inst.m), n):
            if self.feasible(perm):
                yield perm, sum((self.W[i][j] for j, i in enumerate(perm)), 0.0)


def enumeration_size(inst: Instance) -> int:
    """Number of injective assignments, m·(m-1)·…·(m-n+1)."""
    return math.perm(inst.m, inst.n)


def brute_force_solve(
    inst: Instance, *, prune: bool = True, config: SolverConfig | None = None
) -> OracleResult:
    """Exact optimum by enumeration.

    Args:
        inst: instance to solve
        prune: cut partial rankings as soon as a prefix breaks a bound;
            ``False`` enumerates every permutation and filters afterwards
        config: ``oracle_cap`` bounds the enumeration size

    Raises:
        EnumerationCapError: when the falling factorial exceeds ``oracle_cap``.
    """
    cfg = resolve_config(config)
    size = enumeration_size(inst)
    if size > cfg.oracle_cap:
        raise EnumerationCapError(
            f"oracle would enumerate {size} assignments, above the cap of {cfg.oracle_cap}",
            {"assignments": size, "cap": cfg.oracle_cap},
        )

    search = PrefixSearch(inst)
    rankings = search.walk() if prune else search.walk_unpruned()
    best: tuple[int, ...] | None = None
    best_value = -math.inf
    examined = 0
    for ranking, value in rankings:
        examined += 1
        if best is None or value > best_value + cfg.value_tolerance:
            best, best_value = ranking, value

    logger.debug(
        "oracle_done", extra={"examined": examined, "prune": prune, "feasible": best is not None}
    )
    if best is None:
        return OracleResult(ranking=None, value=None, examined=examined)
    return OracleResult(ranking=Ranking(best), value=best_value, examined=examined)


def find_feasible(inst: Instance) -> Ranking | None:
    """The lexicographically first feasible ranking, or None.

    Stops at the first hit, so it is usually far cheaper than a full
    enumeration; the worst case is still exponential.
    """
    first = next(PrefixSearch(inst).walk(), None)
    return Ranking(first[0]) if first is not None else None
