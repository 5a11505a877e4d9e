"""Abundance-of-items sufficient condition and exact feasibility for small instances."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from .config import SolverConfig, resolve_config
from .errors import EnumerationCapError
from .models import Instance, Ranking
from .oracle import find_feasible

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AbundanceReport:
    """Per position k: the growing properties ``S_k`` and the items whose type fits in it.

    ``growing[k]`` holds 0-based property indices ℓ with ``U[k-1, ℓ] + 1 <= U[k, ℓ]``
    (``U`` before the first position is 0).
    """

    n: int
    growing: tuple[frozenset[int], ...]
    counts: tuple[int, ...]
    warnings: tuple[str, ...] = ()

    @property
    def satisfied(self) -> bool:
        return min(self.counts) >= self.n

    @property
    def first_short_position(self) -> int | None:
        """0-based first position whose count falls below n, if any."""
        for k, c in enumerate(self.counts):
            if c < self.n:
                return k
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "satisfied": self.satisfied,
            "positions": [
                {"k": k + 1, "growing": sorted(ell + 1 for ell in s), "count": c}
                for k, (s, c) in enumerate(zip(self.growing, self.counts, strict=True))
            ],
            "warnings": list(self.warnings),
        }


def abundance_check(inst: Instance) -> AbundanceReport:
    """Evaluate the abundance condition on the upper bounds.

    Satisfied means that for every position k at least n items have all their
    properties among those whose bound grows at k; a feasible ranking then
    exists. Lower bounds play no part; when present they are reported as a
    warning.
    """
    warnings: list[str] = []
    if inst.has_lower_bounds:
        warnings.append("lower bounds are ignored by the abundance condition")
        logger.warning("abundance_lower_bounds_ignored", extra={"p": inst.p})

    U = inst.upper
    before = np.vstack([np.zeros((1, inst.p), dtype=np.int64), U[:-1]])
    grows = before + 1 <= U

    growing: list[frozenset[int]] = []
    counts: list[int] = []
    for k in range(inst.n):
        blocked = np.zeros(inst.m, dtype=np.bool_)
        for ell in np.flatnonzero(~grows[k]):
            blocked[inst.properties[int(ell)]] = True
        growing.append(frozenset(int(ell) for ell in np.flatnonzero(grows[k])))
        counts.append(int(inst.m - blocked.sum()))

    report = AbundanceReport(
        n=inst.n, growing=tuple(growing), counts=tuple(counts), warnings=tuple(warnings)
    )
    logger.debug(
        "abundance_checked",
        extra={"satisfied": report.satisfied, "min_count": min(counts)},
    )
    return report


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: Ranking | None = None


def feasibility_exact(inst: Instance, config: SolverConfig | None = None) -> FeasibilityResult:
    """Decide feasibility by exhaustive search (small m only).

    Raises:
        EnumerationCapError: when m exceeds ``feasibility_item_cap``.
    """
    cfg = resolve_config(config)
    if inst.m > cfg.feasibility_item_cap:
        raise EnumerationCapError(
            f"exact feasibility is limited to m ≤ {cfg.feasibility_item_cap}, got m={inst.m}",
            {"m": inst.m, "cap": cfg.feasibility_item_cap},
        )
    witness = find_feasible(inst)
    return FeasibilityResult(feasible=witness is not None, witness=witness)
