"""Exact dynamic program over type-count tuples.

Items with the same property set are interchangeable up to value, and for a
monotone Monge matrix the best ranking uses each class as a prefix of its
sorted item list. A state is therefore the tuple ``(s_1, ..., s_q)`` of how
many items of each class fill the top ``k = Σ s_c`` positions, and the
property counts of that prefix are ``Σ s_c · v_c`` regardless of order.

The table is sparse: states that break a prefix bound are never created.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .config import SolverConfig, resolve_config
from .constraints import ranking_value, require_monge, type_profile
from .errors import StateBudgetExceededError
from .models import Algorithm, Instance, Ranking, SolverResult, TypeProfile

logger = logging.getLogger(__name__)

State = tuple[int, ...]


def estimate_states(sizes: tuple[int, ...], n: int) -> int:
    """Upper bound on the number of tuples with ``Σ s_c ≤ n`` and ``s_c ≤ sizes[c]``.

    The smaller of ``C(n+q, q)`` and ``Π (sizes[c] + 1)``.
    """
    q = len(sizes)
    return min(math.comb(n + q, q), math.prod(s + 1 for s in sizes))


@dataclass
class DPStateTable:
    """Back-pointers of every created state plus the values of the final level.

    ``back[s]`` is the class placed at the last filled position of the best
    ranking reaching ``s``; the all-zero state has no entry.
    """

    q: int
    class_items: list[list[int]]
    back: dict[State, int] = field(default_factory=dict)
    final: dict[State, float] = field(default_factory=dict)
    level_sizes: list[int] = field(default_factory=list)

    @property
    def states_created(self) -> int:
        return sum(self.level_sizes)

    @property
    def blocked_position(self) -> int | None:
        """0-based position at which no state survived, if the table dead-ended."""
        for k, size in enumerate(self.level_sizes):
            if size == 0:
                return k - 1
        return None

    def best_final(self, tolerance: float) -> tuple[State, float] | None:
        best: tuple[State, float] | None = None
        for state in sorted(self.final):
            value = self.final[state]
            if best is None or value > best[1] + tolerance:
                best = (state, value)
        return best

    def reconstruct(self, state: State) -> Ranking:
        counts = list(state)
        items: list[int] = []
        for _ in range(sum(state)):
            c = self.back[tuple(counts)]
            counts[c] -= 1
            items.append(self.class_items[c][counts[c]])
        items.reverse()
        return Ranking(tuple(items))


def build_table(
    inst: Instance, profile: TypeProfile, config: SolverConfig | None = None
) -> DPStateTable:
    """Fill the table level by level, k = 0..n."""
    cfg = resolve_config(config)
    n, p = inst.n, inst.p
    tol = cfg.value_tolerance
    class_items = [[int(i) for i in members[:n]] for members in profile.classes]
    sizes = [len(c) for c in class_items]
    q = len(class_items)
    types = [list(t) for t in profile.distinct_types]
    W = inst.weights
    rows = [[W[i].tolist() for i in items] for items in class_items]
    U = inst.upper.tolist()
    L = inst.lower.tolist()
    lower_props = [ell for ell in range(p) if int(inst.lower[:, ell].max()) > 0]

    table = DPStateTable(q=q, class_items=class_items)
    zero: State = (0,) * q
    level: dict[State, tuple[float, tuple[int, ...]]] = {zero: (0.0, (0,) * p)}
    table.level_sizes.append(1)

    for k in range(n):
        nxt: dict[State, tuple[float, tuple[int, ...]]] = {}
        row_u, row_l = U[k], L[k]
        for state, (value, counts) in level.items():
            for c in range(q):
                s_c = state[c]
                if s_c >= sizes[c]:
                    continue
                if any(counts[ell] + 1 > row_u[ell] for ell in types[c]):
                    continue
                new_counts = list(counts)
                for ell in types[c]:
                    new_counts[ell] += 1
                if any(new_counts[ell] < row_l[ell] for ell in lower_props):
                    continue
                new_state = state[:c] + (s_c + 1,) + state[c + 1 :]
                new_value = value + rows[c][s_c][k]
                current = nxt.get(new_state)
                if current is None:
                    nxt[new_state] = (new_value, tuple(new_counts))
                    table.back[new_state] = c
                elif new_value > current[0] + tol or (
                    new_value >= current[0] - tol and c < table.back[new_state]
                ):
                    nxt[new_state] = (new_value, current[1])
                    table.back[new_state] = c
        table.level_sizes.append(len(nxt))
        logger.debug("dp_level_done", extra={"k": k + 1, "states": len(nxt)})
        level = nxt
        if not level:
            break

    if len(table.level_sizes) == n + 1:
        table.final = {state: value for state, (value, _) in level.items()}
    return table


def solve_dp(
    inst: Instance, config: SolverConfig | None = None, *, assume_monge: bool = False
) -> SolverResult:
    """Exact optimum under lower and upper bounds for any Δ, when q is small.

    Raises:
        StateBudgetExceededError: when the estimated state count exceeds
            ``dp_state_budget``.
        PreconditionError: when the value matrix is not monotone Monge.
    """
    cfg = resolve_config(config)
    profile = type_profile(inst)
    sizes = tuple(min(s, inst.n) for s in profile.class_sizes)
    estimate = estimate_states(sizes, inst.n)
    if estimate > cfg.dp_state_budget:
        raise StateBudgetExceededError(
            f"dynamic program needs up to {estimate} states (q={profile.q}), "
            f"above the budget of {cfg.dp_state_budget}",
            {"estimate": estimate, "q": profile.q, "budget": cfg.dp_state_budget},
        )
    require_monge(inst, cfg, assume_monge=assume_monge)

    table = build_table(inst, profile, cfg)
    stats = {"states": table.states_created, "estimate": estimate, "q": profile.q}
    best = table.best_final(cfg.value_tolerance)
    if best is None:
        blocked = table.blocked_position
        stuck = blocked if blocked is not None else inst.n - 1
        return SolverResult(
            algorithm=Algorithm.DP,
            ranking=None,
            reason=f"no feasible prefix of length {stuck + 1}",
            stuck_position=stuck,
            stats=stats,
        )
    ranking = table.reconstruct(best[0])
    value = ranking_value(inst, ranking)
    logger.debug("dp_done", extra={"states": table.states_created, "value": value})
    return SolverResult(algorithm=Algorithm.DP, ranking=ranking, value=value, stats=stats)
