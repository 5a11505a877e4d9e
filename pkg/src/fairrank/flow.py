"""Min-cost flow solver for disjoint properties (Δ ≤ 1) with lower and upper bounds.

Every property owns a chain ``ρ_n → ρ_{n-1} → … → ρ_0``. A unit of flow
enters a chain at ``ρ_n``, walks down and leaves through ``ρ_{k-1} → γ_k``,
which places one of the property's items at position k. Layer k (the arcs
``ρ_k → ρ_{k-1}``) carries the units placed in the top k, so its
multiplicity is ``U_k``. The r-th unit in layer k costs
``W[i_r, k+1] - W[i_r, k]`` with ``W[·, n+1] = 0``: summed down the chain this
telescopes to ``-W[i_r, k_r]``. The ``L_k`` cheapest units of a layer are made
mandatory by subtracting a dominating constant M.

Costs are scaled to integers (``2**flow_scale_bits``) before solving; the
network is acyclic, so initial potentials come from one topological pass and
each of the n augmentations is a Dijkstra run on reduced costs.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field

import numpy as np

from .config import SolverConfig, resolve_config
from .constraints import property_owner, ranking_value, require_monge
from .errors import FlowInvariantError, FlowOverflowError
from .models import Algorithm, Instance, Ranking, SolverResult

logger = logging.getLogger(__name__)

INFINITY = float("inf")


@dataclass
class Arc:
    """A bundle of parallel unit arcs sharing tail and head.

    ``costs`` is sorted ascending and flow always occupies a prefix of it, so
    the next forward unit costs ``costs[flow]`` and cancelling the last one
    refunds ``costs[flow - 1]``.
    """

    tail: int
    head: int
    costs: list[int]
    flow: int = 0
    mandatory: int = 0

    @property
    def capacity(self) -> int:
        return len(self.costs)


@dataclass
class Chain:
    prop: int | None
    items: list[int]
    lower: list[int]
    upper: list[int]


@dataclass
class FlowNetwork:
    """The layered network for one instance.

    Node ids: ``s = 0``, ``t = 1``, ``γ_k = 1 + k`` for k = 1..n, and
    ``ρ_{c,k} = 2 + n + c·(n+1) + k`` for chain c and k = 0..n. Chains follow
    property order; a trailing chain holds the property-free items if any.
    """

    n: int
    chains: list[Chain]
    scale: int
    big_m: int
    arcs: list[Arc] = field(default_factory=list)
    out_arcs: list[list[int]] = field(default_factory=list)
    in_arcs: list[list[int]] = field(default_factory=list)
    layers: dict[tuple[int, int], int] = field(default_factory=dict)
    exits: dict[tuple[int, int], int] = field(default_factory=dict)

    source: int = 0
    sink: int = 1

    @property
    def node_count(self) -> int:
        """``(n+1)·chains + n + 2``; one more chain than p when property-free items exist."""
        return 2 + self.n + len(self.chains) * (self.n + 1)

    @property
    def arc_count(self) -> int:
        """Unit arcs after expanding every bundle."""
        return sum(a.capacity for a in self.arcs)

    @property
    def mandatory_units(self) -> int:
        return sum(a.mandatory for a in self.arcs)

    def gamma(self, k: int) -> int:
        return 1 + k

    def rho(self, c: int, k: int) -> int:
        return 2 + self.n + c * (self.n + 1) + k

    def layer(self, c: int, k: int) -> Arc:
        """The bundle ``ρ_{c,k} → ρ_{c,k-1}`` (k is 1-based)."""
        return self.arcs[self.layers[(c, k)]]

    def exit_arc(self, c: int, k: int) -> Arc:
        """The arc ``ρ_{c,k-1} → γ_k``."""
        return self.arcs[self.exits[(c, k)]]

    def add_arc(self, tail: int, head: int, costs: list[int], mandatory: int = 0) -> int:
        if not self.out_arcs:
            self.out_arcs = [[] for _ in range(self.node_count)]
            self.in_arcs = [[] for _ in range(self.node_count)]
        idx = len(self.arcs)
        self.arcs.append(Arc(tail, head, costs, mandatory=mandatory))
        self.out_arcs[tail].append(idx)
        self.in_arcs[head].append(idx)
        return idx

    def topological_order(self) -> list[int]:
        order = [self.source]
        for c in range(len(self.chains)):
            order.extend(self.rho(c, k) for k in range(self.n, -1, -1))
        order.extend(self.gamma(k) for k in range(1, self.n + 1))
        order.append(self.sink)
        return order


@dataclass(frozen=True)
class FlowSolution:
    arc_flows: tuple[int, ...]
    flow_value: int
    cost: int
    ranking: Ranking | None
    mandatory_units: int
    mandatory_met: int
    reason: str | None = None

    @property
    def feasible(self) -> bool:
        return self.ranking is not None


def _chains(inst: Instance) -> list[Chain]:
    owner = property_owner(inst)
    n = inst.n
    ks = list(range(1, n + 1))
    chains = [
        Chain(
            prop=ell,
            items=[int(i) for i in members[:n]],
            lower=inst.lower[:, ell].tolist(),
            upper=inst.upper[:, ell].tolist(),
        )
        for ell, members in enumerate(inst.properties)
    ]
    free = np.flatnonzero(owner == inst.p)[:n]
    if free.size:
        chains.append(Chain(prop=None, items=[int(i) for i in free], lower=[0] * n, upper=ks))
    return chains


def build_network(inst: Instance, config: SolverConfig | None = None) -> FlowNetwork:
    """Construct the flow network of a Δ ≤ 1 instance.

    Raises:
        PreconditionError: when an item has two properties.
        FlowOverflowError: when ``n·M`` exceeds ``2**flow_overflow_bits``.
    """
    cfg = resolve_config(config)
    n = inst.n
    chains = _chains(inst)
    scale = 1 << cfg.flow_scale_bits
    used = sorted({i for chain in chains for i in chain.items})
    rows = inst.weight_source.entries(np.array(used)[:, None], np.arange(n)[None, :])
    scaled = np.rint(np.asarray(rows, dtype=np.float64) * scale)
    max_w = float(scaled.max()) if scaled.size else 0.0
    big_m = 1 + n * (int(max_w) + 1)
    if n * big_m > 1 << cfg.flow_overflow_bits:
        raise FlowOverflowError(
            f"scaled costs overflow: n·M = {n * big_m} exceeds 2^{cfg.flow_overflow_bits}",
            {"n": n, "big_m": big_m, "scale_bits": cfg.flow_scale_bits},
        )
    row_of = {item: r for r, item in enumerate(used)}
    w_int = [[int(v) for v in row] for row in scaled.astype(np.int64)]

    net = FlowNetwork(n=n, chains=chains, scale=scale, big_m=big_m)
    for c, chain in enumerate(chains):
        net.add_arc(net.source, net.rho(c, n), [0] * len(chain.items))
        for k in range(n, 0, -1):
            width = min(chain.upper[k - 1], len(chain.items))
            costs: list[int] = []
            for r in range(width):
                w = w_int[row_of[chain.items[r]]]
                after = w[k] if k < n else 0
                costs.append(after - w[k - 1])
            mandatory = min(chain.lower[k - 1], width)
            for r in range(mandatory):
                costs[r] -= big_m
            costs.sort()
            net.layers[(c, k)] = net.add_arc(net.rho(c, k), net.rho(c, k - 1), costs, mandatory)
            net.exits[(c, k)] = net.add_arc(net.rho(c, k - 1), net.gamma(k), [0])
    for k in range(1, n + 1):
        net.add_arc(net.gamma(k), net.sink, [0])
    logger.debug(
        "flow_network_built",
        extra={"nodes": net.node_count, "arcs": net.arc_count, "big_m": big_m},
    )
    return net


def _initial_potentials(net: FlowNetwork) -> list[float]:
    dist = [INFINITY] * net.node_count
    dist[net.source] = 0
    for u in net.topological_order():
        if dist[u] == INFINITY:
            continue
        for idx in net.out_arcs[u]:
            arc = net.arcs[idx]
            if arc.capacity and dist[u] + arc.costs[0] < dist[arc.head]:
                dist[arc.head] = dist[u] + arc.costs[0]
    return [d if d != INFINITY else 0 for d in dist]


def _dijkstra(
    net: FlowNetwork, potential: list[float]
) -> tuple[list[float], list[tuple[int, bool] | None]]:
    """Shortest reduced-cost distances from s; ``pred[v]`` is (arc index, forward?)."""
    dist = [INFINITY] * net.node_count
    pred: list[tuple[int, bool] | None] = [None] * net.node_count
    dist[net.source] = 0
    heap: list[tuple[float, int]] = [(0, net.source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for idx in net.out_arcs[u]:
            arc = net.arcs[idx]
            if arc.flow < arc.capacity:
                _relax(arc.costs[arc.flow], u, arc.head, idx, True, d, dist, pred, potential, heap)
        for idx in net.in_arcs[u]:
            arc = net.arcs[idx]
            if arc.flow > 0:
                cost = -arc.costs[arc.flow - 1]
                _relax(cost, u, arc.tail, idx, False, d, dist, pred, potential, heap)
    return dist, pred


def _relax(
    cost: int,
    u: int,
    v: int,
    idx: int,
    forward: bool,
    d: float,
    dist: list[float],
    pred: list[tuple[int, bool] | None],
    potential: list[float],
    heap: list[tuple[float, int]],
) -> None:
    reduced = cost + potential[u] - potential[v]
    if reduced < 0:
        raise FlowInvariantError(
            f"negative reduced cost {reduced} on arc {idx}",
            {"arc": idx, "reduced_cost": reduced},
        )
    if d + reduced < dist[v]:
        dist[v] = d + reduced
        pred[v] = (idx, forward)
        heapq.heappush(heap, (dist[v], v))


def _conserves_flow(net: FlowNetwork) -> bool:
    balance = [0] * net.node_count
    for arc in net.arcs:
        if not 0 <= arc.flow <= arc.capacity:
            return False
        balance[arc.tail] -= arc.flow
        balance[arc.head] += arc.flow
    return all(b == 0 for v, b in enumerate(balance) if v not in (net.source, net.sink))


def run_min_cost_flow(net: FlowNetwork) -> FlowSolution:
    """Send n units from s to t by successive shortest paths and read off the ranking."""
    potential = _initial_potentials(net)
    sent = 0
    for _ in range(net.n):
        dist, pred = _dijkstra(net, potential)
        if dist[net.sink] == INFINITY:
            break
        cap = dist[net.sink]
        for v in range(net.node_count):
            potential[v] += min(dist[v], cap)
        v = net.sink
        while v != net.source:
            step = pred[v]
            if step is None:
                raise FlowInvariantError(
                    f"augmenting path broken at node {v}", {"node": v, "units": sent}
                )
            idx, forward = step
            arc = net.arcs[idx]
            if forward:
                arc.flow += 1
                v = arc.tail
            else:
                arc.flow -= 1
                v = arc.head
        sent += 1
        if not _conserves_flow(net):
            raise FlowInvariantError(
                f"flow conservation broken after {sent} units", {"units": sent}
            )
        logger.debug("flow_augment", extra={"units": sent})

    cost = sum(sum(arc.costs[: arc.flow]) for arc in net.arcs)
    met = sum(min(arc.flow, arc.mandatory) for arc in net.arcs)
    reason: str | None = None
    if sent < net.n:
        reason = f"at most {sent} of {net.n} positions can be filled"
    else:
        reason = _unmet_lower_bound(net)
    return FlowSolution(
        arc_flows=tuple(arc.flow for arc in net.arcs),
        flow_value=sent,
        cost=cost,
        ranking=_extract_ranking(net) if reason is None else None,
        mandatory_units=net.mandatory_units,
        mandatory_met=met,
        reason=reason,
    )


def _unmet_lower_bound(net: FlowNetwork) -> str | None:
    for c, chain in enumerate(net.chains):
        for k in range(1, net.n + 1):
            need = chain.lower[k - 1]
            if need and net.layer(c, k).flow < need:
                label = chain.prop + 1 if chain.prop is not None else "free"
                return f"lower bound L_{{{k},{label}}}={need} cannot be met"
    return None


def _extract_ranking(net: FlowNetwork) -> Ranking:
    """Assign each chain's best items to its exit positions in increasing order."""
    placed = [-1] * net.n
    for c, chain in enumerate(net.chains):
        positions = [k for k in range(1, net.n + 1) if net.exit_arc(c, k).flow]
        for r, k in enumerate(positions):
            placed[k - 1] = chain.items[r]
    return Ranking(tuple(placed))


def recovered_value(net: FlowNetwork, solution: FlowSolution) -> float:
    """Ranking value implied by the flow cost.

    Chain costs telescope to ``-W·scale`` and every met mandatory unit adds
    ``-M``, so ``cost = -value·scale - M·met`` with ``met`` the mandatory units used.
    """
    return (-solution.cost - net.big_m * solution.mandatory_met) / net.scale


def solve_flow(
    inst: Instance, config: SolverConfig | None = None, *, assume_monge: bool = False
) -> SolverResult:
    """Exact optimum for Δ ≤ 1 with lower and upper bounds.

    Raises:
        PreconditionError: Δ > 1 or a non-Monge value matrix.
        FlowOverflowError: when the scaled Big-M costs do not fit.
        FlowInvariantError: when an augmentation meets a negative reduced cost.
    """
    cfg = resolve_config(config)
    net = build_network(inst, cfg)
    require_monge(inst, cfg, assume_monge=assume_monge)
    stats = {"nodes": net.node_count, "arcs": net.arc_count}

    for c, chain in enumerate(net.chains):
        for k in range(1, inst.n + 1):
            if chain.lower[k - 1] > net.layer(c, k).capacity:
                label = chain.prop + 1 if chain.prop is not None else "free"
                return SolverResult(
                    algorithm=Algorithm.FLOW,
                    ranking=None,
                    reason=f"lower bound L_{{{k},{label}}}={chain.lower[k - 1]} exceeds "
                    f"the {len(chain.items)} items available",
                    stuck_position=k - 1,
                    stats=stats,
                )

    solution = run_min_cost_flow(net)
    stats["augmentations"] = solution.flow_value
    if solution.ranking is None:
        logger.info("flow_infeasible", extra={"reason": solution.reason})
        return SolverResult(
            algorithm=Algorithm.FLOW, ranking=None, reason=solution.reason, stats=stats
        )
    value = ranking_value(inst, solution.ranking)
    logger.debug("flow_done", extra={"cost": solution.cost, "value": value})
    return SolverResult(
        algorithm=Algorithm.FLOW, ranking=solution.ranking, value=value, stats=stats
    )
