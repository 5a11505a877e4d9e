"""Algorithm selection and the load → solve → write orchestration behind the CLI.

The automatic choice follows the regime each solver covers:

1. Δ ≤ 1 and no lower bounds: greedy
2. Δ ≤ 1 with lower bounds: min-cost flow
3. small type-count state space: dynamic program
4. upper bounds only: (Δ+2)-approximation

Anything else has no applicable algorithm.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .approx import solve_approx
from .config import SolverConfig, resolve_config
from .constraints import check_constraints, max_degree, ranking_value, summarize, type_profile
from .dp import estimate_states, solve_dp
from .errors import InfeasibleError, NoApplicableAlgorithmError, PreconditionError
from .feasibility import abundance_check
from .flow import solve_flow
from .formats import dump_solution, load_instance, load_ranking
from .greedy import solve_greedy
from .models import Algorithm, Guarantee, Instance, SolverResult, SolveReport
from .oracle import brute_force_solve

logger = logging.getLogger(__name__)

AUTO = "auto"
ALGORITHMS = (
    AUTO,
    Algorithm.GREEDY,
    Algorithm.DP,
    Algorithm.FLOW,
    Algorithm.APPROX,
    Algorithm.ORACLE,
)

ExactSolver = Callable[..., SolverResult]

_EXACT: dict[str, ExactSolver] = {
    Algorithm.GREEDY: solve_greedy,
    Algorithm.DP: solve_dp,
    Algorithm.FLOW: solve_flow,
}


def dp_state_estimate(inst: Instance) -> int:
    profile = type_profile(inst)
    sizes = tuple(min(s, inst.n) for s in profile.class_sizes)
    return estimate_states(sizes, inst.n)


def select_algorithm(inst: Instance, config: SolverConfig | None = None) -> str:
    """Pick the solver for ``--algo auto``.

    Raises:
        NoApplicableAlgorithmError: Δ > 1, too many DP states and lower bounds present.
    """
    cfg = resolve_config(config)
    delta = max_degree(inst)
    if delta <= 1:
        return Algorithm.FLOW if inst.has_lower_bounds else Algorithm.GREEDY
    estimate = dp_state_estimate(inst)
    if estimate <= min(cfg.dp_auto_state_limit, cfg.dp_state_budget):
        return Algorithm.DP
    if not inst.has_lower_bounds:
        return Algorithm.APPROX
    raise NoApplicableAlgorithmError(
        f"no applicable algorithm: Δ={delta}, lower bounds present and the dynamic "
        f"program needs up to {estimate} states (limit {cfg.dp_auto_state_limit})",
        {"delta": delta, "estimate": estimate, "limit": cfg.dp_auto_state_limit},
    )


def _infeasible(algorithm: str, reason: str | None, stuck: int | None) -> InfeasibleError:
    context: dict[str, Any] = {"algorithm": algorithm}
    if stuck is not None:
        context["position"] = stuck + 1
    return InfeasibleError(f"infeasible: {reason or 'no feasible ranking exists'}", context)


def solve(
    inst: Instance,
    algorithm: str = AUTO,
    config: SolverConfig | None = None,
    *,
    assume_monge: bool = False,
) -> SolveReport:
    """Run one solver and package its answer with constraint diagnostics.

    Args:
        inst: validated instance
        algorithm: one of ``ALGORITHMS``
        config: solver configuration
        assume_monge: skip the Monge check on explicit matrices

    Returns:
        ``SolveReport`` with the ranking, its value, the guarantee and timing.

    Raises:
        InfeasibleError: the solver proved no feasible ranking exists.
        CompletionError: the approximation dead-ended while filling positions.
        NoApplicableAlgorithmError: ``auto`` found no solver for the regime.
        PreconditionError: an unknown algorithm name, or the chosen solver's
            preconditions fail.
    """
    cfg = resolve_config(config)
    algo = select_algorithm(inst, cfg) if algorithm == AUTO else algorithm
    if algo not in ALGORITHMS:
        raise PreconditionError(
            f"unknown algorithm {algorithm!r}; choose one of {', '.join(ALGORITHMS)}",
            {"algorithm": algorithm},
        )
    logger.info("solve_started", extra={"algorithm": algo, "m": inst.m, "n": inst.n})

    start = time.perf_counter()
    guarantee = Guarantee.EXACT
    if algo == Algorithm.APPROX:
        approx = solve_approx(inst, cfg)
        ranking, value = approx.ranking, approx.value
        constraints = approx.constraints
        guarantee = approx.guarantee
        stats = {"phase1_cells": len(approx.phase1_cells), "filled": len(approx.fill_order)}
    elif algo == Algorithm.ORACLE:
        found = brute_force_solve(inst, config=cfg)
        if found.ranking is None:
            raise _infeasible(algo, None, None)
        ranking = found.ranking
        value = ranking_value(inst, ranking)
        constraints = check_constraints(inst, ranking)
        stats = {"examined": found.examined}
    else:
        result = _EXACT[algo](inst, cfg, assume_monge=assume_monge)
        if result.ranking is None:
            raise _infeasible(algo, result.reason, result.stuck_position)
        ranking = result.ranking
        value = result.value if result.value is not None else ranking_value(inst, ranking)
        constraints = check_constraints(inst, ranking)
        stats = dict(result.stats)
    runtime_ms = (time.perf_counter() - start) * 1000.0

    logger.info(
        "solve_finished",
        extra={"algorithm": algo, "value": value, "runtime_ms": round(runtime_ms, 3)},
    )
    return SolveReport(
        ranking=ranking,
        value=value,
        algorithm=algo,
        guarantee=guarantee,
        constraints=constraints,
        runtime_ms=runtime_ms,
        stats=stats,
    )


def run_solve(
    instance_path: Path,
    algorithm: str,
    config: SolverConfig,
    *,
    output: Path | None = None,
) -> SolveReport:
    """Load an instance file, solve it and write the solution file when asked."""
    logger.info(f"Step 1: Loading instance {instance_path}...")
    inst = load_instance(instance_path, config)

    logger.info(f"Step 2: Solving with algorithm={algorithm}...")
    report = solve(inst, algorithm, config)

    if output is not None:
        logger.info(f"Step 3: Writing solution to {output}...")
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(dump_solution(report), encoding="utf-8")
    return report


def _finite(factor: float) -> float | None:
    """JSON has no infinity; a violated zero bound is reported as null."""
    return None if math.isinf(factor) else factor


@dataclass(frozen=True)
class CheckOutcome:
    feasible: bool
    payload: dict[str, Any]


def run_check(instance_path: Path, ranking_path: Path, config: SolverConfig) -> CheckOutcome:
    """Evaluate a ranking file against an instance file."""
    inst = load_instance(instance_path, config)
    ranking = load_ranking(ranking_path)
    report = check_constraints(inst, ranking)
    payload = {
        "value": ranking_value(inst, ranking),
        "feasible": report.feasible,
        "max_violation_factor": _finite(report.max_violation_factor),
        "violations": [
            {**v.to_dict(), "factor": _finite(v.factor)} for v in report.violations()
        ],
    }
    return CheckOutcome(feasible=report.feasible, payload=payload)


def run_info(instance_path: Path, config: SolverConfig) -> dict[str, Any]:
    """Summary, type profile and abundance report of an instance file.

    Everything is computed on the normalized bounds: an unspecified ``U[k]`` is
    ``min(k, U[k+1])`` and an unspecified ``L[k]`` is ``L[k-1]``, not the bare
    ``U = k`` and ``L = 0``. The abundance growing sets therefore reflect the
    envelope of the bounds that were given.
    """
    inst = load_instance(instance_path, config)
    info = summarize(inst)
    info["abundance"] = abundance_check(inst).to_dict()
    try:
        info["auto_algorithm"] = select_algorithm(inst, config)
    except NoApplicableAlgorithmError:
        info["auto_algorithm"] = None
    info["dp_state_estimate"] = dp_state_estimate(inst)
    return info
