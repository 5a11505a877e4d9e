"""Error handling classes and exit code mapping for fairrank.

All fatal errors inherit from ``FairRankError`` so the CLI can map them to the
exit-code contract: 1 for input/config/solver failures, 2 when no ranking could
be produced (infeasible instance or a stuck completion phase), 3 when no
algorithm applies to the instance.
"""

from __future__ import annotations

import json
from typing import Any


class FairRankError(Exception):
    """Base exception for all fairrank errors."""

    category: str = "GENERAL"
    exit_code: int = 1
    error_code: str = "unhandled_exception"

    def __init__(self, message: str, context: dict[str, Any] | None = None) -> None:
        """Initialize error with message and optional context.

        Args:
            message: Human-readable error message
            context: Optional dictionary of context data (must be JSON-serializable)
        """
        super().__init__(message)
        self.message = message
        self.context = context or {}

    def to_dict(self) -> dict[str, Any]:
        return {
            "category": self.category,
            "code": self.error_code,
            "message": self.message,
            "context": self.context,
        }


class ConfigError(FairRankError):
    """CONFIG category errors."""

    category: str = "CONFIG"


class ConfigParseError(ConfigError):
    """YAML/JSON config file load failure."""

    error_code: str = "config_parse_error"


class ConfigInvalidValueError(ConfigError):
    """Value outside allowed domain."""

    error_code: str = "config_invalid_value"


class InputError(FairRankError):
    """INPUT category errors: instance, ranking and suite files."""

    category: str = "INPUT"


class InstanceFileError(InputError):
    """Instance or ranking file cannot be read or parsed."""

    error_code: str = "instance_file_error"


class InstanceValidationError(InputError):
    """Instance description violates the model invariants.

    ``context["errors"]`` lists every problem found, not just the first.
    """

    error_code: str = "instance_invalid"

    def __init__(self, errors: list[str], context: dict[str, Any] | None = None) -> None:
        self.errors = list(errors)
        ctx = {"errors": self.errors, **(context or {})}
        super().__init__("; ".join(self.errors) or "invalid instance", ctx)


class RankingShapeError(InputError):
    """Ranking has duplicates, wrong length or out-of-range items."""

    error_code: str = "ranking_shape"


class MetricSpecError(InputError):
    """Metric specification cannot produce a valid value matrix."""

    error_code: str = "metric_spec_invalid"


class GeneratorParamsError(InputError):
    """Generator or bench-suite parameters are inconsistent."""

    error_code: str = "generator_params_invalid"


class SuiteFileError(InputError):
    """Bench suite file cannot be read or does not match the suite schema."""

    error_code: str = "suite_file_invalid"


class SolverError(FairRankError):
    """SOLVER category errors: the requested algorithm cannot run."""

    category: str = "SOLVER"


class PreconditionError(SolverError):
    """Instance is outside the algorithm's regime (Δ, lower bounds, Monge)."""

    error_code: str = "precondition_failed"


class StateBudgetExceededError(SolverError):
    """Estimated DP state count exceeds the configured budget."""

    error_code: str = "state_budget_exceeded"


class EnumerationCapError(SolverError):
    """Exhaustive search would enumerate more assignments than allowed."""

    error_code: str = "enumeration_cap_exceeded"


class FlowOverflowError(SolverError):
    """Scaled Big-M costs do not fit the 64-bit range."""

    error_code: str = "flow_overflow"


class FlowInvariantError(SolverError):
    """Successive shortest paths reached a state its potentials rule out."""

    error_code: str = "flow_invariant_violated"


class InfeasibleError(FairRankError):
    """No ranking satisfies the fairness constraints (exit code 2)."""

    category: str = "RESULT"
    exit_code: int = 2
    error_code: str = "infeasible"


class CompletionError(FairRankError):
    """Approximation could not fill every position (exit code 2)."""

    category: str = "RESULT"
    exit_code: int = 2
    error_code: str = "completion_dead_end"


class NoApplicableAlgorithmError(FairRankError):
    """No solver covers the instance's regime (exit code 3)."""

    category: str = "DISPATCH"
    exit_code: int = 3
    error_code: str = "no_applicable_algorithm"


def format_error(error: FairRankError, *, debug_json_errors: bool = False) -> str:
    """Render an error for stderr, either as a plain line or as structured JSON."""
    if debug_json_errors:
        return json.dumps(error.to_dict())
    return f"Error: {error.message}"

