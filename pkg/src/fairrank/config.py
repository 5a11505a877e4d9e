from __future__ import annotations

import json
import os
import pathlib

import yaml
from pydantic import BaseModel, ValidationError, field_validator

STATE_BUDGET_ENV = "FAIRRANK_STATE_BUDGET"


class SolverConfig(BaseModel):
    # Exhaustive search limits
    oracle_cap: int = 10**7
    feasibility_item_cap: int = 10
    # Dynamic program state limits: hard reject vs. auto-dispatch preference
    dp_state_budget: int = 10**8
    dp_auto_state_limit: int = 10**6
    # Min-cost flow integer scaling
    flow_scale_bits: int = 20
    flow_overflow_bits: int = 62
    # Dense explicit matrices above this many cells must use a metric spec
    explicit_cell_limit: int = 10**7
    value_tolerance: float = 1e-9
    monge_tolerance: float = 1e-9
    check_monge: bool = True

    @field_validator(
        "oracle_cap",
        "feasibility_item_cap",
        "dp_state_budget",
        "dp_auto_state_limit",
        "flow_scale_bits",
        "flow_overflow_bits",
        "explicit_cell_limit",
    )
    @classmethod
    def validate_positive(cls, v: int) -> int:
        """Caps and bit widths must be positive."""
        if v <= 0:
            raise ValueError(f"Limit must be positive, got {v}")
        return v

    @field_validator("value_tolerance", "monge_tolerance")
    @classmethod
    def validate_tolerance(cls, v: float) -> float:
        """Tolerances live in [0, 1)."""
        if not 0.0 <= v < 1.0:
            raise ValueError(f"Tolerance must be in [0, 1), got {v}")
        return v

    @classmethod
    def from_file(cls, path: str) -> SolverConfig:
        from .errors import ConfigParseError

        p = pathlib.Path(path)
        if not p.exists():
            raise ConfigParseError(f"Config file not found: {path}", {"path": path})

        try:
            text = p.read_text(encoding="utf-8")
            if p.suffix.lower() in {".yaml", ".yml"}:
                data = yaml.safe_load(text) or {}
            else:
                data = json.loads(text)
            return cls(**data)
        except (yaml.YAMLError, json.JSONDecodeError) as e:
            raise ConfigParseError(
                f"Failed to parse config file: {e}", {"path": path, "error": str(e)}
            ) from e
        except Exception as e:
            raise ConfigParseError(
                f"Unexpected error loading config: {e}", {"path": path, "error": str(e)}
            ) from e

    @classmethod
    def from_env(cls, base: SolverConfig | None = None) -> SolverConfig:
        """Apply environment overrides (currently ``FAIRRANK_STATE_BUDGET``) on top of base."""
        from .errors import ConfigInvalidValueError

        cfg = base or cls()
        raw = os.environ.get(STATE_BUDGET_ENV)
        if raw is None or not raw.strip():
            return cfg
        try:
            budget = cls(dp_state_budget=int(raw.strip())).dp_state_budget
            return cfg.model_copy(update={"dp_state_budget": budget})
        except (ValueError, ValidationError) as e:
            raise ConfigInvalidValueError(
                f"{STATE_BUDGET_ENV} must be a positive integer, got {raw!r}",
                {"variable": STATE_BUDGET_ENV, "value": raw},
            ) from e


def resolve_config(config: SolverConfig | None) -> SolverConfig:
    return config if config is not None else SolverConfig()
