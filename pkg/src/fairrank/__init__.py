from __future__ import annotations

import importlib

_EXPORTS = {
    "SolverConfig": "config",
    "Instance": "models",
    "Ranking": "models",
    "MetricKind": "metrics",
    "MetricSpec": "metrics",
    "make_instance": "constraints",
    "validate_instance": "constraints",
    "check_constraints": "constraints",
    "ranking_value": "constraints",
    "solve": "pipeline",
    "select_algorithm": "pipeline",
}

__all__ = sorted(_EXPORTS)


def __getattr__(name: str) -> object:
    """Lazy import so ``import fairrank`` stays cheap for the CLI."""
    module = _EXPORTS.get(name)
    if module is None:
        msg_unknown_attr = "unknown attribute"
        raise AttributeError(f"{msg_unknown_attr}: {name!r}")
    return getattr(importlib.import_module(f".{module}", __name__), name)


def __dir__() -> list[str]:
    """Maintain introspection."""
    return sorted([*list(globals().keys()), *_EXPORTS])
