from __future__ import annotations

import os
import sys
from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest


def _ensure_paths() -> None:
    root = Path(__file__).resolve().parents[1]
    src = root / "src"
    for p in (str(root), str(src)):
        if p not in sys.path:
            sys.path.insert(0, p)


_ensure_paths()

# Ensure deterministic environment for tests
os.environ.setdefault("PYTHONHASHSEED", "0")

from fairrank.constraints import make_instance  # noqa: E402
from fairrank.generators import GenParams, gen_pair_limit, gen_random  # noqa: E402
from fairrank.metrics import MetricKind, MetricSpec  # noqa: E402
from fairrank.models import Instance  # noqa: E402

FIXTURES_DIR = Path(__file__).parent / "fixtures" / "instances"


def product_weights(m: int, n: int) -> np.ndarray:
    """``W[i, j] = (m + 1 - i)(n + 1 - j)`` with 1-based i and j: monotone and Monge."""
    return np.outer(np.arange(m, 0, -1), np.arange(n, 0, -1)).astype(float)


@pytest.fixture(autouse=True)
def clear_state_budget(monkeypatch: pytest.MonkeyPatch) -> None:
    """Keep a developer's FAIRRANK_STATE_BUDGET out of the tests."""
    monkeypatch.delenv("FAIRRANK_STATE_BUDGET", raising=False)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture
def pair_limit() -> Instance:
    return gen_pair_limit()


@pytest.fixture
def dcg_m4n3() -> Instance:
    return make_instance(
        4,
        3,
        [[1, 3], [2, 4]],
        weights=MetricSpec(MetricKind.DCG, (4.0, 3.0, 2.0, 1.0)),
        upper={(2, 1): 1, (3, 1): 1},
    )


@pytest.fixture
def flow_m4n2() -> Instance:
    return make_instance(
        4, 2, [[1, 2], [3, 4]], weights=product_weights(4, 2), lower={(2, 2): 1}
    )


@pytest.fixture
def seeded() -> Callable[..., Instance]:
    """Factory for generated instances: ``seeded(m=6, n=3, seed=4, ...)``."""

    def make(**params: object) -> Instance:
        return gen_random(GenParams.model_validate(params))

    return make
