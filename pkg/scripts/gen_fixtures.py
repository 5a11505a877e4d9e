#!/usr/bin/env python3
"""
Deterministic instance fixtures generator.

Purpose:
  - Regenerate the golden instance files used by unit and CLI tests.
  - Every fixture is either hand-built or drawn from a fixed seed, so reruns
    produce byte-identical files.

Usage:
  python scripts/gen_fixtures.py --out tests/fixtures/instances --case all
"""

from __future__ import annotations

import argparse
from collections.abc import Callable
from pathlib import Path

from fairrank.constraints import make_instance
from fairrank.formats import write_instance
from fairrank.generators import GenParams, gen_pair_limit, gen_random
from fairrank.metrics import MetricKind, MetricSpec
from fairrank.models import Instance


def dcg_m4n3() -> Instance:
    """Four items, three positions, DCG weights, at most one of items {1, 3} anywhere."""
    return make_instance(
        4,
        3,
        [[1, 3], [2, 4]],
        weights=MetricSpec(MetricKind.DCG, (4.0, 3.0, 2.0, 1.0)),
        upper={(k, 1): 1 for k in range(2, 4)},
    )


def flow_m4n2() -> Instance:
    """Two disjoint pairs, product weights, at least one of items {3, 4} in the top 2."""
    weights = [[float((5 - i) * (3 - j)) for j in (1, 2)] for i in (1, 2, 3, 4)]
    return make_instance(4, 2, [[1, 2], [3, 4]], weights=weights, lower={(2, 2): 1})


def random_seed1() -> Instance:
    return gen_random(GenParams(m=7, n=4, p=2, delta=1, seed=1))


FIXTURES: dict[str, Callable[[], Instance]] = {
    "pair_limit": gen_pair_limit,
    "dcg_m4n3": dcg_m4n3,
    "flow_m4n2": flow_m4n2,
    "random_seed1": random_seed1,
}


def make_fixture(case: str, output_path: Path) -> Path:
    return write_instance(FIXTURES[case](), output_path)


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", type=Path, default=Path("tests/fixtures/instances"))
    parser.add_argument("--case", type=str, default="all")
    args = parser.parse_args()
    if args.case == "all":
        cases = list(FIXTURES)
    elif args.case in FIXTURES:
        cases = [args.case]
    else:
        raise SystemExit(f"unknown case: {args.case}")
    for case in cases:
        out = make_fixture(case, args.out / f"{case}.json")
        print(f"Wrote fixture: {out}")


if __name__ == "__main__":
    main()
