from __future__ import annotations

import hashlib
import importlib
import json
from pathlib import Path

import pytest


def sha256(p: Path) -> str:
    return hashlib.sha256(p.read_bytes()).hexdigest()


@pytest.mark.parametrize("case", ["pair_limit", "dcg_m4n3", "flow_m4n2", "random_seed1"])
def test_fixture_is_byte_stable(tmp_path: Path, case: str) -> None:
    gen = importlib.import_module("scripts.gen_fixtures")
    out1 = tmp_path / f"{case}_1.json"
    out2 = tmp_path / f"{case}_2.json"

    # API: make_fixture(case, output_path: Path) -> Path
    gen.make_fixture(case, out1)
    gen.make_fixture(case, out2)

    assert sha256(out1) == sha256(out2)
    assert out1.read_bytes().endswith(b"\n")


@pytest.mark.parametrize("case", ["pair_limit", "dcg_m4n3", "flow_m4n2"])
def test_checked_in_fixture_matches_generator(
    tmp_path: Path, fixtures_dir: Path, case: str
) -> None:
    gen = importlib.import_module("scripts.gen_fixtures")
    fresh = gen.make_fixture(case, tmp_path / f"{case}.json")
    checked_in = fixtures_dir / f"{case}.json"
    assert json.loads(fresh.read_text(encoding="utf-8")) == json.loads(
        checked_in.read_text(encoding="utf-8")
    )
