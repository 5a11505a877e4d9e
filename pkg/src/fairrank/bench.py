"""Benchmark harness: seeded instance suites, solver runs and CSV/PNG output."""

from __future__ import annotations

import csv
import logging
import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .config import SolverConfig, resolve_config
from .errors import EnumerationCapError, FairRankError, SuiteFileError
from .generators import GenParams, gen_random
from .models import Instance
from .oracle import brute_force_solve
from .pipeline import ALGORITHMS, solve

logger = logging.getLogger(__name__)

CSV_FIELDS = [
    "entry",
    "seed",
    "m",
    "n",
    "p",
    "delta",
    "metric",
    "theta",
    "lower_rate",
    "algorithm",
    "status",
    "value",
    "oracle_value",
    "ratio",
    "max_violation_factor",
    "runtime_ms",
]


class SuiteEntry(BaseModel):
    """One generator configuration run over a range of seeds."""

    model_config = ConfigDict(extra="forbid")

    name: str
    params: dict[str, Any]
    seed_start: int = Field(default=0, ge=0)
    count: int = Field(default=1, ge=1)
    algorithms: list[str] = Field(default_factory=lambda: ["auto"])
    oracle: bool = False

    @field_validator("algorithms")
    @classmethod
    def validate_algorithms(cls, v: list[str]) -> list[str]:
        unknown = [a for a in v if a not in ALGORITHMS]
        if unknown:
            raise ValueError(f"unknown algorithms {unknown}; choose from {list(ALGORITHMS)}")
        if not v:
            raise ValueError("at least one algorithm is required")
        return v

    def seeds(self) -> range:
        return range(self.seed_start, self.seed_start + self.count)

    def gen_params(self, seed: int) -> GenParams:
        return GenParams.parse({**self.params, "seed": seed})


class BenchSuite(BaseModel):
    model_config = ConfigDict(extra="forbid")

    entries: list[SuiteEntry]
    workers: int = Field(default=1, ge=1)

    @classmethod
    def from_file(cls, path: Path) -> BenchSuite:
        """Read a YAML or JSON suite file (JSON is read by the YAML parser)."""
        try:
            data = yaml.safe_load(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise SuiteFileError(
                f"Cannot read suite file: {path}", {"path": str(path), "error": str(e)}
            ) from e
        except yaml.YAMLError as e:
            raise SuiteFileError(
                f"Failed to parse suite file: {e}", {"path": str(path), "error": str(e)}
            ) from e
        try:
            return cls.model_validate(data or {})
        except ValidationError as e:
            problems = [
                f"{'.'.join(str(part) for part in err['loc']) or 'suite'}: {err['msg']}"
                for err in e.errors()
            ]
            raise SuiteFileError(
                f"Invalid suite file {path}: " + "; ".join(problems),
                {"path": str(path), "errors": problems},
            ) from e


@dataclass(frozen=True)
class BenchRow:
    entry: str
    seed: int
    m: int
    n: int
    p: int
    delta: int
    metric: str
    theta: float
    lower_rate: float
    algorithm: str
    status: str
    value: float | None
    oracle_value: float | None
    ratio: float | None
    max_violation_factor: float | None
    runtime_ms: float | None


def value_ratio(value: float | None, oracle_value: float | None) -> float | None:
    """``value / oracle``; both zero counts as a perfect ratio."""
    if value is None or oracle_value is None:
        return None
    if oracle_value == 0.0:
        return 1.0 if value == 0.0 else None
    return value / oracle_value


def _oracle_value(inst: Instance, cfg: SolverConfig) -> float | None:
    try:
        return brute_force_solve(inst, config=cfg).value
    except EnumerationCapError:
        logger.warning("bench_oracle_skipped", extra={"m": inst.m, "n": inst.n})
        return None


def _run_instance(entry: SuiteEntry, seed: int, cfg: SolverConfig) -> list[BenchRow]:
    params = entry.gen_params(seed)
    inst = gen_random(params)
    oracle_value = _oracle_value(inst, cfg) if entry.oracle else None
    rows: list[BenchRow] = []
    for algorithm in entry.algorithms:
        label = algorithm
        value: float | None = None
        factor: float | None = None
        runtime: float | None = None
        try:
            report = solve(inst, algorithm, cfg)
        except FairRankError as e:
            logger.info(
                "bench_run_failed",
                extra={"entry": entry.name, "seed": seed, "code": e.error_code},
            )
            status = e.error_code
        else:
            status = "ok"
            value = report.value
            factor = report.constraints.max_violation_factor
            runtime = report.runtime_ms
            label = report.algorithm
        rows.append(
            BenchRow(
                entry=entry.name,
                seed=seed,
                m=params.m,
                n=params.n,
                p=params.p,
                delta=params.delta,
                metric=params.metric.value,
                theta=params.theta,
                lower_rate=params.lower_rate,
                algorithm=label,
                status=status,
                value=value,
                oracle_value=oracle_value,
                ratio=value_ratio(value, oracle_value),
                max_violation_factor=factor,
                runtime_ms=runtime,
            )
        )
    return rows


def run_suite(suite: BenchSuite, config: SolverConfig | None = None) -> list[BenchRow]:
    """Run every (entry, seed, algorithm) triple.

    Rows come back in suite order, then seed order, then algorithm order,
    whatever order the worker threads finish in.
    """
    cfg = resolve_config(config)
    jobs = [(entry, seed) for entry in suite.entries for seed in entry.seeds()]
    # validate every entry before solving anything
    for entry in suite.entries:
        entry.gen_params(entry.seed_start)
    logger.info("bench_started", extra={"instances": len(jobs), "workers": suite.workers})
    with ThreadPoolExecutor(max_workers=suite.workers) as pool:
        batches = list(pool.map(lambda job: _run_instance(job[0], job[1], cfg), jobs))
    rows = [row for batch in batches for row in batch]
    logger.info("bench_finished", extra={"rows": len(rows)})
    return rows


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def write_csv(rows: Iterable[BenchRow], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        w = csv.DictWriter(f, fieldnames=CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: _cell(v) for k, v in asdict(row).items()})
    return path


def write_plots(rows: Sequence[BenchRow], out_dir: Path) -> list[Path]:
    """Value-ratio histogram and runtime-vs-(m·n) scatter as PNG files.

    Returns the written paths; an empty list when matplotlib is not installed.
    """
    try:
        import matplotlib
    except ImportError:
        logger.warning("bench_plots_skipped", extra={"reason": "matplotlib is not installed"})
        return []

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir.mkdir(parents=True, exist_ok=True)
    algorithms = sorted({r.algorithm for r in rows if r.status == "ok"})
    written: list[Path] = []

    fig, ax = plt.subplots(figsize=(6, 4), constrained_layout=True)
    for algo in algorithms:
        ratios = [r.ratio for r in rows if r.algorithm == algo and r.ratio is not None]
        if ratios:
            ax.hist(ratios, bins=20, alpha=0.6, label=algo)
    ax.set_xlabel("value / oracle value")
    ax.set_ylabel("instances")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="best", fontsize=8)
    path = out_dir / "value_ratio.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6, 4), constrained_layout=True)
    for algo in algorithms:
        points = [
            (r.m * r.n, r.runtime_ms)
            for r in rows
            if r.algorithm == algo and r.runtime_ms is not None
        ]
        if points:
            xs, ys = zip(*points, strict=True)
            ax.scatter(xs, ys, s=10, label=algo)
    ax.set_xlabel("m·n")
    ax.set_ylabel("runtime (ms)")
    ax.grid(True, alpha=0.3)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="best", fontsize=8)
    path = out_dir / "runtime.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    logger.info("bench_plots_written", extra={"files": [str(p) for p in written]})
    return written
