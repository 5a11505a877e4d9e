from __future__ import annotations

import json
import logging
from collections.abc import Callable
from pathlib import Path
from typing import Annotated, TypeVar

import typer

from .config import SolverConfig
from .errors import FairRankError, GeneratorParamsError, format_error

app = typer.Typer(
    add_completion=False, help="Ranking maximization under prefix fairness constraints"
)

T = TypeVar("T")

GEN_PRESETS = ("random", "pair_limit", "fano", "triangle")

Verbose = Annotated[int, typer.Option("-v", count=True)]
DebugJson = Annotated[bool, typer.Option("--debug-json-errors")]
ConfigPath = Annotated[Path | None, typer.Option()]


def _setup_logging(verbose: int) -> None:
    if verbose >= 2:
        logging.basicConfig(level=logging.DEBUG)
    elif verbose == 1:
        logging.basicConfig(level=logging.INFO)
    else:
        logging.basicConfig(level=logging.WARNING)


def _load_config(config: Path | None) -> SolverConfig:
    base = SolverConfig.from_file(str(config)) if config else SolverConfig()
    return SolverConfig.from_env(base)


def _guarded(action: Callable[[], T], debug_json_errors: bool) -> T:
    """Run a command body, mapping errors to stderr output and exit codes."""
    try:
        return action()
    except FairRankError as e:
        typer.echo(format_error(e, debug_json_errors=debug_json_errors), err=True)
        raise typer.Exit(e.exit_code) from e
    except typer.Exit:
        raise
    except Exception as e:
        # Fallback for any unhandled exceptions
        error = FairRankError(f"Unexpected error: {e}")
        typer.echo(format_error(error, debug_json_errors=debug_json_errors), err=True)
        raise typer.Exit(error.exit_code) from e


def _echo_json(data: object) -> None:
    typer.echo(json.dumps(data, indent=2, ensure_ascii=False))


@app.command()
def solve(
    instance: Annotated[Path, typer.Argument()],
    algo: Annotated[str, typer.Option(help="auto|greedy|dp|flow|approx|oracle")] = "auto",
    output: Annotated[Path | None, typer.Option()] = None,
    config: ConfigPath = None,
    verbose: Verbose = 0,
    debug_json_errors: DebugJson = False,
) -> None:
    """Solve an instance file and print or write the solution file."""
    _setup_logging(verbose)

    def body() -> None:
        from .formats import dump_solution
        from .pipeline import run_solve

        cfg = _load_config(config)
        report = run_solve(instance, algo, cfg, output=output)
        if output is None:
            typer.echo(dump_solution(report), nl=False)
        else:
            typer.echo(
                f"Solved with {report.algorithm} ({report.guarantee}): "
                f"value {report.value:.6g}, solution written to {output}"
            )

    _guarded(body, debug_json_errors)


@app.command()
def check(
    instance: Annotated[Path, typer.Argument()],
    ranking: Annotated[Path, typer.Argument()],
    config: ConfigPath = None,
    verbose: Verbose = 0,
    debug_json_errors: DebugJson = False,
) -> None:
    """Evaluate a ranking against an instance; exit 2 when it breaks a bound."""
    _setup_logging(verbose)

    def body() -> bool:
        from .pipeline import run_check

        outcome = run_check(instance, ranking, _load_config(config))
        _echo_json(outcome.payload)
        return outcome.feasible

    if not _guarded(body, debug_json_errors):
        raise typer.Exit(2)


@app.command()
def info(
    instance: Annotated[Path, typer.Argument()],
    config: ConfigPath = None,
    verbose: Verbose = 0,
    debug_json_errors: DebugJson = False,
) -> None:
    """Print the type profile, abundance report and automatic algorithm choice."""
    _setup_logging(verbose)

    def body() -> None:
        from .pipeline import run_info

        _echo_json(run_info(instance, _load_config(config)))

    _guarded(body, debug_json_errors)


@app.command()
def gen(
    out: Annotated[Path, typer.Argument()],
    preset: Annotated[str, typer.Option(help="random|pair_limit|fano|triangle")] = "random",
    m: Annotated[int | None, typer.Option()] = None,
    n: Annotated[int | None, typer.Option()] = None,
    p: Annotated[int, typer.Option()] = 2,
    delta: Annotated[int, typer.Option()] = 1,
    metric: Annotated[str, typer.Option()] = "dcg",
    qualities: Annotated[str, typer.Option()] = "uniform",
    theta: Annotated[float, typer.Option()] = 0.5,
    lower_rate: Annotated[float, typer.Option()] = 0.0,
    seed: Annotated[int, typer.Option()] = 0,
    verbose: Verbose = 0,
    debug_json_errors: DebugJson = False,
) -> None:
    """Write a generated instance file."""
    _setup_logging(verbose)

    def body() -> None:
        from . import generators
        from .formats import write_instance

        if preset == "random":
            params = generators.GenParams.parse(
                {
                    "m": m,
                    "n": n,
                    "p": p,
                    "delta": delta,
                    "metric": metric,
                    "qualities": qualities,
                    "theta": theta,
                    "lower_rate": lower_rate,
                    "seed": seed,
                }
            )
            inst = generators.gen_random(params)
        elif preset == "pair_limit":
            inst = generators.gen_pair_limit()
        elif preset in ("fano", "triangle"):
            graph = generators.gen_fano_plane() if preset == "fano" else generators.gen_triangle()
            inst = graph.instance(n if n is not None else 2)
        else:
            raise GeneratorParamsError(
                f"unknown preset {preset!r}; choose one of {', '.join(GEN_PRESETS)}",
                {"preset": preset},
            )
        write_instance(inst, out)
        typer.echo(f"Instance written to {out} (m={inst.m}, n={inst.n}, p={inst.p})")

    _guarded(body, debug_json_errors)


@app.command()
def bench(
    suite: Annotated[Path, typer.Argument()],
    out: Annotated[Path, typer.Option()],
    plots: Annotated[Path | None, typer.Option(dir_okay=True, file_okay=False)] = None,
    config: ConfigPath = None,
    verbose: Verbose = 0,
    debug_json_errors: DebugJson = False,
) -> None:
    """Run a benchmark suite and write one CSV row per (instance, algorithm)."""
    _setup_logging(verbose)

    def body() -> None:
        from .bench import BenchSuite, run_suite, write_csv, write_plots

        rows = run_suite(BenchSuite.from_file(suite), _load_config(config))
        write_csv(rows, out)
        typer.echo(f"Benchmark complete: {len(rows)} rows written to {out}")
        if plots is not None:
            for path in write_plots(rows, plots):
                typer.echo(f"  plot: {path}")

    _guarded(body, debug_json_errors)


if __name__ == "__main__":  # pragma: no cover
    app()
