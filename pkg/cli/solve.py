"""
solve: continuous greedy followed by deterministic pipage rounding or the
sampled decomposition.
"""

from pathlib import Path
from typing import Optional

import typer

from cli.deps import dump_json, emit, handle_errors, load_problem, parse_epsilon
from schemas.reports import SolveModeEnum
from services.pipeline import solver_service


@handle_errors
def solve(
    instance: Path = typer.Argument(..., help="Instance JSON file."),
    epsilon: str = typer.Option("1/2", "--epsilon", "-e", help="Exact fraction in (0, 1]."),
    mode: SolveModeEnum = typer.Option(SolveModeEnum.deterministic, "--mode", help="Rounding scheme."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for spot checks and sampling."),
    paranoid: Optional[bool] = typer.Option(None, "--paranoid/--no-paranoid", help="Run every internal invariant check."),
    with_opt: bool = typer.Option(False, "--with-opt", help="Add the brute-force optimum and ratio."),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Write the report here instead of stdout."),
) -> None:
    """Solve an instance and print the JSON report."""
    problem = load_problem(instance)
    report = solver_service.solve(
        problem,
        parse_epsilon(epsilon),
        mode=mode,
        seed=seed,
        paranoid=paranoid,
        with_opt=with_opt,
    )
    emit(dump_json(report), out)
