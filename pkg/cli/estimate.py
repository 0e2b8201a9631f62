"""
estimate: continuous greedy only, reporting V = F(y).
"""

from pathlib import Path
from typing import Optional

import typer

from cli.deps import dump_json, emit, handle_errors, load_problem, parse_epsilon
from services.pipeline import solver_service


@handle_errors
def estimate(
    instance: Path = typer.Argument(..., help="Instance JSON file."),
    epsilon: str = typer.Option("1/2", "--epsilon", "-e", help="Exact fraction in (0, 1]."),
    seed: Optional[int] = typer.Option(None, "--seed"),
    paranoid: Optional[bool] = typer.Option(None, "--paranoid/--no-paranoid"),
    with_opt: bool = typer.Option(False, "--with-opt", help="Add the brute-force optimum and ratio."),
    out: Optional[Path] = typer.Option(None, "--out", "-o"),
) -> None:
    """Estimate the optimum value without rounding."""
    problem = load_problem(instance)
    report = solver_service.estimate(
        problem,
        parse_epsilon(epsilon),
        seed=seed,
        paranoid=paranoid,
        with_opt=with_opt,
    )
    emit(dump_json(report), out)
