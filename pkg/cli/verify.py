"""
verify: run the exact check battery on one instance or a named suite and
print JSON lines, one per checked inequality.
"""

from pathlib import Path
from typing import List, Optional

import typer

from cli.deps import dump_json, emit, handle_errors, parse_epsilon
from core.config import settings
from core.exceptions import SchemaError
from core.logging import get_logger
from repositories.instance import instance_repository
from services.problem import build_problem
from services.verify import verification_service

logger = get_logger(__name__)


@handle_errors
def verify(
    instance: Optional[Path] = typer.Argument(None, help="Instance JSON file."),
    suite: Optional[str] = typer.Option(None, "--suite", help="Named suite, e.g. fixtures."),
    seed: Optional[int] = typer.Option(None, "--seed"),
    epsilons: str = typer.Option("1,1/2", "--epsilons", help="Comma separated continuous greedy ε values."),
    draws: int = typer.Option(8, "--draws", min=0, help="Random vectors per identity check."),
    strict: bool = typer.Option(False, "--strict", help="Exit with code 4 when any check fails."),
    out: Optional[Path] = typer.Option(None, "--out", "-o"),
) -> None:
    """Check every guarantee exactly against brute force."""
    if (instance is None) == (suite is None):
        raise SchemaError("give exactly one of an instance path or --suite")
    seed = settings.DEFAULT_SEED if seed is None else seed
    eps_list = [parse_epsilon(piece) for piece in epsilons.split(",") if piece.strip()]
    paths: List[Path] = [instance] if instance is not None else instance_repository.list_suite(suite)

    lines: List[str] = []
    failed = 0
    for path in paths:
        problem = build_problem(instance_repository.load(path))
        records = verification_service.verify(problem, seed, eps_list, draws=draws)
        failed += sum(1 for r in records if not r.passed)
        lines.extend(dump_json(r) for r in records)
    logger.info("verify done", instances=len(paths), checks=len(lines), failed=failed)
    emit("\n".join(lines), out)
    if strict and failed:
        typer.echo(f"error: {failed} checks failed", err=True)
        raise typer.Exit(code=4)
