"""
bench: query counts per phase over a size sweep, written as CSV.
"""

import io
from pathlib import Path
from typing import Optional

import typer

from cli.deps import emit, handle_errors, parse_epsilon, parse_n_list
from core.exceptions import SchemaError
from scripts.utils import FAMILIES
from services.benchmark import benchmark_service


@handle_errors
def bench(
    family: str = typer.Option("coverage-uniform", "--family", help="coverage-uniform | cut-partition"),
    n_list: str = typer.Option("8,16,32,64", "--n-list", help="Comma separated ground set sizes."),
    epsilon: str = typer.Option("1/2", "--epsilon", "-e"),
    trials: int = typer.Option(1, "--trials", min=1),
    with_rounding: bool = typer.Option(False, "--with-rounding", help="Also time the pipage phase."),
    seed: int = typer.Option(0, "--seed", help="Instance generator seed."),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="CSV file; stdout when omitted."),
) -> None:
    """Benchmark query counts of continuous greedy (and rounding)."""
    if family not in FAMILIES:
        raise SchemaError(f"family: unknown family {family!r}", {"families": list(FAMILIES)})
    rows = benchmark_service.run(
        family,
        parse_n_list(n_list),
        parse_epsilon(epsilon),
        trials=trials,
        with_rounding=with_rounding,
        seed=seed,
    )
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        benchmark_service.write_csv(rows, out)
        return
    buffer = io.StringIO()
    benchmark_service.write_csv(rows, buffer)
    emit(buffer.getvalue().rstrip("\n"))
