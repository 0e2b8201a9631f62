"""
submodkit - command line entry point.

Deterministic submodular maximization under matroid constraints:
solve, estimate, verify and bench.
"""

from typing import Optional

import typer
from dotenv import load_dotenv

from cli import bench, estimate, solve, verify
from core.config import settings
from core.logging import setup_logging

load_dotenv()

app = typer.Typer(
    name=settings.APP_NAME,
    help="Deterministic submodular maximization under matroid constraints.",
    add_completion=False,
    no_args_is_help=True,
)


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Overrides LOG_LEVEL."),
) -> None:
    setup_logging(log_level)


# Register commands
app.command("solve")(solve.solve)
app.command("estimate")(estimate.estimate)
app.command("verify")(verify.verify)
app.command("bench")(bench.bench)


if __name__ == "__main__":
    app()
