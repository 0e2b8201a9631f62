"""
Shared helpers for the command handlers: argument parsing, instance
loading, output and the mapping of toolkit errors to exit codes.
"""

import functools
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, List, Optional

import typer
from pydantic import BaseModel

from core.exceptions import SchemaError, ToolkitError
from core.logging import get_logger
from repositories.instance import instance_repository
from schemas.common import parse_fraction
from services.problem import Problem, build_problem

logger = get_logger(__name__)


def parse_epsilon(raw: str) -> Fraction:
    """ε as an exact fraction string such as "1/2"; must lie in (0, 1]."""
    try:
        eps = parse_fraction(raw)
    except ValueError as e:
        raise SchemaError(f"epsilon: {e}") from e
    if not 0 < eps <= 1:
        raise SchemaError(f"epsilon: {raw!r} is not in (0, 1]")
    return eps


def parse_n_list(raw: str) -> List[int]:
    """Comma separated sizes; the empty string is the empty list."""
    out: List[int] = []
    for piece in raw.split(","):
        piece = piece.strip()
        if not piece:
            continue
        try:
            n = int(piece)
        except ValueError as e:
            raise SchemaError(f"n-list: {piece!r} is not an integer") from e
        if n < 1:
            raise SchemaError(f"n-list: {n} is not positive")
        out.append(n)
    return out


def load_problem(path: Path) -> Problem:
    return build_problem(instance_repository.load(path))


def dump_json(model: BaseModel) -> str:
    return json.dumps(model.model_dump(mode="json", by_alias=True), sort_keys=True)


def emit(text: str, out: Optional[Path] = None) -> None:
    """Write to --out when given, else to stdout."""
    if out is None:
        typer.echo(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text + "\n", encoding="utf-8")


def handle_errors(command: Callable[..., Any]) -> Callable[..., Any]:
    """Turn toolkit errors into a one-line stderr message and their exit code."""

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except ToolkitError as e:
            logger.error("command failed", command=command.__name__, error=e.message,
                         error_type=type(e).__name__, detail=e.detail)
            typer.echo(f"error: {e.message}", err=True)
            raise typer.Exit(code=e.exit_code)
        except typer.Exit:
            raise
        except Exception:
            logger.exception("unexpected error", command=command.__name__)
            raise

    return wrapper
