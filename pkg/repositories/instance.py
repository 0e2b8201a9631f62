"""
Instance repository: reading and writing instance documents on disk.
"""

import json
from pathlib import Path
from typing import List, Optional, Union

from pydantic import ValidationError

from core.config import settings
from core.exceptions import SchemaError
from core.logging import get_logger
from schemas.instance import InstanceSpec

logger = get_logger(__name__)

DEFAULT_FIXTURES_DIR = Path(__file__).resolve().parent.parent / "data" / "fixtures"


def describe_validation_error(error: ValidationError) -> str:
    """First error as 'field.path: message'."""
    first = error.errors()[0]
    loc = ".".join(str(part) for part in first.get("loc", ()))
    msg = first.get("msg", "invalid value")
    return f"{loc}: {msg}" if loc else msg


class InstanceRepository:
    """Loads instance specs from JSON files and named suites."""

    def __init__(self, fixtures_dir: Optional[Union[str, Path]] = None):
        configured = fixtures_dir or settings.FIXTURES_DIR
        self.fixtures_dir = Path(configured) if configured else DEFAULT_FIXTURES_DIR

    def parse(self, payload: Union[str, bytes, dict]) -> InstanceSpec:
        try:
            if isinstance(payload, dict):
                return InstanceSpec.model_validate(payload)
            return InstanceSpec.model_validate_json(payload)
        except ValidationError as e:
            raise SchemaError(describe_validation_error(e)) from e

    def load(self, path: Union[str, Path]) -> InstanceSpec:
        path = Path(path)
        try:
            raw = path.read_text(encoding="utf-8")
        except OSError as e:
            raise SchemaError(f"cannot read instance file {path}: {e}") from e
        spec = self.parse(raw)
        if spec.name is None:
            spec = spec.model_copy(update={"name": path.stem})
        logger.info("Instance loaded", path=str(path), name=spec.name, n=spec.n)
        return spec

    def save(self, spec: InstanceSpec, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        data = spec.model_dump(mode="json")
        path.write_text(json.dumps(data, indent=2, sort_keys=False) + "\n", encoding="utf-8")
        return path

    def list_suite(self, name: str) -> List[Path]:
        if name != "fixtures":
            raise SchemaError(f"suite: unknown suite {name!r}")
        if not self.fixtures_dir.is_dir():
            raise SchemaError(f"suite: fixtures directory {self.fixtures_dir} not found")
        return sorted(self.fixtures_dir.glob("*.json"))


instance_repository = InstanceRepository()
