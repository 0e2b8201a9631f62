"""
Error hierarchy shared by services and commands.

Every error carries the process exit code the command layer maps it to.
"""

from typing import Any, Dict, Optional


class ToolkitError(Exception):
    """Base class for all toolkit errors."""

    exit_code: int = 1

    def __init__(self, message: str, detail: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.detail = detail or {}

    def __str__(self) -> str:
        return self.message


class SchemaError(ToolkitError):
    """Malformed instance or command input."""

    exit_code = 2


class CapabilityError(ToolkitError):
    """A configured cap would be exceeded."""

    exit_code = 3


class ContractViolation(ToolkitError):
    """An invariant or precondition did not hold."""

    exit_code = 4


class PreconditionError(ContractViolation):
    """A documented input precondition failed."""
