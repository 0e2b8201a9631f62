"""
Report schemas emitted by the commands.

Rationals are serialised as "p/q" strings next to a float approximation.
Reports carry no timestamps so reruns are byte-identical.
"""

from enum import Enum as PyEnum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from core.config import settings


class SolveModeEnum(str, PyEnum):
    deterministic = "deterministic"
    sampled_rounding = "sampled-rounding"


class LedgerOut(BaseModel):
    value_queries: int = 0
    independence_queries: int = 0


class ObjectiveChecks(BaseModel):
    """Spot checks; a failure voids the guarantees but never blocks a run."""

    non_negative: bool
    submodular: bool
    monotone_declared: bool


class OptOut(BaseModel):
    opt_set: List[str]
    opt_value: str
    ratio: Optional[str] = None
    ratio_decimal: Optional[float] = None


class McgSummary(BaseModel):
    iterations: int
    delta: str
    parts_per_iteration: int
    supp: int
    ff: int
    max_marginal: str


class RoundingSummary(BaseModel):
    lift_beta: str
    loop_iterations: int
    max_depth: int
    max_ff: int
    restrictions: int = 0
    contractions: int = 0


class SampledOut(BaseModel):
    """Outputs of the random decomposition (sampled-rounding mode)."""

    sets: List[List[str]]
    best_set: List[str]
    best_value: str
    x: Dict[str, str]
    sample: List[str]
    sample_independent: bool
    sample_value: str
    fbar_estimate: float
    fbar_samples: int


class SolveReport(BaseModel):
    schema_version: str = Field(default_factory=lambda: settings.REPORT_SCHEMA_VERSION)
    command: str = "solve"
    instance: Optional[str]
    n: int
    rank: int
    epsilon: str
    epsilon_effective: str
    mode: str
    seed: int
    solution: List[str]
    solution_value: str
    solution_value_decimal: float
    fractional_value: str
    fractional_value_decimal: float
    lossless: bool
    objective_checks: ObjectiveChecks
    mcg: McgSummary
    rounding: Optional[RoundingSummary] = None
    sampled: Optional[SampledOut] = None
    ledgers: Dict[str, LedgerOut]
    opt: Optional[OptOut] = None


class EstimateReport(BaseModel):
    schema_version: str = Field(default_factory=lambda: settings.REPORT_SCHEMA_VERSION)
    command: str = "estimate"
    instance: Optional[str]
    n: int
    rank: int
    epsilon: str
    epsilon_effective: str
    value: str
    value_decimal: float
    objective_checks: ObjectiveChecks
    mcg: McgSummary
    ledgers: Dict[str, LedgerOut]
    opt: Optional[OptOut] = None


class CheckRecord(BaseModel):
    """One checked inequality; slack = lhs - rhs, pass iff slack >= 0."""

    model_config = ConfigDict(populate_by_name=True)

    check: str
    instance_id: str
    params: Dict[str, Any] = Field(default_factory=dict)
    passed: bool = Field(alias="pass")
    slack_num: int
    slack_den: int
    slack: float


class BenchRow(BaseModel):
    n: int
    r: int
    eps: str
    phase: str
    value_queries: int
    independence_queries: int
    wall_ms: float


BENCH_COLUMNS = ["n", "r", "eps", "phase", "value_queries", "independence_queries", "wall_ms"]
