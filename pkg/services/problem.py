"""
A built problem: the objective and matroid of an instance, its rank, and
the dummy-extended, ledger-counted views the algorithms run against.
"""

from dataclasses import dataclass
from typing import List, Tuple

from core.config import settings
from core.exceptions import CapabilityError
from core.logging import get_logger
from core.sets import SubsetMask, iter_elements
from schemas.instance import InstanceSpec
from services.matroids import (
    IndependenceOracle,
    build_matroid,
    counted_matroid,
    dummy_mask,
    extend_with_dummies,
    rank,
)
from services.oracles import QueryLedger, ValueOracle, build_objective, counted, with_dummies

logger = get_logger(__name__)


@dataclass
class Problem:
    name: str
    labels: List[str]
    objective: ValueOracle
    matroid: IndependenceOracle
    rank: int

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def width(self) -> int:
        return self.n + self.rank

    @property
    def dummies(self) -> SubsetMask:
        return dummy_mask(self.n, self.rank)

    @property
    def monotone(self) -> bool:
        return self.objective.monotone

    def extended(self) -> Tuple[IndependenceOracle, ValueOracle]:
        """Uncounted dummy-extended matroid and objective."""
        return extend_with_dummies(self.matroid, self.dummies), with_dummies(self.objective, self.rank)

    def instrumented(self, ledger: QueryLedger) -> Tuple[IndependenceOracle, ValueOracle]:
        """Dummy-extended matroid and objective, both counted on `ledger`."""
        M, f = self.extended()
        return counted_matroid(M, ledger), counted(f, ledger)

    def label(self, u: int) -> str:
        return self.labels[u] if u < self.n else f"~d{u - self.n}"

    def labels_of(self, mask: SubsetMask, include_dummies: bool = False) -> List[str]:
        return [self.label(u) for u in iter_elements(mask) if include_dummies or u < self.n]


def build_problem(spec: InstanceSpec) -> Problem:
    objective = build_objective(spec)
    matroid = build_matroid(spec)
    r = rank(matroid, matroid.ground)
    if spec.n + r > settings.MAX_GROUND_SIZE:
        raise CapabilityError(
            f"n + r = {spec.n + r} exceeds the bitset width {settings.MAX_GROUND_SIZE}",
            {"n": spec.n, "rank": r},
        )
    logger.info("Problem built", name=spec.name, n=spec.n, rank=r,
                objective=objective.name, matroid=matroid.name)
    return Problem(
        name=spec.name or "instance",
        labels=list(spec.elements),
        objective=objective,
        matroid=matroid,
        rank=r,
    )
