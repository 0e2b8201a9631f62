"""
Deterministic measured continuous greedy.

Runs 1/δ iterations (δ = ε³). Iteration i partitions a base into 1/ε parts
with accelerated_split against g(A) = F(𝟙_A ∨ y^{i-1}) and sets
y^i = y^{i-1} ⊕ δ·Σ_j 𝟙_{T_j}. The whole trajectory is kept for checking.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from core.exceptions import CapabilityError
from core.logging import get_logger
from core.sets import SubsetMask, iter_elements
from core.vectors import (
    MarginalVec,
    SparseExtVec,
    combine_disjoint,
    marginals,
    psum,
    zero,
)
from services.extension import ExtensionEvaluator
from services.matroids import IndependenceOracle
from services.oracles import QueryLedger, ValueOracle
from services.split import Partition, accelerated_split

logger = get_logger(__name__)


class GObjective(ValueOracle):
    """g_y(A) = F(𝟙_A ∨ y) as a value oracle; calls are counted on its own ledger."""

    def __init__(self, evaluator: ExtensionEvaluator, y: SparseExtVec, ledger: Optional[QueryLedger] = None):
        super().__init__(evaluator.width, monotone=evaluator.objective.monotone, name="g")
        self.evaluator = evaluator
        self.y = y
        self.ledger = ledger

    def evaluate(self, mask: SubsetMask) -> Fraction:
        if self.ledger is not None:
            self.ledger.add_value()
        return self.evaluator.eval_g(self.y, mask)


@dataclass(frozen=True)
class McgIteration:
    index: int
    parts: Tuple[SubsetMask, ...]
    union: SubsetMask
    y_before: SparseExtVec
    y_after: SparseExtVec
    value_before: Fraction
    value_after: Fraction

    @property
    def supp(self) -> int:
        return self.y_after.supp

    @property
    def ff(self) -> int:
        return self.y_after.ff


@dataclass
class McgTrace:
    eps_raw: Fraction
    eps_effective: Fraction
    delta: Fraction
    ell: int
    width: int
    dummies: SubsetMask
    records: List[McgIteration] = field(default_factory=list)
    g_queries: int = 0

    @property
    def y_final(self) -> SparseExtVec:
        return self.records[-1].y_after if self.records else zero(self.width)

    @property
    def iterations(self) -> int:
        return len(self.records)


def effective_epsilon(eps: Fraction) -> Fraction:
    """ε replaced by 1/⌈1/ε⌉, so 1/ε is an integer."""
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    return Fraction(1, math.ceil(1 / eps))


def projected_ff(eps: Fraction) -> int:
    """Upper bound 1/ε⁴ on the support of the final vector."""
    m = effective_epsilon(eps).denominator
    return m ** 4


def measured_continuous_greedy(
    M: IndependenceOracle,
    evaluator: ExtensionEvaluator,
    eps: Fraction,
    dummies: SubsetMask,
    ff_cap: Optional[int] = None,
    paranoid: bool = False,
) -> McgTrace:
    """
    M must be the dummy-extended matroid and `evaluator` must evaluate the
    dummy-extended objective. Refuses up front when 1/ε⁴ exceeds the ff cap.
    """
    cap = evaluator.ff_cap if ff_cap is None else ff_cap
    eps_eff = effective_epsilon(eps)
    bound = projected_ff(eps)
    if bound > cap:
        raise CapabilityError(
            f"epsilon {eps} needs ff up to {bound}, above the cap {cap}",
            {"projected_ff": bound, "cap": cap, "epsilon": str(eps)},
        )

    m = eps_eff.denominator
    delta = eps_eff ** 3
    ell = m
    width = evaluator.width
    shadow = evaluator.raw()
    g_ledger = QueryLedger()

    trace = McgTrace(
        eps_raw=Fraction(eps),
        eps_effective=eps_eff,
        delta=delta,
        ell=ell,
        width=width,
        dummies=dummies,
    )
    y = zero(width)
    value = shadow.eval_F(y)

    for i in range(1, m ** 3 + 1):
        g = GObjective(evaluator, y, g_ledger)
        partition: Partition = accelerated_split(M, g, ell, eps_eff, dummies=dummies, paranoid=paranoid)
        y_next = psum(y, combine_disjoint(delta, partition.parts, width))
        value_next = shadow.eval_F(y_next)
        trace.records.append(
            McgIteration(
                index=i,
                parts=partition.parts,
                union=partition.union,
                y_before=y,
                y_after=y_next,
                value_before=value,
                value_after=value_next,
            )
        )
        logger.info(
            "mcg iteration done",
            i=i,
            supp=y_next.supp,
            ff=y_next.ff,
            value=str(value_next),
        )
        y, value = y_next, value_next

    trace.g_queries = g_ledger.value_queries
    return trace


def value_estimate(trace: McgTrace, evaluator: Optional[ExtensionEvaluator] = None) -> Fraction:
    """V = F(y_final); recomputed when an evaluator is given."""
    if evaluator is not None:
        return evaluator.eval_F(trace.y_final)
    if not trace.records:
        raise ValueError("empty trace")
    return trace.records[-1].value_after


@dataclass(frozen=True)
class Decomposition:
    sets: Tuple[SubsetMask, ...]
    x: MarginalVec


def random_decomposition(trace: McgTrace, seed: int) -> Decomposition:
    """
    S_i ⊆ T_i keeps u with probability (1-δ)^k, k = number of earlier
    iterations whose union contained u; x = δ·Σ_i 𝟙_{S_i}. No oracle access.
    """
    rng = np.random.default_rng(seed)
    delta = trace.delta
    seen = [0] * trace.width
    sets: List[SubsetMask] = []
    x = [Fraction(0)] * trace.width
    for record in trace.records:
        members = list(iter_elements(record.union))
        draws = rng.random(len(members))
        chosen = 0
        for u, draw in zip(members, draws):
            if draw < float((1 - delta) ** seen[u]):
                chosen |= 1 << u
                x[u] += delta
        for u in members:
            seen[u] += 1
        sets.append(chosen)
    return Decomposition(tuple(sets), MarginalVec(x))


def final_marginals(trace: McgTrace) -> MarginalVec:
    return marginals(trace.y_final)
