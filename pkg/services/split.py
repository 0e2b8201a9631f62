"""
Greedy partitioning of an independent set into ℓ disjoint parts.

`split` adds, one element at a time, the (element, part) pair with the
largest marginal gain. `accelerated_split` replaces the argmax by passes
over a geometrically decreasing threshold.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from core.exceptions import ContractViolation
from core.logging import get_logger
from core.sets import SubsetMask, iter_elements, size
from services.matroids import IndependenceOracle, rank as matroid_rank, remove_loops
from services.oracles import ValueOracle

logger = get_logger(__name__)


@dataclass(frozen=True)
class Partition:
    parts: Tuple[SubsetMask, ...]
    union: SubsetMask
    is_base: bool
    union_independent: bool

    @property
    def ell(self) -> int:
        return len(self.parts)

    def values(self, f: ValueOracle) -> List[Fraction]:
        return [f(part) for part in self.parts]

    def gain_sum(self, f: ValueOracle) -> Fraction:
        """Σ_j f(T_j | ∅)."""
        empty = f(0)
        return sum((f(part) - empty for part in self.parts), Fraction(0))


def threshold_passes(r: int, eps: Fraction) -> int:
    """I = ⌈(2/ε) ln(2r/ε)⌉, natural log; zero passes for rank 0."""
    if r <= 0:
        return 0
    return math.ceil((2 / float(eps)) * math.log(2 * r / float(eps)))


def _check_partial(M: IndependenceOracle, parts: List[SubsetMask]) -> None:
    union = 0
    for part in parts:
        if union & part:
            raise ContractViolation("split parts overlap")
        union |= part
    if not M.raw().is_independent(union):
        raise ContractViolation("split union is not independent")


def split(M: IndependenceOracle, f: ValueOracle, ell: int, paranoid: bool = False) -> Partition:
    """
    Grow T_1..T_ℓ until their union is a base.

    Each step scans N' = {u ∉ T : T + u ∈ I} and adds the pair (u, j)
    maximising f(u | T_j); ties go to the smaller u, then the smaller j.
    """
    if ell < 1:
        raise ValueError("ell must be at least 1")
    parts = [0] * ell
    part_values = [f(0)] * ell
    union = 0

    while True:
        candidates = [
            u for u in iter_elements(M.ground & ~union) if M.is_independent(union | (1 << u))
        ]
        if not candidates:
            break

        best: Optional[Tuple[Fraction, int, int, Fraction]] = None
        for u in candidates:
            seen_empty = False
            for j in range(ell):
                if parts[j] == 0:
                    # empty parts all give the same gain; the first one wins ties
                    if seen_empty:
                        continue
                    seen_empty = True
                value = f(parts[j] | (1 << u))
                gain = value - part_values[j]
                if best is None or gain > best[0]:
                    best = (gain, u, j, value)

        gain, u, j, value = best
        parts[j] |= 1 << u
        part_values[j] = value
        union |= 1 << u
        logger.debug("split step", element=u, part=j, gain=str(gain))
        if paranoid:
            _check_partial(M, parts)

    return Partition(tuple(parts), union, is_base=True, union_independent=True)


def accelerated_split(
    M: IndependenceOracle,
    f: ValueOracle,
    ell: int,
    eps: Fraction,
    dummies: SubsetMask = 0,
    rank: Optional[int] = None,
    paranoid: bool = False,
) -> Partition:
    """
    Thresholded split with τ_0 = max_u f({u}) and τ_k = (1 - ε/2) τ_{k-1}.

    Self loops among the original elements are dropped first (one query
    each). Each pass scans the remaining elements in id order, checks
    T + u ∈ I once, and adds u to the first part whose marginal reaches the
    threshold. Finally T_1 is padded with unused dummies up to the rank.
    """
    eps = Fraction(eps)
    if ell < 1:
        raise ValueError("ell must be at least 1")
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if rank is not None:
        r = rank
    elif dummies:
        r = size(dummies)
    else:
        r = matroid_rank(M.raw(), M.ground)

    # dummies have marginal 0, so a pass could only place them in T_1, which the padding below does
    scan = remove_loops(M, M.ground & ~dummies)
    empty_value = f(0)
    singles = [f(1 << u) for u in iter_elements(scan)]
    if dummies:
        # f({d}) = f(∅) for every dummy
        singles.append(empty_value)
    tau = max(singles, default=Fraction(0))

    passes = threshold_passes(r, eps)
    parts = [0] * ell
    part_values = [empty_value] * ell
    union = 0

    for k in range(1, passes + 1):
        tau = tau * (1 - eps / 2)
        for u in iter_elements(scan):
            if size(union) >= r:
                break
            if (union >> u) & 1:
                continue
            if not M.is_independent(union | (1 << u)):
                continue
            seen_empty = False
            for j in range(ell):
                if parts[j] == 0:
                    if seen_empty:
                        continue
                    seen_empty = True
                value = f(parts[j] | (1 << u))
                if value - part_values[j] >= tau:
                    parts[j] |= 1 << u
                    part_values[j] = value
                    union |= 1 << u
                    if paranoid:
                        _check_partial(M, parts)
                    break
        logger.debug("threshold pass done", k=k, tau=str(tau), size=size(union))

    for d in iter_elements(dummies & ~union):
        if size(union) >= r:
            break
        parts[0] |= 1 << d
        union |= 1 << d

    is_base = size(union) == r
    return Partition(tuple(parts), union, is_base=is_base, union_independent=True)
