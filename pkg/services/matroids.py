"""
Matroids behind an independence oracle: built-in families, the
dummy-extended matroid, minors with rank emulation and polytope membership.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from core.config import settings
from core.exceptions import CapabilityError
from core.logging import get_logger
from core.sets import (
    SubsetMask,
    full_mask,
    iter_elements,
    mask_of,
    range_mask,
    size,
    submasks,
)
from core.vectors import MarginalVec
from schemas.instance import (
    GraphicMatroidSpec,
    InstanceSpec,
    PartitionMatroidSpec,
    UniformMatroidSpec,
)
from services.oracles import QueryLedger

logger = get_logger(__name__)

_FOREST_CACHE_SIZE = 1 << 16


@dataclass(frozen=True)
class RankStructure:
    """
    Closed-form rank r(X) = min(T, Σ_i min(|X ∩ P_i|, c_i)).

    Covers uniform matroids (one part), partition matroids, and their
    dummy extension (an extra part D with capacity r, truncated at r).
    """

    parts: Tuple[Tuple[SubsetMask, int], ...]
    truncation: Optional[int] = None

    def rank(self, mask: SubsetMask) -> int:
        total = sum(min(size(mask & part), cap) for part, cap in self.parts)
        if self.truncation is not None:
            total = min(total, self.truncation)
        return total

    def extended(self, dummies: SubsetMask, r: int) -> "RankStructure":
        return RankStructure(self.parts + ((dummies, r),), truncation=r)

    def min_slack(
        self,
        x: MarginalVec,
        ground: SubsetMask,
        contracted: SubsetMask = 0,
        include: SubsetMask = 0,
        exclude: SubsetMask = 0,
    ) -> Tuple[Fraction, SubsetMask]:
        """
        Minimise r(A ∪ D') - r(D') - x(A) over include ⊆ A ⊆ ground ∖ exclude.

        The minimum splits into the truncated branch (T - x(A), smallest
        with all positive coordinates in) and the separable per-part branch;
        each branch's optimum is a candidate and the best candidate wins.
        """
        allowed = ground & ~exclude
        base_rank = self.rank(contracted)

        def phi(a: SubsetMask) -> Fraction:
            return self.rank(a | contracted) - base_rank - x.total(a)

        candidates: List[SubsetMask] = []
        if self.truncation is not None:
            positive = mask_of(w for w in iter_elements(allowed) if x[w] > 0)
            candidates.append(include | positive)

        per_part = include
        covered = 0
        for part, cap in self.parts:
            covered |= part
            forced = include & part
            optional = sorted(
                iter_elements(allowed & part & ~include), key=lambda w: (-x[w], w)
            )
            d = size(contracted & part)
            running = x.total(forced)
            best_val = min(size(forced) + d, cap) - running
            best_take = 0
            for taken, w in enumerate(optional, start=1):
                running += x[w]
                val = min(size(forced) + taken + d, cap) - running
                if val < best_val:
                    best_val, best_take = val, taken
            per_part |= mask_of(optional[:best_take])
        # elements outside every part are loops
        per_part |= mask_of(w for w in iter_elements(allowed & ~covered) if x[w] > 0)
        candidates.append(per_part)

        scored = sorted((phi(a), size(a), a) for a in candidates)
        value, _, witness = scored[0]
        return value, witness


class IndependenceOracle:
    """Base class: an independence test over the elements of `ground`."""

    def __init__(self, width: int, ground: SubsetMask, name: str = "matroid"):
        self.width = width
        self.ground = ground
        self.name = name

    def __call__(self, mask: SubsetMask) -> bool:
        return self.is_independent(mask)

    def is_independent(self, mask: SubsetMask) -> bool:
        raise NotImplementedError

    def structure(self) -> Optional[RankStructure]:
        return None

    def raw(self) -> "IndependenceOracle":
        return self


class UniformMatroid(IndependenceOracle):
    def __init__(self, n: int, k: int):
        super().__init__(n, full_mask(n), name="uniform")
        self.k = k

    def is_independent(self, mask: SubsetMask) -> bool:
        return mask & ~self.ground == 0 and size(mask) <= self.k

    def structure(self) -> RankStructure:
        return RankStructure(((self.ground, self.k),))


class PartitionMatroid(IndependenceOracle):
    def __init__(self, n: int, parts: Sequence[SubsetMask], capacities: Sequence[int]):
        super().__init__(n, full_mask(n), name="partition")
        self.parts = list(parts)
        self.capacities = list(capacities)
        self.covered = 0
        for part in self.parts:
            self.covered |= part

    def is_independent(self, mask: SubsetMask) -> bool:
        # elements outside every part are loops
        if mask & ~(self.ground & self.covered):
            return False
        return all(size(mask & p) <= c for p, c in zip(self.parts, self.capacities))

    def structure(self) -> RankStructure:
        return RankStructure(tuple(zip(self.parts, self.capacities)))


class GraphicMatroid(IndependenceOracle):
    """Elements are edges; a set is independent iff it is a forest."""

    def __init__(self, endpoints: Sequence[Tuple[str, str]]):
        n = len(endpoints)
        super().__init__(n, full_mask(n), name="graphic")
        self.endpoints = list(endpoints)
        # answers per mask; counting wrappers sit above, so ledgers are unaffected
        self._forests: Dict[SubsetMask, bool] = {}

    def is_independent(self, mask: SubsetMask) -> bool:
        if mask & ~self.ground:
            return False
        if mask == 0:
            return True
        known = self._forests.get(mask)
        if known is None:
            known = self._is_forest(mask)
            if len(self._forests) >= _FOREST_CACHE_SIZE:
                self._forests.clear()
            self._forests[mask] = known
        return known

    def _is_forest(self, mask: SubsetMask) -> bool:
        graph = nx.MultiGraph()
        for u in iter_elements(mask):
            a, b = self.endpoints[u]
            if a == b:
                return False
            graph.add_edge(a, b)
        return nx.is_forest(graph)


class DummyExtendedMatroid(IndependenceOracle):
    """S is independent iff |S| ≤ r and S ∖ D is independent in the base."""

    def __init__(self, base: IndependenceOracle, dummies: SubsetMask):
        width = max(base.width, dummies.bit_length())
        super().__init__(width, base.ground | dummies, name=base.name)
        self.base = base
        self.dummies = dummies
        self.r = size(dummies)

    def is_independent(self, mask: SubsetMask) -> bool:
        if mask & ~self.ground:
            return False
        return size(mask) <= self.r and self.base.is_independent(mask & ~self.dummies)

    def structure(self) -> Optional[RankStructure]:
        inner = self.base.structure()
        if inner is None:
            return None
        return inner.extended(self.dummies, self.r)

    def raw(self) -> IndependenceOracle:
        base = self.base.raw()
        return self if base is self.base else DummyExtendedMatroid(base, self.dummies)


class CountedMatroid(IndependenceOracle):
    """Forwards every call and bumps the ledger's independence counter."""

    def __init__(self, inner: IndependenceOracle, ledger: QueryLedger):
        super().__init__(inner.width, inner.ground, name=inner.name)
        self.inner = inner
        self.ledger = ledger

    def is_independent(self, mask: SubsetMask) -> bool:
        self.ledger.add_independence()
        return self.inner.is_independent(mask)

    def structure(self) -> Optional[RankStructure]:
        return self.inner.structure()

    def raw(self) -> IndependenceOracle:
        return self.inner.raw()


def build_matroid(spec: InstanceSpec) -> IndependenceOracle:
    index: Dict[str, int] = {name: i for i, name in enumerate(spec.elements)}
    mat = spec.matroid
    if isinstance(mat, UniformMatroidSpec):
        return UniformMatroid(spec.n, mat.k)
    if isinstance(mat, PartitionMatroidSpec):
        parts = [mask_of(index[name] for name in part) for part in mat.parts]
        return PartitionMatroid(spec.n, parts, mat.capacities)
    if isinstance(mat, GraphicMatroidSpec):
        return GraphicMatroid([tuple(mat.edges[name]) for name in spec.elements])
    raise ValueError(f"unsupported matroid {type(mat).__name__}")


def counted_matroid(M: IndependenceOracle, ledger: QueryLedger) -> CountedMatroid:
    return CountedMatroid(M, ledger)


def extend_with_dummies(M: IndependenceOracle, dummies: SubsetMask) -> DummyExtendedMatroid:
    if dummies & M.ground:
        raise ValueError("dummy ids overlap the ground set")
    return DummyExtendedMatroid(M, dummies)


def dummy_mask(n: int, r: int) -> SubsetMask:
    """Dummies occupy the ids n..n+r-1."""
    return range_mask(n, n + r)


def greedy_basis(M: IndependenceOracle, mask: SubsetMask, start: SubsetMask = 0) -> SubsetMask:
    """Grow `start` by the elements of `mask` in ascending id order; |mask| queries."""
    basis = start
    for u in iter_elements(mask):
        if M.is_independent(basis | (1 << u)):
            basis |= 1 << u
    return basis


def rank(M: IndependenceOracle, mask: SubsetMask) -> int:
    return size(greedy_basis(M, mask))


def remove_loops(M: IndependenceOracle, candidates: SubsetMask) -> SubsetMask:
    """Elements of `candidates` that are not self loops; one query each."""
    return mask_of(u for u in iter_elements(candidates) if M.is_independent(1 << u))


class MinorHandle:
    """
    The minor (M / D')|_C over the original oracle.

    Rank is emulated by r(A ∪ D') - r(D'): a basis of D' is grown once and
    cached, and A is grown greedily on top of it.
    """

    def __init__(self, base: IndependenceOracle, restricted_to: SubsetMask, contracted_by: SubsetMask = 0):
        if restricted_to & contracted_by:
            raise ValueError("restriction and contraction sets must be disjoint")
        if (restricted_to | contracted_by) & ~base.ground:
            raise ValueError("minor sets must lie in the ground set")
        self.base = base
        self.restricted_to = restricted_to
        self.contracted_by = contracted_by
        self._contraction_basis: Optional[SubsetMask] = None

    @property
    def ground(self) -> SubsetMask:
        return self.restricted_to

    def contraction_basis(self) -> SubsetMask:
        if self._contraction_basis is None:
            self._contraction_basis = greedy_basis(self.base, self.contracted_by)
        return self._contraction_basis

    def restrict(self, mask: SubsetMask) -> "MinorHandle":
        return MinorHandle(self.base, mask & self.restricted_to, self.contracted_by)

    def contract(self, mask: SubsetMask) -> "MinorHandle":
        mask &= self.restricted_to
        return MinorHandle(self.base, self.restricted_to & ~mask, self.contracted_by | mask)

    def structure(self) -> Optional[RankStructure]:
        return self.base.structure()

    def __repr__(self) -> str:
        return f"MinorHandle(C={self.restricted_to:#x}, D'={self.contracted_by:#x})"


def minor_rank(h: MinorHandle, mask: SubsetMask) -> int:
    basis = h.contraction_basis()
    grown = greedy_basis(h.base, mask, start=basis)
    return size(grown) - size(basis)


def _minor_rank_value(h: MinorHandle, mask: SubsetMask) -> int:
    structure = h.structure()
    if structure is not None:
        return structure.rank(mask | h.contracted_by) - structure.rank(h.contracted_by)
    return minor_rank(h, mask)


def minor_min_slack(
    h: MinorHandle,
    x: MarginalVec,
    include: SubsetMask = 0,
    exclude: SubsetMask = 0,
    exhaustive_cap: Optional[int] = None,
) -> Tuple[Fraction, SubsetMask]:
    """
    min r'(A) - x(A) over include ⊆ A ⊆ C ∖ exclude, with the witness A.

    Ties go to the smallest |A|, then the smallest mask. Structured matroids
    use the closed form; anything else is enumerated up to the cap.
    """
    structure = h.structure()
    if structure is not None:
        return structure.min_slack(x, h.restricted_to, h.contracted_by, include, exclude)

    cap = settings.EXHAUSTIVE_CAP if exhaustive_cap is None else exhaustive_cap
    if size(h.restricted_to) > cap:
        raise CapabilityError(
            f"exhaustive rank enumeration over {size(h.restricted_to)} elements exceeds cap {cap}",
            {"ground_size": size(h.restricted_to), "cap": cap},
        )
    free = h.restricted_to & ~exclude & ~include
    best: Optional[Tuple[Fraction, int, SubsetMask]] = None
    for sub in submasks(free):
        a = sub | include
        key = (minor_rank(h, a) - x.total(a), size(a), a)
        if best is None or key < best:
            best = key
    return best[0], best[2]


def in_minor_polytope(h: MinorHandle, x: MarginalVec, exhaustive_cap: Optional[int] = None) -> bool:
    """x|_C ∈ P(M'): every rank inequality of the minor holds."""
    slack, _ = minor_min_slack(h, x, exhaustive_cap=exhaustive_cap)
    return slack >= 0


def in_minor_base_polytope(h: MinorHandle, x: MarginalVec, exhaustive_cap: Optional[int] = None) -> bool:
    """x|_C ∈ B(M'): in the polytope and x(C) = r'(C)."""
    if x.total(h.restricted_to) != _minor_rank_value(h, h.restricted_to):
        return False
    return in_minor_polytope(h, x, exhaustive_cap)


def in_matroid_polytope(M: IndependenceOracle, x: MarginalVec, exhaustive_cap: Optional[int] = None) -> bool:
    return in_minor_polytope(MinorHandle(M, M.ground), x, exhaustive_cap)


def in_base_polytope(M: IndependenceOracle, x: MarginalVec, exhaustive_cap: Optional[int] = None) -> bool:
    return in_minor_base_polytope(MinorHandle(M, M.ground), x, exhaustive_cap)


def polytope_slack(M: IndependenceOracle, x: MarginalVec, exhaustive_cap: Optional[int] = None) -> Fraction:
    """min_A r(A) - x(A); non-negative iff x ∈ P(M)."""
    slack, _ = minor_min_slack(MinorHandle(M, M.ground), x, exhaustive_cap=exhaustive_cap)
    return slack
