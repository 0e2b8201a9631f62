"""
Deterministic rounding of an extended vector to an independent set.

The vector is first lifted into the base polytope by raising the dummy
coordinate y_D. Pipage then repeatedly relaxes two fractional elements
(so only their singleton coordinates carry them), moves mass between them
in the F-better direction until one becomes integral or a rank constraint
of the current minor becomes tight, and recurses into the tight minor.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from core.config import settings
from core.exceptions import CapabilityError, ContractViolation, PreconditionError
from core.logging import get_logger
from core.sets import SubsetMask, iter_elements, lowest, size
from core.vectors import SparseExtVec, marginals, prob_sum
from services.extension import ExtensionEvaluator
from services.matroids import (
    IndependenceOracle,
    MinorHandle,
    in_matroid_polytope,
    in_minor_base_polytope,
    minor_min_slack,
)

logger = get_logger(__name__)


@dataclass(frozen=True)
class TightSetResult:
    delta: Fraction
    witness: SubsetMask


@dataclass
class RoundingState:
    y: SparseExtVec
    relaxed: SubsetMask
    minor: MinorHandle
    ff_initial: int


@dataclass
class PipageStats:
    iterations: int = 0
    max_depth: int = 0
    max_ff: int = 0
    relaxations: int = 0
    f_evaluations: int = 0
    restrictions: int = 0
    contractions: int = 0


def ceil_log2(n: int) -> int:
    return max(0, (n - 1).bit_length())


def lift_amount(y: SparseExtVec, dummies: SubsetMask) -> Fraction:
    """
    The β with y_D ← y_D ⊕ β putting Σ marg(y) at r = |D|.

    Non-dummy marginals are untouched by y_D, so β solves
    X + Σ_{d∈D} (1 - (1-m_d)(1-β)) = r with X the non-dummy mass. When the
    dummies carry no mass this is (r - Σ_u marg_u(y)) / r.
    """
    r = size(dummies)
    x = marginals(y)
    total = x.total()
    if total == r:
        return Fraction(0)
    dummy_mass = x.total(dummies)
    if total > r:
        raise PreconditionError(
            f"marginal mass {total} exceeds the rank {r}", {"mass": str(total), "rank": r}
        )
    real_mass = total - dummy_mass
    return 1 - real_mass / (r - dummy_mass)


def lift_to_base_polytope(
    y: SparseExtVec,
    M: IndependenceOracle,
    dummies: SubsetMask,
    check: bool = True,
) -> SparseExtVec:
    """
    Raise y_D so marg(y) lands in the base polytope of the dummy-extended M.
    F is unchanged because dummies never change f.
    """
    if check:
        x = marginals(y)
        try:
            inside = in_matroid_polytope(M.raw(), x)
        except CapabilityError:
            logger.warning("polytope check skipped, ground too large", width=y.width)
            inside = x.total() <= size(dummies)
        if not inside:
            raise PreconditionError("marg(y) is not in the matroid polytope")

    beta = lift_amount(y, dummies)
    if beta == 0 or dummies == 0:
        return y
    lifted = y.with_entry(dummies, prob_sum(y.get(dummies), beta))
    if marginals(lifted).total() != size(dummies):
        raise ContractViolation("lifted marginal mass differs from the rank")
    logger.info("lifted to base polytope", beta=str(beta), ff=lifted.ff)
    return lifted


def relax(y: SparseExtVec, u: int) -> SparseExtVec:
    """
    Make u y-relaxed: y_{u} ← marg_u(y), and for each key S + u (S ≠ ∅)
    move its mass onto S via y_S ← y_S ⊕ y_{S+u}, y_{S+u} ← 0.
    """
    ubit = 1 << u
    keep = Fraction(1)
    for key, value in y.items():
        if key & ubit:
            keep *= 1 - value
    entries = dict(y.items())
    for key, value in y.items():
        if key & ubit and key != ubit:
            rest = key & ~ubit
            entries[rest] = prob_sum(entries.get(rest, Fraction(0)), value)
            entries[key] = Fraction(0)
    entries[ubit] = 1 - keep
    return SparseExtVec(entries, y.width)


def relax_all(y: SparseExtVec, mask: Optional[SubsetMask] = None) -> SparseExtVec:
    """Relax every element (of mask) in ascending id order; leaves only singletons."""
    targets = y.support_union() if mask is None else mask
    for u in iter_elements(targets):
        y = relax(y, u)
    return y


def is_relaxed(y: SparseExtVec, u: int) -> bool:
    ubit = 1 << u
    return all(key == ubit for key in y.keys() if key & ubit)


def tight_set_min(
    h: MinorHandle,
    x,
    u: int,
    v: int,
    exhaustive_cap: Optional[int] = None,
) -> TightSetResult:
    """min r'(A) - x(A) over {u} ⊆ A ⊆ N' - v."""
    if u == v:
        raise ValueError("u and v must differ")
    if not (h.ground >> u) & 1 or not (h.ground >> v) & 1:
        raise ValueError("u and v must lie in the minor's ground set")
    delta, witness = minor_min_slack(h, x, include=1 << u, exclude=1 << v, exhaustive_cap=exhaustive_cap)
    return TightSetResult(delta, witness)


def hit_constraint(
    state: RoundingState,
    u: int,
    v: int,
    paranoid: bool = False,
    check_matroid: Optional[IndependenceOracle] = None,
) -> Tuple[SparseExtVec, SubsetMask]:
    """
    Move mass from v to u until v hits 0 or a constraint containing u and
    not v becomes tight. Returns the new vector and the set A' that was hit.
    """
    y = state.y
    if paranoid:
        if u == v or not is_relaxed(y, u) or not is_relaxed(y, v):
            raise ContractViolation("hit_constraint needs two distinct relaxed elements")
        _check_base(state.minor, y, check_matroid, "before hit_constraint")

    x = marginals(y)
    result = tight_set_min(state.minor, x, u, v)
    yu = y.get(1 << u)
    yv = y.get(1 << v)
    if yv < result.delta:
        z = y.with_entries({1 << u: yu + yv, 1 << v: 0})
        hit = 1 << v
    else:
        z = y.with_entries({1 << u: yu + result.delta, 1 << v: yv - result.delta})
        hit = result.witness

    if paranoid:
        _check_base(state.minor, z, check_matroid, "after hit_constraint")
    return z, hit


def _check_base(h: MinorHandle, y: SparseExtVec, check_matroid: Optional[IndependenceOracle], where: str) -> None:
    base = check_matroid if check_matroid is not None else h.base.raw()
    view = MinorHandle(base, h.restricted_to, h.contracted_by)
    try:
        inside = in_minor_base_polytope(view, marginals(y))
    except CapabilityError:
        logger.debug("base polytope check skipped", where=where)
        return
    if not inside:
        raise ContractViolation(f"marg(y) left the base polytope of the minor {where}")


class PipageRounder:
    """
    Recursive deterministic pipage over minors of the dummy-extended matroid.

    The relaxed set and the iteration counter are shared by all recursion
    levels. F is tracked exactly and must never decrease.
    """

    def __init__(
        self,
        M: IndependenceOracle,
        evaluator: ExtensionEvaluator,
        dummies: SubsetMask,
        paranoid: Optional[bool] = None,
    ):
        self.M = M
        self.evaluator = evaluator
        self.dummies = dummies
        self.paranoid = settings.PARANOID if paranoid is None else paranoid
        self.stats = PipageStats()
        self.y_final: Optional[SparseExtVec] = None
        self._relaxed = 0
        self._value = Fraction(0)
        self._ff_input = 0
        self._ff_limit = 0
        self._n = 0

    def _eval(self, y: SparseExtVec) -> Fraction:
        self.stats.f_evaluations += 1
        return self.evaluator.eval_F(y)

    def _observe(self, y: SparseExtVec, value: Fraction) -> None:
        if value < self._value:
            raise ContractViolation(f"F decreased from {self._value} to {value}")
        self._value = value
        self.stats.max_ff = max(self.stats.max_ff, y.ff)
        if y.ff > self._ff_limit:
            raise ContractViolation(f"ff(y) = {y.ff} exceeds the bound {self._ff_limit}")

    def round(self, y: SparseExtVec) -> SubsetMask:
        self._n = size(self.M.ground)
        self._ff_input = y.ff
        self._ff_limit = y.ff + 2 + ceil_log2(self._n)
        self._relaxed = 0
        self._value = self._eval(y)
        self.stats = PipageStats(max_ff=y.ff, f_evaluations=1)
        input_value = self._value

        if self.paranoid:
            _check_base(MinorHandle(self.M, self.M.ground), y, None, "at pipage input")

        y = self._run(y, MinorHandle(self.M, self.M.ground), depth=0)

        x = marginals(y)
        if not x.is_integral():
            raise ContractViolation("pipage finished with fractional marginals")
        self.y_final = y
        solution = x.ones() & ~self.dummies
        logger.info(
            "pipage done",
            iterations=self.stats.iterations,
            max_depth=self.stats.max_depth,
            max_ff=self.stats.max_ff,
            restrictions=self.stats.restrictions,
            contractions=self.stats.contractions,
            value=str(self._value),
            input_value=str(input_value),
        )
        return solution

    def _run(self, y: SparseExtVec, h: MinorHandle, depth: int) -> SparseExtVec:
        if depth > ceil_log2(self._n):
            raise ContractViolation(f"recursion depth {depth} exceeds ⌈log2 n⌉")
        self.stats.max_depth = max(self.stats.max_depth, depth)
        ground = h.ground

        while True:
            x = marginals(y)
            fractional = x.fractional(ground)
            if fractional == 0:
                return y

            self.stats.iterations += 1
            if self.stats.iterations > 2 * self._n:
                raise ContractViolation("pipage exceeded 2n iterations")

            chosen = self._relaxed & fractional
            while size(chosen) < 2:
                pending = fractional & ~self._relaxed
                if pending == 0:
                    raise ContractViolation("fewer than two fractional elements in the minor")
                w = lowest(pending)
                y = relax(y, w)
                self._relaxed |= 1 << w
                self.stats.relaxations += 1
                if self.paranoid:
                    self._observe(y, self._eval(y))
                else:
                    self.stats.max_ff = max(self.stats.max_ff, y.ff)
                chosen = self._relaxed & fractional
            if self.paranoid and size(chosen) > 2:
                raise ContractViolation(f"{size(chosen)} relaxed fractional elements, expected 2")

            members = list(iter_elements(chosen))
            u, v = members[0], members[1]
            state = RoundingState(y=y, relaxed=self._relaxed, minor=h, ff_initial=self._ff_input)
            y_plus, hit_plus = hit_constraint(state, u, v, paranoid=self.paranoid)
            y_minus, hit_minus = hit_constraint(state, v, u, paranoid=self.paranoid)
            f_plus = self._eval(y_plus)
            f_minus = self._eval(y_minus)
            if f_plus >= f_minus:
                y, hit, value = y_plus, hit_plus, f_plus
            else:
                y, hit, value = y_minus, hit_minus, f_minus
            self._observe(y, value)
            logger.debug("pipage step", u=u, v=v, depth=depth, hit=hit, value=str(value))

            yu, yv = y.get(1 << u), y.get(1 << v)
            if 0 < yu < 1 and 0 < yv < 1:
                if 2 * size(hit) <= size(ground):
                    self.stats.restrictions += 1
                    y = self._run(y, h.restrict(hit), depth + 1)
                else:
                    self.stats.contractions += 1
                    y = self._run(y, h.contract(hit), depth + 1)


def deterministic_pipage(
    M: IndependenceOracle,
    evaluator: ExtensionEvaluator,
    y: SparseExtVec,
    dummies: SubsetMask,
    paranoid: Optional[bool] = None,
) -> SubsetMask:
    """Round y (already lifted into the base polytope) to T with f(T) ≥ F(y)."""
    return PipageRounder(M, evaluator, dummies, paranoid).round(y)
