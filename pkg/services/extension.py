"""
Evaluation of the extended multilinear extension F, the derived set
function g_y(A) = F(𝟙_A ∨ y), and the standard multilinear extension F̄.

F(y) is the expected value of f on the random union of the keys of y, each
key S drawn independently with probability y_S. Keys with y_S = 1 are merged
up front, so an evaluation costs exactly 2^ff(y) value queries.

The unions of one high combination go to the objective as a single batch.
Recently seen points are answered from a small cache; a hit still charges
its 2^ff queries to the objective's ledger.
"""

from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.config import settings
from core.exceptions import CapabilityError
from core.logging import get_logger
from core.sets import SubsetMask
from core.vectors import MarginalVec, SparseExtVec, join_indicator
from services.oracles import ValueOracle

logger = get_logger(__name__)

# low keys are expanded into a table once and replayed for each high combination
_TABLE_BITS = 12
_CACHE_SIZE = 4096

_Items = Tuple[Tuple[SubsetMask, Fraction], ...]


@lru_cache(maxsize=64)
def _expand(keys: Tuple[SubsetMask, ...], nums: Tuple[int, ...], comps: Tuple[int, ...]) -> Tuple[List[SubsetMask], List[int]]:
    """All 2^k (union, weight numerator) pairs for the given fractional keys."""
    unions = [0]
    weights = [1]
    for key, a, c in zip(keys, nums, comps):
        unions = unions + [u | key for u in unions]
        weights = [w * c for w in weights] + [w * a for w in weights]
    return unions, weights


def _weighted_sum(values: Sequence[Fraction], weights: Sequence[int]) -> Fraction:
    """Σ v·w with integer weights, grouped by denominator to stay in int arithmetic."""
    by_den: Dict[int, int] = {}
    for v, w in zip(values, weights):
        d = v.denominator
        by_den[d] = by_den.get(d, 0) + v.numerator * w
    return sum((Fraction(num, d) for d, num in by_den.items()), Fraction(0))


class ExtensionEvaluator:
    """Evaluates F, g_y and F̄ against one value oracle."""

    def __init__(self, objective: ValueOracle, ff_cap: Optional[int] = None, workers: Optional[int] = None):
        self.objective = objective
        self.ff_cap = settings.FF_CAP if ff_cap is None else ff_cap
        self.workers = settings.EVAL_WORKERS if workers is None else workers
        self._cache: "OrderedDict[Tuple[SubsetMask, _Items], Fraction]" = OrderedDict()
        self.cache_hits = 0

    @property
    def width(self) -> int:
        return self.objective.n

    def raw(self) -> "ExtensionEvaluator":
        """Same evaluator over the uncounted objective."""
        return ExtensionEvaluator(self.objective.raw(), self.ff_cap, self.workers)

    def _expectation(self, fixed: SubsetMask, items: Sequence[Tuple[SubsetMask, Fraction]]) -> Fraction:
        """E[f(fixed ∪ ⋃ J)] where key S joins J independently with probability p_S."""
        if not items:
            return Fraction(self.objective(fixed))

        cache_key = (fixed, tuple(items))
        hit = self._cache.get(cache_key)
        if hit is not None:
            self._cache.move_to_end(cache_key)
            self.objective.charge(1 << len(items))
            self.cache_hits += 1
            return hit

        keys = tuple(k for k, _ in items)
        # p = a/b, 1 - p = (b - a)/b; every weight shares the denominator ∏ b
        nums = tuple(p.numerator for _, p in items)
        comps = tuple(p.denominator - p.numerator for _, p in items)
        denom = 1
        for _, p in items:
            denom *= p.denominator

        split = max(0, len(items) - _TABLE_BITS)
        high = (keys[:split], nums[:split], comps[:split])
        low_unions, low_weights = _expand(keys[split:], nums[split:], comps[split:])

        def run(codes: range) -> Fraction:
            acc = Fraction(0)
            for code in codes:
                union = fixed
                weight = 1
                for j in range(split):
                    if (code >> j) & 1:
                        union |= high[0][j]
                        weight *= high[1][j]
                    else:
                        weight *= high[2][j]
                values = self.objective.values([union | u for u in low_unions])
                acc += _weighted_sum(values, low_weights) * weight
            return acc

        outer = 1 << split
        if self.workers <= 1 or outer == 1:
            total = run(range(outer))
        else:
            step = -(-outer // self.workers)
            chunks = [range(s, min(s + step, outer)) for s in range(0, outer, step)]
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                partials = list(pool.map(run, chunks))
            total = sum(partials, Fraction(0))
        result = total / denom

        self._cache[cache_key] = result
        if len(self._cache) > _CACHE_SIZE:
            self._cache.popitem(last=False)
        return result

    def eval_F(self, y: SparseExtVec) -> Fraction:
        if y.ff > self.ff_cap:
            raise CapabilityError(
                f"ff(y) = {y.ff} exceeds the evaluation cap {self.ff_cap}",
                {"ff": y.ff, "cap": self.ff_cap},
            )
        return self._expectation(y.integral_union(), y.fractional_items())

    def eval_g(self, y: SparseExtVec, mask: SubsetMask) -> Fraction:
        """g_y(A) = F(𝟙_A ∨ y)."""
        return self.eval_F(join_indicator(y, mask))

    def partial_wrt(self, y: SparseExtVec, key: SubsetMask) -> Fraction:
        """∂F/∂y_S = F(y | y_S ← 1) - F(y | y_S ← 0)."""
        return self.eval_F(y.with_entry(key, 1)) - self.eval_F(y.with_entry(key, 0))

    def eval_Fbar_exact(self, x: MarginalVec, cap: Optional[int] = None) -> Fraction:
        """Exact F̄(x); the fractional coordinates are enumerated, the others fixed."""
        cap = settings.EXHAUSTIVE_CAP if cap is None else cap
        fixed = x.ones()
        items = [(1 << u, p) for u, p in enumerate(x) if 0 < p < 1]
        if len(items) > cap:
            raise CapabilityError(
                f"{len(items)} fractional coordinates exceed the exact F̄ cap {cap}",
                {"fractional": len(items), "cap": cap},
            )
        return self._expectation(fixed, items)

    def eval_Fbar_sample(self, x: MarginalVec, samples: int, seed: int) -> float:
        """Monte Carlo F̄(x) from independent-inclusion samples; one query per sample."""
        if samples < 1:
            raise ValueError("samples must be at least 1")
        rng = np.random.default_rng(seed)
        probs = np.array([float(p) for p in x], dtype=float)
        draws = rng.random((samples, len(probs))) < probs
        weights = 1 << np.arange(len(probs), dtype=object)
        total = Fraction(0)
        for row in draws:
            mask = int(np.sum(weights[row])) if row.any() else 0
            total += self.objective(mask)
        return float(total / samples)
