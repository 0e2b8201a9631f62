"""
Value oracles: objective constructors, the dummy-element wrapper and
query ledgers.

An oracle is called with a SubsetMask and returns an exact Fraction.
Wrappers never cache. `values` evaluates a batch of masks and `charge`
books queries whose answers the caller already holds, so ledger counts
follow the query model even when the work is reused.
"""

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Sequence, Tuple

import networkx as nx
import numpy as np

from core.logging import get_logger
from core.sets import SubsetMask, iter_elements, full_mask, range_mask
from schemas.instance import (
    CoverageObjective,
    CutObjective,
    InstanceSpec,
    ModularObjective,
)

logger = get_logger(__name__)


@dataclass(frozen=True)
class LedgerSnapshot:
    value_queries: int
    independence_queries: int

    def __sub__(self, other: "LedgerSnapshot") -> "LedgerSnapshot":
        return LedgerSnapshot(
            self.value_queries - other.value_queries,
            self.independence_queries - other.independence_queries,
        )


class QueryLedger:
    """Counters for value and independence queries; increments are atomic."""

    def __init__(self):
        self._lock = threading.Lock()
        self._value = 0
        self._independence = 0

    @property
    def value_queries(self) -> int:
        return self._value

    @property
    def independence_queries(self) -> int:
        return self._independence

    def add_value(self, count: int = 1) -> None:
        with self._lock:
            self._value += count

    def add_independence(self, count: int = 1) -> None:
        with self._lock:
            self._independence += count

    def snapshot(self) -> LedgerSnapshot:
        with self._lock:
            return LedgerSnapshot(self._value, self._independence)

    def __repr__(self) -> str:
        return f"QueryLedger(value={self._value}, independence={self._independence})"


class ValueOracle:
    """Base class: a set function over the elements 0..n-1."""

    def __init__(self, n: int, monotone: bool, name: str = "objective"):
        self.n = n
        self.monotone = monotone
        self.name = name

    def __call__(self, mask: SubsetMask) -> Fraction:
        return self.evaluate(mask)

    def evaluate(self, mask: SubsetMask) -> Fraction:
        raise NotImplementedError

    def values(self, masks: Sequence[SubsetMask]) -> List[Fraction]:
        return [self(mask) for mask in masks]

    def charge(self, count: int) -> None:
        """Book `count` queries without evaluating; only counting wrappers act on it."""

    def raw(self) -> "ValueOracle":
        """The same function without any accounting wrapper."""
        return self

    def marginal(self, u: int, mask: SubsetMask) -> Fraction:
        return self(mask | (1 << u)) - self(mask)


class CoverageOracle(ValueOracle):
    def __init__(self, covers: Sequence[SubsetMask], weights: Sequence[Fraction], name: str = "coverage"):
        super().__init__(len(covers), monotone=True, name=name)
        self._covers = list(covers)
        self._weights = list(weights)

    def evaluate(self, mask: SubsetMask) -> Fraction:
        covered = 0
        for u in iter_elements(mask):
            covered |= self._covers[u]
        return sum((self._weights[i] for i in iter_elements(covered)), Fraction(0))


class CutOracle(ValueOracle):
    """Weighted undirected cut; parallel edges add up."""

    def __init__(self, n: int, edges: Iterable[Tuple[int, int, Fraction]], name: str = "cut"):
        super().__init__(n, monotone=False, name=name)
        self.graph = nx.MultiGraph()
        self.graph.add_nodes_from(range(n))
        for u, v, w in edges:
            self.graph.add_edge(u, v, weight=Fraction(w))
        # (bit u, bit v, weight) per edge; the evaluation hot path skips the graph
        self._edges = [(1 << a, 1 << b, w) for a, b, w in self.graph.edges(data="weight") if a != b]

    def evaluate(self, mask: SubsetMask) -> Fraction:
        if mask == 0 or mask == full_mask(self.n):
            return Fraction(0)
        return sum((w for a, b, w in self._edges if bool(mask & a) != bool(mask & b)), Fraction(0))

    def cut_size(self, mask: SubsetMask) -> Fraction:
        """Reference value through networkx."""
        return Fraction(nx.cut_size(self.graph, list(iter_elements(mask)), weight="weight"))


class ModularOracle(ValueOracle):
    def __init__(self, weights: Sequence[Fraction], name: str = "modular"):
        super().__init__(len(weights), monotone=True, name=name)
        self._weights = [Fraction(w) for w in weights]

    def evaluate(self, mask: SubsetMask) -> Fraction:
        return sum((self._weights[u] for u in iter_elements(mask)), Fraction(0))


class FunctionOracle(ValueOracle):
    """Wraps a plain callable on masks (used for injected objectives)."""

    def __init__(self, n: int, fn: Callable[[SubsetMask], Fraction], monotone: bool = False, name: str = "function"):
        super().__init__(n, monotone=monotone, name=name)
        self._fn = fn

    def evaluate(self, mask: SubsetMask) -> Fraction:
        return Fraction(self._fn(mask))


class DummyExtendedOracle(ValueOracle):
    """f over N ∪ D evaluated as f(S ∖ D); dummies are the ids n..n+r-1."""

    def __init__(self, base: ValueOracle, r: int):
        super().__init__(base.n + r, monotone=base.monotone, name=base.name)
        self.base = base
        self.r = r
        self.dummies = range_mask(base.n, base.n + r)

    def evaluate(self, mask: SubsetMask) -> Fraction:
        return self.base(mask & ~self.dummies)

    def values(self, masks: Sequence[SubsetMask]) -> List[Fraction]:
        keep = ~self.dummies
        return self.base.values([mask & keep for mask in masks])

    def charge(self, count: int) -> None:
        self.base.charge(count)

    def raw(self) -> ValueOracle:
        base = self.base.raw()
        return self if base is self.base else DummyExtendedOracle(base, self.r)


class CountedOracle(ValueOracle):
    """Forwards every call and bumps the ledger's value counter."""

    def __init__(self, inner: ValueOracle, ledger: QueryLedger):
        super().__init__(inner.n, monotone=inner.monotone, name=inner.name)
        self.inner = inner
        self.ledger = ledger

    def evaluate(self, mask: SubsetMask) -> Fraction:
        self.ledger.add_value()
        return self.inner(mask)

    def values(self, masks: Sequence[SubsetMask]) -> List[Fraction]:
        self.ledger.add_value(len(masks))
        return self.inner.values(masks)

    def charge(self, count: int) -> None:
        self.ledger.add_value(count)
        self.inner.charge(count)

    def raw(self) -> ValueOracle:
        return self.inner.raw()


def build_objective(spec: InstanceSpec) -> ValueOracle:
    """Build the objective named by an instance; ids follow spec.elements order."""
    index: Dict[str, int] = {name: i for i, name in enumerate(spec.elements)}
    obj = spec.objective

    if isinstance(obj, CoverageObjective):
        items: Dict[str, int] = {}
        for name in spec.elements:
            for item in obj.covers.get(name, []):
                items.setdefault(item, len(items))
        for item in obj.item_weights:
            items.setdefault(item, len(items))
        weights = [Fraction(1)] * len(items)
        for item, w in obj.item_weights.items():
            weights[items[item]] = Fraction(w)
        covers = []
        for name in spec.elements:
            mask = 0
            for item in obj.covers.get(name, []):
                mask |= 1 << items[item]
            covers.append(mask)
        return CoverageOracle(covers, weights)

    if isinstance(obj, CutObjective):
        edges = [(index[e.u], index[e.v], Fraction(e.weight)) for e in obj.edges]
        return CutOracle(spec.n, edges)

    if isinstance(obj, ModularObjective):
        return ModularOracle([Fraction(obj.weights.get(name, 0)) for name in spec.elements])

    raise ValueError(f"unsupported objective {type(obj).__name__}")


def with_dummies(f: ValueOracle, r: int) -> DummyExtendedOracle:
    if r < 0:
        raise ValueError("r must be non-negative")
    return DummyExtendedOracle(f, r)


def counted(f: ValueOracle, ledger: QueryLedger) -> CountedOracle:
    return CountedOracle(f, ledger)


def random_mask(rng: np.random.Generator, n: int, p: float = 0.5) -> SubsetMask:
    mask = 0
    for u in np.flatnonzero(rng.random(n) < p):
        mask |= 1 << int(u)
    return mask


def spot_check_non_negative(f: ValueOracle, rng: np.random.Generator, samples: int = 1000) -> bool:
    for _ in range(samples):
        if f(random_mask(rng, f.n)) < 0:
            return False
    return True


def spot_check_submodular(f: ValueOracle, rng: np.random.Generator, samples: int = 200) -> bool:
    """Random S ⊆ T, u ∉ T: f(u|S) >= f(u|T)."""
    if f.n == 0:
        return True
    for _ in range(samples):
        big = random_mask(rng, f.n)
        small = big & random_mask(rng, f.n)
        outside = [u for u in range(f.n) if not (big >> u) & 1]
        if not outside:
            continue
        u = int(outside[int(rng.integers(len(outside)))])
        if f.marginal(u, small) < f.marginal(u, big):
            return False
    return True
