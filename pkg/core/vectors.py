"""
Exact vectors over sets and elements.

SparseExtVec is a vector indexed by subsets of the ground set, stored
sparsely; MarginalVec is the per-element vector of inclusion probabilities
of its random union. Both are immutable and use Fraction throughout.
"""

from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from core.sets import SubsetMask, ElementId, iter_elements, full_mask

Rational = Union[int, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(value: Rational) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def prob_sum(a: Fraction, b: Fraction) -> Fraction:
    """a ⊕ b = 1 - (1-a)(1-b)."""
    return 1 - (1 - a) * (1 - b)


class SparseExtVec:
    """
    A vector in [0,1]^(2^N), storing only non-zero coordinates.

    Keys are SubsetMasks ordered by numeric value; the empty set is never
    a key. `width` is the size of the ground set the keys live in.
    """

    __slots__ = ("_entries", "_width", "_ff")

    def __init__(self, entries: Optional[Mapping[SubsetMask, Rational]] = None, width: int = 0):
        cleaned: Dict[SubsetMask, Fraction] = {}
        limit = full_mask(width)
        for key in sorted(entries or {}):
            value = as_fraction(entries[key])
            if value == 0:
                continue
            if key <= 0:
                raise ValueError("the empty set cannot carry a coordinate")
            if key & ~limit:
                raise ValueError(f"key {key:#x} exceeds ground width {width}")
            if not 0 < value <= 1:
                raise ValueError(f"coordinate {value} outside [0,1]")
            cleaned[key] = value
        self._entries = cleaned
        self._width = width
        self._ff = sum(1 for v in cleaned.values() if v < 1)

    @property
    def width(self) -> int:
        return self._width

    @property
    def supp(self) -> int:
        return len(self._entries)

    @property
    def ff(self) -> int:
        return self._ff

    def items(self) -> Iterator[Tuple[SubsetMask, Fraction]]:
        return iter(self._entries.items())

    def keys(self) -> List[SubsetMask]:
        return list(self._entries)

    def get(self, key: SubsetMask) -> Fraction:
        return self._entries.get(key, ZERO)

    def __contains__(self, key: SubsetMask) -> bool:
        return key in self._entries

    def with_entry(self, key: SubsetMask, value: Rational) -> "SparseExtVec":
        """Copy with coordinate `key` set to `value` (0 removes it)."""
        entries = dict(self._entries)
        entries[key] = as_fraction(value)
        return SparseExtVec(entries, self._width)

    def with_entries(self, updates: Mapping[SubsetMask, Rational]) -> "SparseExtVec":
        entries = dict(self._entries)
        for key, value in updates.items():
            entries[key] = as_fraction(value)
        return SparseExtVec(entries, self._width)

    def widen(self, width: int) -> "SparseExtVec":
        if width < self._width:
            raise ValueError("cannot shrink a vector's ground set")
        return SparseExtVec(self._entries, width)

    def fractional_items(self) -> List[Tuple[SubsetMask, Fraction]]:
        return [(k, v) for k, v in self._entries.items() if v < 1]

    def integral_union(self) -> SubsetMask:
        """Union of all keys whose coordinate is exactly 1."""
        union = 0
        for key, value in self._entries.items():
            if value == 1:
                union |= key
        return union

    def support_union(self) -> SubsetMask:
        union = 0
        for key in self._entries:
            union |= key
        return union

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseExtVec):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash(tuple(self._entries.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{k:#x}: {v}" for k, v in self._entries.items())
        return f"SparseExtVec({{{body}}}, width={self._width})"


class MarginalVec:
    """Per-element probabilities over a ground set of size `width`."""

    __slots__ = ("_values",)

    def __init__(self, values: Iterable[Rational]):
        vals = tuple(as_fraction(v) for v in values)
        for v in vals:
            if not 0 <= v <= 1:
                raise ValueError(f"marginal {v} outside [0,1]")
        self._values = vals

    @classmethod
    def zeros(cls, width: int) -> "MarginalVec":
        return cls([ZERO] * width)

    @classmethod
    def of_set(cls, mask: SubsetMask, width: int) -> "MarginalVec":
        return cls([ONE if (mask >> u) & 1 else ZERO for u in range(width)])

    @property
    def width(self) -> int:
        return len(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __getitem__(self, u: ElementId) -> Fraction:
        return self._values[u]

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self._values)

    def as_tuple(self) -> Tuple[Fraction, ...]:
        return self._values

    def total(self, mask: Optional[SubsetMask] = None) -> Fraction:
        """x(A), or the sum of all coordinates when no mask is given."""
        if mask is None:
            return sum(self._values, ZERO)
        return sum((self._values[u] for u in iter_elements(mask)), ZERO)

    def max_norm(self) -> Fraction:
        return max(self._values, default=ZERO)

    def ones(self) -> SubsetMask:
        mask = 0
        for u, v in enumerate(self._values):
            if v == 1:
                mask |= 1 << u
        return mask

    def support(self) -> SubsetMask:
        mask = 0
        for u, v in enumerate(self._values):
            if v > 0:
                mask |= 1 << u
        return mask

    def fractional(self, mask: Optional[SubsetMask] = None) -> SubsetMask:
        out = 0
        for u, v in enumerate(self._values):
            if 0 < v < 1 and (mask is None or (mask >> u) & 1):
                out |= 1 << u
        return out

    def is_integral(self, mask: Optional[SubsetMask] = None) -> bool:
        return self.fractional(mask) == 0

    def psum(self, other: "MarginalVec") -> "MarginalVec":
        if other.width != self.width:
            raise ValueError("width mismatch")
        return MarginalVec(prob_sum(a, b) for a, b in zip(self._values, other._values))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MarginalVec):
            return NotImplemented
        return self._values == other._values

    def __hash__(self) -> int:
        return hash(self._values)

    def __repr__(self) -> str:
        return "MarginalVec(" + ", ".join(str(v) for v in self._values) + ")"


def zero(width: int) -> SparseExtVec:
    return SparseExtVec({}, width)


def indicator(mask: SubsetMask, width: int) -> SparseExtVec:
    """𝟙_S as a set-indexed vector; the empty set gives the zero vector."""
    if mask == 0:
        return zero(width)
    return SparseExtVec({mask: ONE}, width)


def join_indicator(y: SparseExtVec, mask: SubsetMask) -> SparseExtVec:
    """𝟙_A ∨ y: coordinate A raised to 1, everything else unchanged."""
    if mask == 0:
        return y
    return y.with_entry(mask, ONE)


def psum(y: SparseExtVec, z: SparseExtVec) -> SparseExtVec:
    """Coordinate-wise y ⊕ z; identical keys coalesce."""
    entries: Dict[SubsetMask, Fraction] = dict(y.items())
    for key, value in z.items():
        entries[key] = prob_sum(entries.get(key, ZERO), value)
    return SparseExtVec(entries, max(y.width, z.width))


def scale(y: SparseExtVec, factor: Rational) -> SparseExtVec:
    c = as_fraction(factor)
    if not 0 <= c <= 1:
        raise ValueError("scale factor must lie in [0,1]")
    return SparseExtVec({k: v * c for k, v in y.items()}, y.width)


def combine_disjoint(delta: Rational, parts: Iterable[SubsetMask], width: int) -> SparseExtVec:
    """δ · Σ_j 𝟙_{T_j}; empty parts contribute nothing, equal parts add up."""
    d = as_fraction(delta)
    entries: Dict[SubsetMask, Fraction] = {}
    for part in parts:
        if part:
            entries[part] = entries.get(part, ZERO) + d
    return SparseExtVec(entries, width)


def marginals(y: SparseExtVec) -> MarginalVec:
    """marg_u(y) = 1 - ∏_{S ∋ u} (1 - y_S)."""
    keep = [ONE] * y.width
    for key, value in y.items():
        miss = 1 - value
        for u in iter_elements(key):
            keep[u] *= miss
    return MarginalVec(1 - k for k in keep)
