"""
Subset encoding over the (dummy-augmented) ground set.

A SubsetMask is a plain non-negative int; bit u is set iff element u is in
the set. Iteration is always in ascending element id.
"""

from typing import Iterable, Iterator, List

SubsetMask = int
ElementId = int

EMPTY: SubsetMask = 0


def bit(u: ElementId) -> SubsetMask:
    return 1 << u


def full_mask(n: int) -> SubsetMask:
    """Mask of the elements 0..n-1."""
    return (1 << n) - 1


def range_mask(start: int, stop: int) -> SubsetMask:
    """Mask of the elements start..stop-1."""
    return full_mask(stop) & ~full_mask(start)


def mask_of(elements: Iterable[ElementId]) -> SubsetMask:
    mask = 0
    for u in elements:
        mask |= 1 << u
    return mask


def elements(mask: SubsetMask) -> List[ElementId]:
    return list(iter_elements(mask))


def iter_elements(mask: SubsetMask) -> Iterator[ElementId]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def size(mask: SubsetMask) -> int:
    return bin(mask).count("1")


def contains(mask: SubsetMask, u: ElementId) -> bool:
    return (mask >> u) & 1 == 1


def is_subset(a: SubsetMask, b: SubsetMask) -> bool:
    return a & ~b == 0


def lowest(mask: SubsetMask) -> ElementId:
    """Smallest element id of a non-empty mask."""
    if not mask:
        raise ValueError("lowest() of an empty set")
    return (mask & -mask).bit_length() - 1


def submasks(mask: SubsetMask) -> Iterator[SubsetMask]:
    """All subsets of mask, in ascending numeric order."""
    members = elements(mask)
    for code in range(1 << len(members)):
        sub = 0
        j = 0
        while code:
            if code & 1:
                sub |= 1 << members[j]
            code >>= 1
            j += 1
        yield sub


def format_mask(mask: SubsetMask, labels: List[str]) -> List[str]:
    return [labels[u] for u in iter_elements(mask)]
