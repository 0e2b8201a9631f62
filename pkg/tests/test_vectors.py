from fractions import Fraction

import pytest

from core.sets import elements, mask_of, range_mask, submasks
from core.vectors import (
    MarginalVec,
    SparseExtVec,
    combine_disjoint,
    indicator,
    join_indicator,
    marginals,
    psum,
    zero,
)

A, B, C = 1, 2, 4
half = Fraction(1, 2)


def test_indicator():
    assert indicator(0, 3) == zero(3)
    assert indicator(A, 3) == SparseExtVec({A: 1}, 3)
    both = indicator(A | B, 3)
    assert both == SparseExtVec({A | B: 1}, 3)
    assert marginals(both) == MarginalVec([1, 1, 0])


def test_join_indicator():
    assert join_indicator(zero(2), A) == SparseExtVec({A: 1}, 2)
    assert join_indicator(SparseExtVec({A: half}, 2), A) == SparseExtVec({A: 1}, 2)
    assert join_indicator(SparseExtVec({B: half}, 2), A) == SparseExtVec({A: 1, B: half}, 2)


def test_psum():
    y = SparseExtVec({A: half}, 2)
    assert psum(y, zero(2)) == y
    assert psum(y, y) == SparseExtVec({A: Fraction(3, 4)}, 2)
    assert psum(y, SparseExtVec({B: Fraction(1, 3)}, 2)) == SparseExtVec({A: half, B: Fraction(1, 3)}, 2)


def test_marginals():
    assert marginals(SparseExtVec({A | B: 1}, 3)) == MarginalVec([1, 1, 0])
    x = marginals(SparseExtVec({A | B: half, A: half}, 2))
    assert x[0] == Fraction(3, 4)
    assert x[1] == half
    assert marginals(zero(4)) == MarginalVec.zeros(4)


def test_sparse_vector_drops_zeros_and_counts_fractional_keys():
    y = SparseExtVec({A: 0, B: half, A | C: 1}, 3)
    assert y.keys() == [B, A | C]
    assert y.supp == 2
    assert y.ff == 1
    assert y.integral_union() == A | C


@pytest.mark.parametrize("entries", [{0: half}, {A: Fraction(3, 2)}, {8: half}])
def test_sparse_vector_rejects_bad_entries(entries):
    with pytest.raises(ValueError):
        SparseExtVec(entries, 3)


def test_sparse_vector_rejects_floats():
    with pytest.raises(TypeError):
        SparseExtVec({A: 0.5}, 2)


def test_combine_disjoint_skips_empty_parts():
    delta = Fraction(1, 8)
    assert combine_disjoint(delta, [A, 0, B | C], 3) == SparseExtVec({A: delta, B | C: delta}, 3)


def test_submasks_ascending():
    assert list(submasks(A | C)) == [0, A, C, A | C]
    assert elements(range_mask(2, 5)) == [2, 3, 4]
    assert mask_of([0, 2]) == A | C
