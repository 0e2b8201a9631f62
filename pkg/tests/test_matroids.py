from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from core.sets import full_mask, iter_elements, mask_of, size, submasks
from core.vectors import MarginalVec
from services.matroids import (
    GraphicMatroid,
    MinorHandle,
    PartitionMatroid,
    UniformMatroid,
    counted_matroid,
    dummy_mask,
    extend_with_dummies,
    in_base_polytope,
    in_matroid_polytope,
    in_minor_base_polytope,
    minor_min_slack,
    minor_rank,
    rank,
    remove_loops,
)
from services.oracles import QueryLedger

A, B, C, D = 1, 2, 4, 8
half = Fraction(1, 2)


def test_uniform_independence():
    M = UniformMatroid(3, 2)
    assert M.is_independent(A | B)
    assert not M.is_independent(A | B | C)


def test_partition_independence():
    M = PartitionMatroid(3, [A | B, C], [1, 1])
    assert M.is_independent(A | C)
    assert not M.is_independent(A | B)


def test_graphic_triangle():
    M = GraphicMatroid([("a", "b"), ("b", "c"), ("c", "a")])
    for pair in combinations([A, B, C], 2):
        assert M.is_independent(pair[0] | pair[1])
    assert not M.is_independent(A | B | C)
    assert rank(M, A | B | C) == 2


def test_graphic_self_loop_is_a_loop():
    M = GraphicMatroid([("a", "b"), ("c", "c")])
    assert not M.is_independent(B)
    assert remove_loops(M, A | B) == A


def test_extension_with_dummies():
    M = UniformMatroid(1, 1)
    X = extend_with_dummies(M, dummy_mask(1, 1))
    assert X.is_independent(B)
    assert X.is_independent(A)
    assert not X.is_independent(A | B)

    G = GraphicMatroid([("a", "b"), ("b", "c"), ("c", "a")])
    base = A | B
    XG = extend_with_dummies(G, dummy_mask(3, 2))
    assert XG.is_independent(base)
    assert not any(XG.is_independent(base | (1 << d)) for d in (3, 4))


def test_rank_basics():
    M = UniformMatroid(4, 2)
    for mask in submasks(full_mask(4)):
        assert rank(M, mask) == min(size(mask), 2)
    assert rank(M, 0) == 0


def test_greedy_rank_matches_brute_force():
    rng = np.random.default_rng(3)
    for trial in range(5):
        edges = [(f"v{int(a)}", f"v{int(b)}") for a, b in rng.integers(0, 4, size=(6, 2))]
        M = GraphicMatroid(edges)
        for mask in submasks(full_mask(6)):
            best = max(size(s) for s in submasks(mask) if M.is_independent(s))
            assert rank(M, mask) == best


def test_minor_rank():
    M = extend_with_dummies(UniformMatroid(2, 2), dummy_mask(2, 2))
    h = MinorHandle(M, M.ground)
    assert minor_rank(h, A) == 1
    contracted = MinorHandle(M, M.ground & ~C, contracted_by=C)
    assert minor_rank(contracted, A) == 1
    assert minor_rank(contracted, A | B) == 1
    assert minor_rank(contracted, 0) == 0


def test_base_polytope_membership():
    M = UniformMatroid(2, 1)
    assert in_base_polytope(M, MarginalVec([half, half]))
    assert not in_base_polytope(M, MarginalVec([Fraction(3, 4), half]))
    assert in_base_polytope(M, MarginalVec([1, 0]))
    assert in_matroid_polytope(M, MarginalVec([half, 0]))
    assert not in_matroid_polytope(M, MarginalVec([Fraction(3, 4), half]))


def test_closed_form_slack_matches_exhaustive():
    rng = np.random.default_rng(11)
    M = extend_with_dummies(PartitionMatroid(5, [A | B, C | D | 16], [1, 2]), dummy_mask(5, 3))
    h = MinorHandle(M, M.ground)
    assert h.structure() is not None
    for trial in range(20):
        x = MarginalVec(Fraction(int(v), 4) for v in rng.integers(0, 5, size=8))
        u, v = (int(w) for w in rng.choice(8, size=2, replace=False))
        closed, witness = minor_min_slack(h, x, include=1 << u, exclude=1 << v)
        # ties go to the smaller set, then the smaller mask
        value, _, best = min(
            (rank(M, a) - x.total(a), size(a), a)
            for a in submasks(M.ground & ~(1 << v))
            if a & (1 << u)
        )
        assert (closed, witness) == (value, best)
        assert rank(M, witness) - x.total(witness) == closed


def test_counted_matroid_counts_independence_queries():
    ledger = QueryLedger()
    M = counted_matroid(UniformMatroid(3, 1), ledger)
    M.is_independent(A)
    M.is_independent(A | B)
    assert ledger.independence_queries == 2
    assert ledger.value_queries == 0
    rank(M.raw(), M.ground)
    assert ledger.independence_queries == 2


def test_polytope_check_refuses_large_generic_ground():
    from core.exceptions import CapabilityError

    edges = [(f"v{i}", f"v{i + 1}") for i in range(24)]
    M = GraphicMatroid(edges)
    with pytest.raises(CapabilityError):
        in_matroid_polytope(M, MarginalVec.zeros(24))


@pytest.mark.parametrize(
    "M, x, tight",
    [
        (PartitionMatroid(4, [A | B, C | D], [1, 1]), MarginalVec([half, half, Fraction(1, 4), Fraction(3, 4)]), A | B),
        (
            GraphicMatroid([("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")]),
            MarginalVec([Fraction(2, 3), Fraction(2, 3), Fraction(2, 3), 1]),
            A | B | C,
        ),
    ],
)
def test_tight_set_splits_the_base_polytope(M, x, tight):
    assert in_base_polytope(M, x)
    assert x.total(tight) == rank(M, tight)
    h = MinorHandle(M, M.ground)
    assert in_minor_base_polytope(h.restrict(tight), x)
    assert in_minor_base_polytope(h.contract(tight), x)


def _all_masks(M):
    return list(submasks(M.ground))


def _brute_rank(M, mask):
    return max(size(s) for s in submasks(mask) if M.is_independent(s))


AXIOM_MATROIDS = [
    UniformMatroid(6, 3),
    UniformMatroid(5, 0),
    PartitionMatroid(6, [A | B | C, D | 16], [2, 1]),
    PartitionMatroid(4, [A | B, C | D], [0, 2]),
    GraphicMatroid([("a", "b"), ("b", "c"), ("c", "a"), ("c", "d"), ("d", "d"), ("a", "b")]),
    GraphicMatroid([("a", "b"), ("c", "d"), ("b", "c"), ("d", "a"), ("a", "c"), ("b", "d")]),
]
AXIOM_IDS = ["uniform-6-3", "uniform-5-0", "partition-with-loop", "partition-zero-cap", "graphic-parallel", "graphic-k4"]


@pytest.mark.parametrize("M", AXIOM_MATROIDS, ids=AXIOM_IDS)
def test_independence_axioms_hold_exhaustively(M):
    masks = _all_masks(M)
    independent = [s for s in masks if M.is_independent(s)]
    assert M.is_independent(0)
    for s in independent:
        for u in iter_elements(s):
            assert M.is_independent(s & ~(1 << u))
    for small in independent:
        for big in independent:
            if size(small) < size(big):
                assert any(M.is_independent(small | (1 << u)) for u in iter_elements(big & ~small)), (small, big)


@pytest.mark.parametrize("M", AXIOM_MATROIDS, ids=AXIOM_IDS)
def test_rank_is_monotone_and_submodular_exhaustively(M):
    masks = _all_masks(M)
    r = {mask: rank(M, mask) for mask in masks}
    structure = M.structure()
    for mask in masks:
        assert r[mask] == _brute_rank(M, mask)
        if structure is not None:
            assert structure.rank(mask) == r[mask]
        for u in iter_elements(M.ground & ~mask):
            assert r[mask] <= r[mask | (1 << u)] <= r[mask] + 1
    for a in masks:
        for b in masks:
            assert r[a] + r[b] >= r[a | b] + r[a & b]


@pytest.mark.parametrize("M", AXIOM_MATROIDS, ids=AXIOM_IDS)
def test_dummy_extension_preserves_the_rank(M):
    n = size(M.ground)
    r = rank(M, M.ground)
    dummies = dummy_mask(n, r)
    X = extend_with_dummies(M, dummies)
    assert rank(X, X.ground) == r
    for mask in _all_masks(M):
        assert rank(X, mask) == rank(M, mask)
        if M.is_independent(mask):
            # any independent set is topped up to a base with dummies
            assert rank(X, mask | dummies) == r
            padded = mask | mask_of(range(n, n + r - size(mask)))
            assert X.is_independent(padded)
        if M.is_independent(mask) and size(mask) == r:
            assert not any(X.is_independent(mask | (1 << d)) for d in iter_elements(dummies))
    structure = X.structure()
    if structure is not None:
        for mask in submasks(X.ground):
            assert structure.rank(mask) == rank(X, mask)
