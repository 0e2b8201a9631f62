import math
from fractions import Fraction

import numpy as np
import pytest

from core.sets import size
from scripts.utils import random_instance
from services.matroids import dummy_mask, extend_with_dummies
from services.oracles import QueryLedger, with_dummies
from services.problem import build_problem
from services.split import accelerated_split, split, threshold_passes
from services.verify import brute_force_opt, check_split_guarantee
from tests.helpers import cardinality, modular, uniform

A, B, C = 1, 2, 4


def test_split_with_one_part_is_greedy():
    part = split(uniform(3, 2), modular(3, 2, 1), 1)
    assert part.parts == (A | B,)
    assert part.gain_sum(modular(3, 2, 1)) == 5


def test_split_ties_go_to_the_first_part():
    part = split(uniform(2, 2), modular(3, 2), 2)
    assert part.parts == (A | B, 0)
    assert part.is_base


def test_split_with_rank_many_parts_finds_a_max_weight_base():
    f = modular(5, 1, 4, 2)
    M = uniform(4, 2)
    part = split(M, f, 2)
    assert part.union == A | C
    assert f(part.union) == brute_force_opt(M, f).opt_value


def test_threshold_passes():
    assert threshold_passes(2, Fraction(1, 2)) == math.ceil(4 * math.log(8)) == 9
    assert threshold_passes(0, Fraction(1, 2)) == 0


def test_accelerated_split_first_pass():
    part = accelerated_split(uniform(3, 2), cardinality(3), 1, Fraction(1, 2))
    assert part.parts == (A | B,)
    assert part.is_base


def test_accelerated_split_pads_with_dummies():
    M = extend_with_dummies(uniform(2, 2), dummy_mask(2, 2))
    f = with_dummies(modular(0, 3), 2)
    part = accelerated_split(M, f, 1, Fraction(1, 2), dummies=dummy_mask(2, 2))
    assert part.union & B
    assert not part.union & A
    assert size(part.union) == 2
    assert part.is_base


@pytest.mark.parametrize("eps", [Fraction(1), Fraction(1, 2), Fraction(1, 10)])
def test_accelerated_split_respects_the_rank(eps):
    part = accelerated_split(uniform(3, 1), modular(1, 2, 3), 2, eps)
    assert size(part.union) == 1


@pytest.mark.parametrize("eps", [Fraction(0), Fraction(3, 2)])
def test_accelerated_split_rejects_bad_eps(eps):
    with pytest.raises(ValueError):
        accelerated_split(uniform(3, 1), modular(1, 2, 3), 1, eps)


def test_query_budget_of_accelerated_split():
    rng_seeds = range(20)
    eps = Fraction(1, 10)
    for seed in rng_seeds:
        problem = build_problem(random_instance(seed, 7))
        ledger = QueryLedger()
        M, f = problem.instrumented(ledger)
        n = problem.width
        for ell in (1, 2, 3):
            before = ledger.snapshot()
            accelerated_split(M, f, ell, eps, dummies=problem.dummies)
            spent = ledger.snapshot() - before
            passes = threshold_passes(problem.rank, eps)
            assert spent.value_queries <= passes * n * ell + 2 * n
            assert spent.independence_queries <= passes * n + n


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(200))
def test_guarantees_on_a_random_corpus(seed):
    problem = build_problem(random_instance(seed, int(np.random.default_rng(seed).integers(1, 11))))
    M, f = problem.extended()
    opt = brute_force_opt(problem.matroid, problem.objective)
    for ell in (1, 2, 3):
        records = check_split_guarantee(split(M, f, ell), opt, f, ell, None, "split", problem.monotone)
        fast = accelerated_split(M, f, ell, Fraction(1, 10), dummies=problem.dummies)
        records += check_split_guarantee(fast, opt, f, ell, Fraction(1, 10), "accelerated", problem.monotone)
        failed = [(r.check, r.params) for r in records if not r.passed]
        assert not failed, (problem.name, failed)


@pytest.mark.parametrize("seed", range(40))
def test_only_the_first_part_takes_dummies(seed):
    problem = build_problem(random_instance(seed, int(np.random.default_rng(seed).integers(1, 9))))
    M, f = problem.extended()
    for ell in (1, 2, 3):
        part = accelerated_split(M, f, ell, Fraction(1, 2), dummies=problem.dummies)
        assert part.is_base
        assert size(part.union) == problem.rank
        assert M.is_independent(part.union)
        for later in part.parts[1:]:
            assert not later & problem.dummies
        real = part.union & ~problem.dummies
        assert size(part.parts[0] & problem.dummies) == problem.rank - size(real)


def test_split_parts_are_disjoint_and_independent():
    for seed in range(20):
        problem = build_problem(random_instance(seed, 6, matroid="graphic"))
        M, f = problem.extended()
        part = split(M, f, 3, paranoid=True)
        union = 0
        for p in part.parts:
            assert not union & p
            union |= p
        assert M.is_independent(union)
        assert size(union) == problem.rank
