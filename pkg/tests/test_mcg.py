from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from core.exceptions import CapabilityError
from core.vectors import SparseExtVec, marginals
from scripts.utils import random_instance
from services.extension import ExtensionEvaluator
from services.matroids import dummy_mask, extend_with_dummies, in_matroid_polytope
from services.mcg import (
    effective_epsilon,
    measured_continuous_greedy,
    projected_ff,
    random_decomposition,
    value_estimate,
)
from services.oracles import QueryLedger, with_dummies
from services.problem import build_problem
from services.verify import brute_force_opt, check_mcg_trace
from tests.helpers import cardinality, uniform

A = 1


def tiny():
    dummies = dummy_mask(2, 1)
    M = extend_with_dummies(uniform(2, 1), dummies)
    return M, ExtensionEvaluator(with_dummies(cardinality(2), 1)), dummies


def run(problem, eps, ledger=None):
    M, f = problem.instrumented(ledger or QueryLedger())
    return measured_continuous_greedy(M, ExtensionEvaluator(f), eps, problem.dummies)


def test_single_iteration_at_eps_one():
    M, ev, dummies = tiny()
    trace = measured_continuous_greedy(M, ev, Fraction(1), dummies)
    assert trace.iterations == 1
    assert trace.delta == 1
    assert trace.ell == 1
    assert trace.y_final == SparseExtVec({A: 1}, 3)
    assert value_estimate(trace) == 1
    assert value_estimate(trace, ev) == 1


def test_effective_epsilon():
    assert effective_epsilon(Fraction(2, 5)) == Fraction(1, 3)
    assert effective_epsilon(Fraction(1, 2)) == Fraction(1, 2)
    assert projected_ff(Fraction(1, 3)) == 81
    with pytest.raises(ValueError):
        effective_epsilon(Fraction(0))


def test_refuses_small_eps_before_any_query():
    M, ev, dummies = tiny()
    with pytest.raises(CapabilityError) as info:
        measured_continuous_greedy(M, ev, Fraction(1, 3), dummies)
    assert info.value.detail["projected_ff"] == 81


def test_zero_objective_estimates_zero(load_fixture):
    trace = run(load_fixture("zero-objective"), Fraction(1, 2))
    assert value_estimate(trace) == 0


@pytest.mark.parametrize("name", ["coverage-uniform", "cut-partition", "modular-graphic"])
def test_trace_checks_pass_at_half(load_fixture, name):
    problem = load_fixture(name)
    trace = run(problem, Fraction(1, 2))
    assert trace.iterations == 8
    assert trace.delta == Fraction(1, 8)
    M, f = problem.extended()
    opt = brute_force_opt(problem.matroid, problem.objective)
    records = check_mcg_trace(trace, opt, ExtensionEvaluator(f), problem.monotone, name, matroid=M)
    failed = [(r.check, r.params) for r in records if not r.passed]
    assert not failed
    assert value_estimate(trace) <= opt.opt_value
    assert in_matroid_polytope(M, marginals(trace.y_final))


def test_one_recursion_check_at_eps_one(load_fixture):
    problem = load_fixture("coverage-uniform")
    trace = run(problem, Fraction(1))
    M, f = problem.extended()
    opt = brute_force_opt(problem.matroid, problem.objective)
    records = check_mcg_trace(trace, opt, ExtensionEvaluator(f), problem.monotone)
    assert [r.check for r in records].count("mcg_recursion") == 1


def test_corrupted_trace_is_caught(load_fixture):
    problem = load_fixture("coverage-uniform")
    trace = run(problem, Fraction(1, 2))
    bad = trace.records[3]
    trace.records[3] = replace(bad, value_after=bad.value_after - 1)
    M, f = problem.extended()
    opt = brute_force_opt(problem.matroid, problem.objective)
    records = check_mcg_trace(trace, opt, ExtensionEvaluator(f), problem.monotone)
    failed = {(r.check, r.params.get("i")) for r in records if not r.passed}
    assert ("mcg_trace_value", 4) in failed


def test_decomposition_at_eps_one_is_the_trace(load_fixture):
    problem = load_fixture("cut-partition")
    trace = run(problem, Fraction(1))
    decomposition = random_decomposition(trace, seed=123)
    assert decomposition.sets == (trace.records[0].union,)
    assert decomposition.x == marginals(trace.y_final)


def test_decomposition_makes_no_queries_and_stays_independent(load_fixture):
    problem = load_fixture("coverage-uniform")
    ledger = QueryLedger()
    trace = run(problem, Fraction(1, 2), ledger)
    before = ledger.snapshot()
    M, _ = problem.extended()
    for seed in range(50):
        decomposition = random_decomposition(trace, seed)
        assert all(M.is_independent(s) for s in decomposition.sets)
        assert all(s & ~r.union == 0 for s, r in zip(decomposition.sets, trace.records))
    assert ledger.snapshot() == before


def test_same_seed_same_decomposition(load_fixture):
    trace = run(load_fixture("cut-partition"), Fraction(1, 2))
    assert random_decomposition(trace, 5) == random_decomposition(trace, 5)


TRACE_CHECKS = {"mcg_recursion", "mcg_support", "mcg_max_marginal", "mcg_value_floor"}


@pytest.mark.slow
@pytest.mark.parametrize(
    "eps, seed",
    [(Fraction(1), seed) for seed in range(40)] + [(Fraction(1, 2), seed) for seed in range(40, 70)],
)
def test_trace_checks_on_a_random_corpus(eps, seed):
    # ε = 1 runs one iteration, so it affords larger instances
    top = 9 if eps == 1 else 7
    problem = build_problem(random_instance(seed, int(np.random.default_rng(seed).integers(1, top))))
    trace = run(problem, eps)
    M, f = problem.extended()
    opt = brute_force_opt(problem.matroid, problem.objective)
    records = check_mcg_trace(trace, opt, ExtensionEvaluator(f), problem.monotone, problem.name, matroid=M)
    failed = [(r.check, r.params) for r in records if not r.passed]
    assert not failed, (problem.name, failed)
    assert TRACE_CHECKS <= {r.check for r in records}
    assert trace.iterations == effective_epsilon(eps).denominator ** 3
