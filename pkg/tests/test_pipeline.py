from fractions import Fraction

import numpy as np
import pytest

from core.exceptions import CapabilityError, SchemaError
from core.vectors import marginals
from schemas.reports import SolveModeEnum
from services.extension import ExtensionEvaluator
from services.mcg import measured_continuous_greedy, random_decomposition
from services.oracles import QueryLedger
from services.pipeline import solver_service


def test_solve_coverage_at_half(load_fixture):
    problem = load_fixture("coverage-uniform")
    report = solver_service.solve(problem, Fraction(1, 2), with_opt=True)
    assert report.mode == "deterministic"
    assert report.epsilon_effective == "1/2"
    assert report.mcg.iterations == 8
    assert len(report.solution) <= 2
    assert Fraction(report.solution_value) >= Fraction(report.fractional_value)
    assert report.lossless
    assert report.opt.opt_value == "10"
    assert Fraction(report.fractional_value) <= 10
    assert report.opt.ratio == str(Fraction(report.solution_value) / 10)
    assert set(report.ledgers) == {"mcg", "rounding", "total"}
    total = report.ledgers["total"]
    assert total.value_queries == report.ledgers["mcg"].value_queries + report.ledgers["rounding"].value_queries
    assert report.objective_checks.non_negative and report.objective_checks.submodular


def test_solve_is_reproducible(load_fixture):
    problem = load_fixture("cut-partition")
    first = solver_service.solve(problem, Fraction(1, 2), seed=4).model_dump_json()
    second = solver_service.solve(problem, Fraction(1, 2), seed=4).model_dump_json()
    assert first == second


def test_sampled_mode(load_fixture):
    problem = load_fixture("cut-partition")
    report = solver_service.solve(problem, Fraction(1, 2), mode="sampled-rounding", seed=2)
    assert report.rounding is None
    assert set(report.ledgers) == {"mcg", "sampling", "total"}
    sampled = report.sampled
    assert len(sampled.sets) == report.mcg.iterations
    assert sampled.best_set == report.solution
    assert problem.matroid.is_independent(
        sum(1 << problem.labels.index(name) for name in report.solution)
    )
    assert sampled.fbar_samples > 0


def test_unknown_mode(load_fixture):
    with pytest.raises(SchemaError):
        solver_service.solve(load_fixture("cut-partition"), Fraction(1), mode="random")


def test_small_eps_is_refused(load_fixture):
    with pytest.raises(CapabilityError) as info:
        solver_service.solve(load_fixture("cut-partition"), Fraction(1, 3))
    assert "81" in info.value.message


def test_estimate(load_fixture):
    report = solver_service.estimate(load_fixture("modular-graphic"), Fraction(1, 2), with_opt=True)
    assert Fraction(report.value) <= Fraction(report.opt.opt_value)
    assert set(report.ledgers) == {"mcg", "total"}
    zero = solver_service.estimate(load_fixture("zero-objective"), Fraction(1))
    assert zero.value == "0"
    assert zero.opt is None


def test_mode_accepts_the_enum(load_fixture):
    report = solver_service.solve(load_fixture("zero-objective"), Fraction(1), mode=SolveModeEnum.sampled_rounding)
    assert report.mode == "sampled-rounding"


@pytest.mark.slow
def test_decomposition_is_unbiased_and_keeps_the_value(load_fixture):
    problem = load_fixture("cut-partition")
    ledger = QueryLedger()
    M, f = problem.instrumented(ledger)
    trace = measured_continuous_greedy(M, ExtensionEvaluator(f), Fraction(1, 2), problem.dummies)
    target = np.array([float(v) for v in marginals(trace.y_final)])
    fractional = float(trace.records[-1].value_after)
    exact = ExtensionEvaluator(problem.extended()[1])

    before = ledger.snapshot()
    seeds = 10_000
    xs = np.zeros((seeds, trace.width))
    values = np.zeros(seeds)
    for seed in range(seeds):
        x = random_decomposition(trace, seed).x
        xs[seed] = [float(v) for v in x]
        values[seed] = float(exact.eval_Fbar_exact(x))
    assert ledger.snapshot() == before

    # each x_u lies in [0, 1], so its std is at most 1/2
    assert np.all(np.abs(xs.mean(axis=0) - target) <= 3 * 0.5 / np.sqrt(seeds))
    sigma = values.std(ddof=1) / np.sqrt(seeds)
    assert values.mean() >= fractional - 3 * sigma
