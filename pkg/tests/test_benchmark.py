from fractions import Fraction

import pytest

from scripts.utils import coverage_uniform_instance, cut_partition_instance
from services.benchmark import benchmark_service
from services.extension import ExtensionEvaluator
from services.mcg import measured_continuous_greedy
from services.oracles import QueryLedger
from services.problem import build_problem
from services.split import threshold_passes


def test_families_have_rank_n_over_four():
    assert build_problem(coverage_uniform_instance(16)).rank == 4
    assert build_problem(cut_partition_instance(16)).rank == 4


def test_counts_are_identical_across_trials(tmp_path):
    rows = benchmark_service.run("cut-partition", [8], Fraction(1), trials=2, with_rounding=True)
    assert [r.phase for r in rows] == ["mcg", "rounding", "mcg", "rounding"]
    assert rows[0].value_queries == rows[2].value_queries
    assert rows[0].independence_queries == rows[2].independence_queries
    assert rows[1].value_queries == rows[3].value_queries
    out = tmp_path / "bench.csv"
    benchmark_service.write_csv(rows, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "n,r,eps,phase,value_queries,independence_queries,wall_ms"
    assert len(lines) == 5


def test_single_iteration_stays_within_the_split_budget():
    rows = benchmark_service.run("coverage-uniform", [8, 16], Fraction(1))
    for row in rows:
        width = row.n + row.r
        passes = threshold_passes(row.r, Fraction(1))
        assert row.value_queries <= passes * width + 2 * width


@pytest.mark.slow
def test_half_epsilon_sweep_stays_within_the_split_envelope():
    eps = Fraction(1, 2)
    for n in (8, 16, 32):
        problem = build_problem(coverage_uniform_instance(n))
        ledger = QueryLedger()
        M, f = problem.instrumented(ledger)
        trace = measured_continuous_greedy(M, ExtensionEvaluator(f), eps, problem.dummies)
        # per iteration: f(∅), the singletons, then every pass tries each element on each part
        calls = 1 + n + threshold_passes(problem.rank, trace.eps_effective) * n * trace.ell
        assert trace.iterations == 8
        assert trace.g_queries <= trace.iterations * calls
        assert ledger.value_queries <= sum(calls * 2 ** it.y_before.ff for it in trace.records)
        assert ledger.value_queries >= trace.g_queries

        row = benchmark_service.run_one(problem, eps)[0]
        assert (row.value_queries, row.independence_queries) == (
            ledger.value_queries,
            ledger.independence_queries,
        )
