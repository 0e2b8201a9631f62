"""
Query-count benchmark over the generated instance families.
"""

import csv
import time
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable, List, Union

from tqdm import tqdm

from core.logging import get_logger
from schemas.reports import BENCH_COLUMNS, BenchRow
from scripts.utils import FAMILIES, family_instance
from services.extension import ExtensionEvaluator
from services.mcg import measured_continuous_greedy
from services.oracles import QueryLedger
from services.problem import Problem, build_problem
from services.rounding import PipageRounder, lift_to_base_polytope

logger = get_logger(__name__)


class BenchmarkService:
    """Sweeps n for one family and records per-phase ledgers and wall time."""

    def _row(self, problem: Problem, eps: Fraction, phase: str, ledger: QueryLedger, started: float) -> BenchRow:
        return BenchRow(
            n=problem.n,
            r=problem.rank,
            eps=str(eps),
            phase=phase,
            value_queries=ledger.value_queries,
            independence_queries=ledger.independence_queries,
            wall_ms=round((time.perf_counter() - started) * 1000, 3),
        )

    def run_one(self, problem: Problem, eps: Fraction, with_rounding: bool = False) -> List[BenchRow]:
        rows: List[BenchRow] = []
        ledger = QueryLedger()
        M, f = problem.instrumented(ledger)
        started = time.perf_counter()
        trace = measured_continuous_greedy(M, ExtensionEvaluator(f), eps, problem.dummies)
        rows.append(self._row(problem, eps, "mcg", ledger, started))

        if with_rounding:
            ledger = QueryLedger()
            M, f = problem.instrumented(ledger)
            started = time.perf_counter()
            lifted = lift_to_base_polytope(trace.y_final, M, problem.dummies, check=False)
            PipageRounder(M, ExtensionEvaluator(f), problem.dummies).round(lifted)
            rows.append(self._row(problem, eps, "rounding", ledger, started))
        return rows

    def run(
        self,
        family: str,
        n_list: Iterable[int],
        eps: Fraction,
        trials: int = 1,
        with_rounding: bool = False,
        seed: int = 0,
    ) -> List[BenchRow]:
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}")
        jobs = [(n, t) for n in n_list for t in range(trials)]
        rows: List[BenchRow] = []
        for n, t in tqdm(jobs, desc=f"bench {family}", unit="run", disable=not jobs):
            problem = build_problem(family_instance(family, n, seed))
            rows.extend(self.run_one(problem, eps, with_rounding))
            logger.info("bench run done", family=family, n=n, trial=t)
        return rows

    def write_csv(self, rows: List[BenchRow], out: Union[str, Path, IO[str]]) -> None:
        if isinstance(out, (str, Path)):
            with open(out, "w", newline="", encoding="utf-8") as fh:
                self.write_csv(rows, fh)
            return
        writer = csv.DictWriter(out, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row.model_dump())


benchmark_service = BenchmarkService()
