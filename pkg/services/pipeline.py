"""
Solver pipeline.

Runs continuous greedy on the dummy-extended problem, then either the
deterministic lift + pipage rounding or the random decomposition, and
assembles the solve / estimate reports. Every phase has its own ledger.
"""

from fractions import Fraction
from typing import Dict, Optional, Tuple, Union

import numpy as np

from core.config import settings
from core.exceptions import SchemaError
from core.logging import get_logger
from core.sets import SubsetMask
from core.vectors import MarginalVec, marginals
from schemas.reports import (
    EstimateReport,
    LedgerOut,
    McgSummary,
    ObjectiveChecks,
    OptOut,
    RoundingSummary,
    SampledOut,
    SolveModeEnum,
    SolveReport,
)
from services.extension import ExtensionEvaluator
from services.mcg import McgTrace, measured_continuous_greedy, random_decomposition, value_estimate
from services.oracles import LedgerSnapshot, QueryLedger, spot_check_non_negative, spot_check_submodular
from services.problem import Problem
from services.rounding import PipageRounder, lift_amount, lift_to_base_polytope
from services.verify import brute_force_opt

logger = get_logger(__name__)

MODES = tuple(m.value for m in SolveModeEnum)


def _ledger_out(snapshot: LedgerSnapshot) -> LedgerOut:
    return LedgerOut(
        value_queries=snapshot.value_queries,
        independence_queries=snapshot.independence_queries,
    )


def _ledgers(phases: Dict[str, QueryLedger]) -> Dict[str, LedgerOut]:
    out = {name: _ledger_out(ledger.snapshot()) for name, ledger in phases.items()}
    out["total"] = LedgerOut(
        value_queries=sum(l.value_queries for l in out.values()),
        independence_queries=sum(l.independence_queries for l in out.values()),
    )
    return out


def _decimal(value: Fraction) -> float:
    return float(value)


class SolverService:
    """Service running the solve and estimate pipelines on a built problem."""

    def objective_checks(self, problem: Problem, seed: int) -> ObjectiveChecks:
        rng = np.random.default_rng(seed)
        checks = ObjectiveChecks(
            non_negative=spot_check_non_negative(problem.objective, rng),
            submodular=spot_check_submodular(problem.objective, rng),
            monotone_declared=problem.monotone,
        )
        if not (checks.non_negative and checks.submodular):
            logger.warning("objective spot check failed, guarantees void", instance=problem.name,
                           non_negative=checks.non_negative, submodular=checks.submodular)
        return checks

    def run_mcg(self, problem: Problem, eps: Fraction, ledger: QueryLedger, paranoid: bool) -> McgTrace:
        M, f = problem.instrumented(ledger)
        return measured_continuous_greedy(M, ExtensionEvaluator(f), eps, problem.dummies, paranoid=paranoid)

    def mcg_summary(self, trace: McgTrace) -> McgSummary:
        y = trace.y_final
        return McgSummary(
            iterations=trace.iterations,
            delta=str(trace.delta),
            parts_per_iteration=trace.ell,
            supp=y.supp,
            ff=y.ff,
            max_marginal=str(marginals(y).max_norm()),
        )

    def opt_report(self, problem: Problem, with_opt: bool, value: Fraction) -> Optional[OptOut]:
        if not with_opt:
            return None
        if problem.n > settings.OPT_REPORT_CAP:
            logger.warning("brute-force OPT skipped", n=problem.n, cap=settings.OPT_REPORT_CAP)
            return None
        opt = brute_force_opt(problem.matroid, problem.objective)
        ratio = value / opt.opt_value if opt.opt_value > 0 else None
        return OptOut(
            opt_set=problem.labels_of(opt.opt_set),
            opt_value=str(opt.opt_value),
            ratio=None if ratio is None else str(ratio),
            ratio_decimal=None if ratio is None else _decimal(ratio),
        )

    def _x_labels(self, problem: Problem, x: MarginalVec) -> Dict[str, str]:
        return {problem.label(u): str(x[u]) for u in range(problem.n) if x[u] != 0}

    def _sample(self, problem: Problem, x: MarginalVec, rng: np.random.Generator) -> SubsetMask:
        """Independent inclusion of each original element with probability x_u."""
        draws = rng.random(problem.n)
        mask = 0
        for u in range(problem.n):
            if draws[u] < float(x[u]):
                mask |= 1 << u
        return mask

    def sampled_round(
        self, problem: Problem, trace: McgTrace, seed: int, ledger: QueryLedger
    ) -> Tuple[SampledOut, SubsetMask]:
        """Best decomposition set S_i by f, plus an independent-inclusion sample of marg(y)."""
        decomposition = random_decomposition(trace, seed)
        f = problem.instrumented(ledger)[1]
        originals = (1 << problem.n) - 1

        best_set, best_value = 0, f(0)
        for s in decomposition.sets:
            value = f(s)
            if value > best_value:
                best_set, best_value = s, value

        rng = np.random.default_rng(seed)
        sample = self._sample(problem, marginals(trace.y_final), rng)
        sample_value = problem.objective(sample)
        fbar = ExtensionEvaluator(f).eval_Fbar_sample(decomposition.x, settings.MONTE_CARLO_SAMPLES, seed)

        out = SampledOut(
            sets=[problem.labels_of(s) for s in decomposition.sets],
            best_set=problem.labels_of(best_set & originals),
            best_value=str(best_value),
            x=self._x_labels(problem, decomposition.x),
            sample=problem.labels_of(sample),
            sample_independent=problem.matroid.is_independent(sample),
            sample_value=str(sample_value),
            fbar_estimate=fbar,
            fbar_samples=settings.MONTE_CARLO_SAMPLES,
        )
        return out, best_set & originals

    def solve(
        self,
        problem: Problem,
        eps: Fraction,
        mode: Union[SolveModeEnum, str] = SolveModeEnum.deterministic,
        seed: Optional[int] = None,
        paranoid: Optional[bool] = None,
        with_opt: bool = False,
    ) -> SolveReport:
        try:
            mode = SolveModeEnum(mode)
        except ValueError:
            raise SchemaError(f"unknown mode {mode!r}", {"modes": list(MODES)}) from None
        seed = settings.DEFAULT_SEED if seed is None else seed
        paranoid = settings.PARANOID if paranoid is None else paranoid
        checks = self.objective_checks(problem, seed)

        phases: Dict[str, QueryLedger] = {"mcg": QueryLedger()}
        trace = self.run_mcg(problem, eps, phases["mcg"], paranoid)
        fractional = value_estimate(trace)
        y = trace.y_final

        rounding: Optional[RoundingSummary] = None
        sampled: Optional[SampledOut] = None
        if mode is SolveModeEnum.deterministic:
            phases["rounding"] = QueryLedger()
            M, f = problem.instrumented(phases["rounding"])
            beta = lift_amount(y, problem.dummies)
            lifted = lift_to_base_polytope(y, M, problem.dummies)
            rounder = PipageRounder(M, ExtensionEvaluator(f), problem.dummies, paranoid=paranoid)
            solution = rounder.round(lifted)
            rounding = RoundingSummary(
                lift_beta=str(beta),
                loop_iterations=rounder.stats.iterations,
                max_depth=rounder.stats.max_depth,
                max_ff=rounder.stats.max_ff,
                restrictions=rounder.stats.restrictions,
                contractions=rounder.stats.contractions,
            )
        else:
            phases["sampling"] = QueryLedger()
            sampled, solution = self.sampled_round(problem, trace, seed, phases["sampling"])

        value = problem.objective(solution)
        logger.info("solve done", instance=problem.name, mode=mode.value, value=str(value),
                    fractional=str(fractional))
        return SolveReport(
            instance=problem.name,
            n=problem.n,
            rank=problem.rank,
            epsilon=str(trace.eps_raw),
            epsilon_effective=str(trace.eps_effective),
            mode=mode.value,
            seed=seed,
            solution=problem.labels_of(solution),
            solution_value=str(value),
            solution_value_decimal=_decimal(value),
            fractional_value=str(fractional),
            fractional_value_decimal=_decimal(fractional),
            lossless=value >= fractional,
            objective_checks=checks,
            mcg=self.mcg_summary(trace),
            rounding=rounding,
            sampled=sampled,
            ledgers=_ledgers(phases),
            opt=self.opt_report(problem, with_opt, value),
        )

    def estimate(
        self,
        problem: Problem,
        eps: Fraction,
        seed: Optional[int] = None,
        paranoid: Optional[bool] = None,
        with_opt: bool = False,
    ) -> EstimateReport:
        seed = settings.DEFAULT_SEED if seed is None else seed
        paranoid = settings.PARANOID if paranoid is None else paranoid
        checks = self.objective_checks(problem, seed)

        phases = {"mcg": QueryLedger()}
        trace = self.run_mcg(problem, eps, phases["mcg"], paranoid)
        value = value_estimate(trace)
        logger.info("estimate done", instance=problem.name, value=str(value))
        return EstimateReport(
            instance=problem.name,
            n=problem.n,
            rank=problem.rank,
            epsilon=str(trace.eps_raw),
            epsilon_effective=str(trace.eps_effective),
            value=str(value),
            value_decimal=_decimal(value),
            objective_checks=checks,
            mcg=self.mcg_summary(trace),
            ledgers=_ledgers(phases),
            opt=self.opt_report(problem, with_opt, value),
        )


solver_service = SolverService()
