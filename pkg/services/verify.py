"""
Brute-force optima and exact checkers for the guarantees of split,
accelerated split, measured continuous greedy and pipage rounding.

Every checker returns CheckRecords: slack = lhs - rhs as an exact
rational, pass iff slack >= 0. Equalities report -|lhs - rhs|.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np

from core.config import settings
from core.exceptions import CapabilityError, ToolkitError
from core.logging import get_logger
from core.sets import SubsetMask, iter_elements, mask_of, size, submasks
from core.vectors import (
    SparseExtVec,
    combine_disjoint,
    join_indicator,
    marginals,
    psum,
)
from schemas.reports import CheckRecord
from services.extension import ExtensionEvaluator
from services.matroids import IndependenceOracle, polytope_slack
from services.mcg import McgTrace, measured_continuous_greedy, random_decomposition
from services.oracles import QueryLedger, ValueOracle
from services.problem import Problem
from services.rounding import PipageRounder, ceil_log2, lift_to_base_polytope, relax, relax_all
from services.split import Partition, accelerated_split, split

logger = get_logger(__name__)


@dataclass(frozen=True)
class BruteForceResult:
    opt_set: SubsetMask
    opt_value: Fraction


def brute_force_opt(M: IndependenceOracle, f: ValueOracle, cap: Optional[int] = None) -> BruteForceResult:
    """Exhaustive max of f over independent subsets of M's ground; ties keep the smallest mask."""
    cap = settings.EXHAUSTIVE_CAP if cap is None else cap
    n = size(M.ground)
    if n > cap:
        raise CapabilityError(f"brute force over {n} elements exceeds cap {cap}", {"n": n, "cap": cap})
    best_set = 0
    best_value = f(0)
    for mask in submasks(M.ground):
        if mask == 0 or not M.is_independent(mask):
            continue
        value = f(mask)
        if value > best_value:
            best_set, best_value = mask, value
    return BruteForceResult(best_set, best_value)


def make_record(check: str, instance_id: str, params: Dict[str, Any], lhs: Fraction, rhs: Fraction) -> CheckRecord:
    slack = Fraction(lhs) - Fraction(rhs)
    return CheckRecord(
        check=check,
        instance_id=instance_id,
        params=params,
        passed=slack >= 0,
        slack_num=slack.numerator,
        slack_den=slack.denominator,
        slack=float(slack),
    )


def make_equality(check: str, instance_id: str, params: Dict[str, Any], lhs: Fraction, rhs: Fraction) -> CheckRecord:
    gap = abs(Fraction(lhs) - Fraction(rhs))
    return make_record(check, instance_id, params, -gap, Fraction(0))


def check_mcg_trace(
    trace: McgTrace,
    opt: BruteForceResult,
    evaluator: ExtensionEvaluator,
    monotone: bool,
    instance_id: str = "instance",
    matroid: Optional[IndependenceOracle] = None,
) -> List[CheckRecord]:
    """
    Per-iteration checks of a continuous greedy trace against OPT.

    `evaluator` must evaluate the objective the trace was built on; the
    recorded F values are used as they are, so a corrupted trace fails.
    """
    eps = trace.eps_effective
    delta = trace.delta
    f_opt = opt.opt_value
    records: List[CheckRecord] = []

    for rec in trace.records:
        i = rec.index
        params = {"i": i, "eps": str(eps), "delta": str(delta)}
        y_prev = rec.y_before
        f_prev = rec.value_before
        with_opt = evaluator.eval_g(y_prev, opt.opt_set)

        records.append(make_record(
            "mcg_recursion", instance_id, params,
            (rec.value_after - f_prev) / delta,
            (1 - 4 * eps) * with_opt - f_prev,
        ))

        gains = sum((evaluator.eval_g(y_prev, part) - f_prev for part in rec.parts if part), Fraction(0))
        records.append(make_record(
            "mcg_split_bound", instance_id, params,
            gains,
            (1 - 3 * eps) * with_opt - (1 - eps) * f_prev,
        ))

        records.append(make_record(
            "mcg_support", instance_id, params,
            Fraction(i * trace.ell), Fraction(rec.y_after.supp),
        ))

        records.append(make_record(
            "mcg_max_marginal", instance_id, params,
            1 - (1 - delta) ** i, marginals(rec.y_after).max_norm(),
        ))

        if monotone:
            floor = (1 - (1 - delta) ** i) * (1 - 4 * eps) * f_opt
        else:
            floor = delta * i * (1 - delta) ** (i - 1) * (1 - 4 * eps) * f_opt
        records.append(make_record("mcg_value_floor", instance_id, params, rec.value_after, floor))

        expected = psum(y_prev, combine_disjoint(delta, rec.parts, trace.width))
        records.append(make_record(
            "mcg_trace_update", instance_id, params,
            Fraction(0) if expected == rec.y_after else Fraction(-1), Fraction(0),
        ))

    records.extend(check_trace_consistency(trace, evaluator, instance_id))

    if trace.records:
        last = trace.records[-1]
        records.append(make_record(
            "mcg_value_at_most_opt", instance_id, {"eps": str(eps)},
            f_opt, last.value_after,
        ))
        if matroid is not None:
            try:
                slack = polytope_slack(matroid, marginals(last.y_after))
            except CapabilityError:
                logger.warning("polytope check skipped", instance_id=instance_id)
            else:
                records.append(make_record(
                    "mcg_marginals_in_polytope", instance_id, {"eps": str(eps)}, slack, Fraction(0),
                ))
    return records


def check_trace_consistency(
    trace: McgTrace,
    evaluator: ExtensionEvaluator,
    instance_id: str = "instance",
) -> List[CheckRecord]:
    """Recorded F(y^i) against a fresh evaluation, per iteration."""
    return [
        make_equality(
            "mcg_trace_value", instance_id, {"i": rec.index},
            rec.value_after, evaluator.eval_F(rec.y_after),
        )
        for rec in trace.records
    ]


def check_split_guarantee(
    partition: Partition,
    opt: BruteForceResult,
    f: ValueOracle,
    ell: int,
    eps: Optional[Fraction],
    variant: str,
    monotone: bool,
    instance_id: str = "instance",
) -> List[CheckRecord]:
    """Σ_j f(T_j|∅) against the variant's bound, plus its non-negativity."""
    values = partition.values(f)
    empty = f(0)
    gain = sum((v - empty for v in values), Fraction(0))
    spread = sum(values, Fraction(0)) / ell
    f_opt = opt.opt_value

    if variant == "split":
        factor = Fraction(1) if monotone else 1 - Fraction(1, ell)
    elif variant == "accelerated":
        e = Fraction(eps)
        factor = 1 - e if monotone else 1 - Fraction(1, ell) - e
    else:
        raise ValueError(f"unknown split variant {variant!r}")

    params = {"variant": variant, "ell": ell, "eps": None if eps is None else str(eps), "monotone": monotone}
    return [
        make_record(f"{variant}_guarantee", instance_id, params, gain, max(factor * f_opt - spread, Fraction(0))),
        make_record(f"{variant}_nonnegative", instance_id, params, gain, Fraction(0)),
    ]


def check_rounding(
    solution: SubsetMask,
    input_value: Fraction,
    rounder: PipageRounder,
    f: ValueOracle,
    M: IndependenceOracle,
    instance_id: str = "instance",
) -> List[CheckRecord]:
    n = size(M.ground)
    value = f(solution)
    params = {"n": n}
    stats = rounder.stats
    return [
        make_record("rounding_lossless", instance_id, params, value, input_value),
        make_record("rounding_independent", instance_id, params,
                    Fraction(0) if M.is_independent(solution) else Fraction(-1), Fraction(0)),
        make_record("rounding_iterations", instance_id, params, Fraction(2 * n), Fraction(stats.iterations)),
        make_record("rounding_depth", instance_id, params, Fraction(ceil_log2(n)), Fraction(stats.max_depth)),
    ]


def draw_vector(
    rng: np.random.Generator,
    ground: SubsetMask,
    width: int,
    keys: int,
    max_den: int = 4,
    multi: bool = True,
) -> SparseExtVec:
    """Random sparse vector with up to `keys` non-empty keys from `ground`."""
    members = list(iter_elements(ground))
    entries: Dict[SubsetMask, Fraction] = {}
    if not members:
        return SparseExtVec({}, width)
    for _ in range(keys):
        if multi:
            picked = rng.random(len(members)) < 0.4
            key = mask_of(u for u, keep in zip(members, picked) if keep)
            if key == 0:
                key = 1 << members[int(rng.integers(len(members)))]
        else:
            key = 1 << members[int(rng.integers(len(members)))]
        den = int(rng.integers(1, max_den + 1))
        num = int(rng.integers(1, den + 1))
        entries[key] = Fraction(num, den)
    return SparseExtVec(entries, width)


class PropertySuite:
    """Seeded invariant checks of the extension, rounding and greedy on one problem."""

    def __init__(self, problem: Problem, seed: int, draws: int = 8, max_keys: int = 5):
        if problem.n > 10:
            raise CapabilityError(f"the property suite needs n <= 10, got {problem.n}", {"n": problem.n})
        self.problem = problem
        self.seed = seed
        self.draws = draws
        self.max_keys = max_keys
        self.rng = np.random.default_rng(seed)
        self.M, self.f = problem.extended()
        self.evaluator = ExtensionEvaluator(self.f)
        self.instance_id = problem.name
        self.originals = (1 << problem.n) - 1

    def _vector(self, multi: bool = True) -> SparseExtVec:
        keys = int(self.rng.integers(1, self.max_keys + 1))
        return draw_vector(self.rng, self.originals, self.problem.width, keys, multi=multi)

    def extension_checks(self) -> List[CheckRecord]:
        ev = self.evaluator
        iid = self.instance_id
        out: List[CheckRecord] = []
        for k in range(self.draws):
            y = self._vector()
            params = {"draw": k, "seed": self.seed}
            value = ev.eval_F(y)
            keys = y.keys()
            if keys:
                key = keys[int(self.rng.integers(len(keys)))]
                p = y.get(key)
                lo = ev.eval_F(y.with_entry(key, 0))
                hi = ev.eval_F(y.with_entry(key, 1))
                out.append(make_equality("multilinearity", iid, params, value, (1 - p) * lo + p * hi))
                out.append(make_equality(
                    "derivative_identity", iid, params,
                    (1 - p) * ev.partial_wrt(y, key), ev.eval_g(y, key) - value,
                ))

            z = draw_vector(self.rng, self.originals, self.problem.width, int(self.rng.integers(1, 4)))
            expansion = Fraction(0)
            z_items = list(z.items())
            for code in range(1 << len(z_items)):
                union = 0
                weight = Fraction(1)
                for j, (zk, zp) in enumerate(z_items):
                    if (code >> j) & 1:
                        union |= zk
                        weight *= zp
                    else:
                        weight *= 1 - zp
                if weight:
                    expansion += weight * ev.eval_F(join_indicator(y, union))
            out.append(make_equality("psum_expansion", iid, params, ev.eval_F(psum(y, z)), expansion))

            x = marginals(y)
            fbar = ev.eval_Fbar_exact(x)
            out.append(make_record("marginal_domination", iid, params, fbar, value))
            out.append(make_equality("relax_all_equals_fbar", iid, params, ev.eval_F(relax_all(y)), fbar))

            target = int(self.rng.integers(1 << self.problem.n))
            out.append(make_record(
                "opt_preservation", iid, params,
                ev.eval_g(y, target), (1 - x.max_norm()) * self.f(target),
            ))

            if len(keys) >= 2:
                s, t = keys[0], keys[1]
                both = ev.eval_F(y.with_entries({s: 1, t: 1}))
                s_only = ev.eval_F(y.with_entries({s: 1, t: 0}))
                t_only = ev.eval_F(y.with_entries({s: 0, t: 1}))
                neither = ev.eval_F(y.with_entries({s: 0, t: 0}))
                out.append(make_record(
                    "cross_derivative_sign", iid, params,
                    Fraction(0), both - s_only - t_only + neither,
                ))

            out.extend(self._convexity(k))
        return out

    def _convexity(self, k: int) -> List[CheckRecord]:
        if self.problem.n < 2:
            return []
        u, v = (int(w) for w in self.rng.choice(self.problem.n, size=2, replace=False))
        # u and v must appear in singleton keys only
        base = relax(relax(self._vector(), u), v)
        entries = dict(base.items())
        yu = Fraction(int(self.rng.integers(1, 4)), 4)
        yv = Fraction(int(self.rng.integers(1, 4)), 4)
        entries[1 << u] = yu
        entries[1 << v] = yv
        y = SparseExtVec(entries, self.problem.width)
        t = min(yu, 1 - yu, yv, 1 - yv)
        plus = y.with_entries({1 << u: yu + t, 1 << v: yv - t})
        minus = y.with_entries({1 << u: yu - t, 1 << v: yv + t})
        ev = self.evaluator
        return [make_record(
            "directional_convexity", self.instance_id, {"draw": k, "seed": self.seed, "u": u, "v": v},
            (ev.eval_F(plus) + ev.eval_F(minus)) / 2, ev.eval_F(y),
        )]

    def relax_checks(self) -> List[CheckRecord]:
        out: List[CheckRecord] = []
        ev = self.evaluator
        for k in range(self.draws):
            y = self._vector()
            support = y.support_union()
            if support == 0:
                continue
            members = list(iter_elements(support))
            u = members[int(self.rng.integers(len(members)))]
            z = relax(y, u)
            params = {"draw": k, "seed": self.seed, "u": u}
            out.append(make_record(
                "relax_marginals", self.instance_id, params,
                Fraction(0) if marginals(z) == marginals(y) else Fraction(-1), Fraction(0),
            ))
            out.append(make_record("relax_monotone", self.instance_id, params, ev.eval_F(z), ev.eval_F(y)))
            out.append(make_record("relax_ff", self.instance_id, params, Fraction(y.ff + 1), Fraction(z.ff)))
        return out

    def pipeline_checks(self, eps: Fraction = Fraction(1), opt: Optional[BruteForceResult] = None) -> List[CheckRecord]:
        problem = self.problem
        opt = opt or brute_force_opt(problem.matroid, problem.objective)
        ledger = QueryLedger()
        M_c, f_c = problem.instrumented(ledger)
        trace = measured_continuous_greedy(M_c, ExtensionEvaluator(f_c), eps, problem.dummies)
        out = check_mcg_trace(trace, opt, self.evaluator, problem.monotone, self.instance_id, matroid=self.M)

        before = ledger.snapshot()
        decomposition = random_decomposition(trace, self.seed)
        spent = ledger.snapshot() - before
        out.append(make_record(
            "decomposition_zero_queries", self.instance_id, {"seed": self.seed},
            Fraction(-(spent.value_queries + spent.independence_queries)), Fraction(0),
        ))
        for i, s in enumerate(decomposition.sets, start=1):
            out.append(make_record(
                "decomposition_independent", self.instance_id, {"i": i, "seed": self.seed},
                Fraction(0) if self.M.is_independent(s) else Fraction(-1), Fraction(0),
            ))

        y = trace.y_final
        value = trace.records[-1].value_after
        lifted = lift_to_base_polytope(y, self.M, problem.dummies)
        rounder = PipageRounder(self.M, self.evaluator, problem.dummies, paranoid=True)
        solution = rounder.round(lifted)
        out.extend(check_rounding(solution, value, rounder, self.f, self.M, self.instance_id))
        return out

    def run(self) -> List[CheckRecord]:
        records = self.extension_checks() + self.relax_checks() + self.pipeline_checks()
        failed = [r.check for r in records if not r.passed]
        logger.info("property suite done", instance_id=self.instance_id,
                    checks=len(records), failed=len(failed))
        return records


def property_suite(problem: Problem, seed: int, draws: int = 8) -> List[CheckRecord]:
    return PropertySuite(problem, seed, draws=draws).run()


class VerificationService:
    """Runs the full verification battery on one problem."""

    def verify(self, problem: Problem, seed: int, epsilons: List[Fraction], draws: int = 8) -> List[CheckRecord]:
        records: List[CheckRecord] = []
        records.extend(property_suite(problem, seed, draws=draws))

        M, f = problem.extended()
        opt = brute_force_opt(problem.matroid, problem.objective)
        iid = problem.name
        for ell in (1, 2, 3):
            part = split(M, f, ell)
            records.extend(check_split_guarantee(part, opt, f, ell, None, "split", problem.monotone, iid))
            fast = accelerated_split(M, f, ell, Fraction(1, 10), dummies=problem.dummies)
            records.extend(check_split_guarantee(fast, opt, f, ell, Fraction(1, 10), "accelerated",
                                                 problem.monotone, iid))

        suite = PropertySuite(problem, seed, draws=0)
        for eps in epsilons:
            if eps == 1:
                continue
            try:
                records.extend(suite.pipeline_checks(eps, opt))
            except ToolkitError as e:
                logger.warning("pipeline checks skipped", instance_id=iid, epsilon=str(eps), error=str(e))
        return records


verification_service = VerificationService()
