"""
Small objective and matroid builders used across the tests.
"""

from fractions import Fraction

from core.sets import size
from schemas.instance import InstanceSpec
from services.matroids import UniformMatroid
from services.oracles import FunctionOracle, ModularOracle
from services.problem import Problem, build_problem


def cardinality(n: int) -> FunctionOracle:
    """f(S) = |S|."""
    return FunctionOracle(n, lambda mask: Fraction(size(mask)), monotone=True, name="cardinality")


def modular(*weights) -> ModularOracle:
    return ModularOracle([Fraction(w) for w in weights])


def uniform(n: int, k: int) -> UniformMatroid:
    return UniformMatroid(n, k)


def make_problem(payload: dict) -> Problem:
    return build_problem(InstanceSpec.model_validate(payload))
