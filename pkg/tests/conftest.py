"""
Shared fixtures: the fixture instances, repositories and ledgers.
"""

from pathlib import Path
from typing import Callable

import pytest

from repositories.instance import InstanceRepository
from services.oracles import QueryLedger
from services.problem import Problem, build_problem

FIXTURES = Path(__file__).resolve().parent.parent / "data" / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def repository() -> InstanceRepository:
    return InstanceRepository(FIXTURES)


@pytest.fixture
def load_fixture(repository: InstanceRepository) -> Callable[[str], Problem]:
    def load(name: str) -> Problem:
        return build_problem(repository.load(FIXTURES / f"{name}.json"))

    return load


@pytest.fixture
def ledger() -> QueryLedger:
    return QueryLedger()
