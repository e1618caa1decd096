from __future__ import annotations

import pathlib

import pytest
from hypothesis import HealthCheck, settings

from clssmt.grammar import prune
from clssmt.inhabitation import InhabitationRequest, inhabit
from clssmt.repository import parse_repository
from clssmt.types import parse_type

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


@pytest.fixture(scope="session")
def micro_repo():
    return parse_repository(fixture_text("micro.repo"))


@pytest.fixture(scope="session")
def sort_repo():
    return parse_repository(fixture_text("sort.repo"))


@pytest.fixture(scope="session")
def labyrinth_repo():
    return parse_repository(fixture_text("labyrinth.repo"))


@pytest.fixture(scope="session")
def micro_grammar(micro_repo):
    return prune(inhabit(InhabitationRequest(micro_repo, parse_type("Pos(3, 3)"))))


@pytest.fixture(scope="session")
def sort_grammar(sort_repo):
    return prune(inhabit(InhabitationRequest(sort_repo, parse_type("minimal & double"))))


@pytest.fixture(scope="session")
def labyrinth_grammar(labyrinth_repo):
    return prune(inhabit(InhabitationRequest(labyrinth_repo, parse_type("Pos(1, 0)"))))
