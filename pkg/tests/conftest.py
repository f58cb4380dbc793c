from __future__ import annotations

import functools

import pytest

from ccsim.explorer import explore_exhaustive
from ccsim.runtime import RuntimeConfig, Transaction, execute
from ccsim.scenario import load, packaged_scenarios
from ccsim.world import WorldState


@functools.lru_cache(maxsize=None)
def explored(name: str, **overrides):
    scenario = load(name)
    if overrides:
        scenario = scenario.with_overrides(**overrides)
    return scenario, explore_exhaustive(scenario)


@pytest.fixture
def world() -> WorldState:
    w = WorldState()
    w.add_account("alice", 100)
    w.add_account("bob", 100)
    return w


def run(world, origin, target, method, *args, value=0, config=None, budget=10_000):
    tx = Transaction(origin, target, method, tuple(args), value, budget)
    return execute(world, tx, config or RuntimeConfig())


PACK = packaged_scenarios()


ACCEPTANCE: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: s.split("criterion ")[1]):
            terminalreporter.write_line(line)
