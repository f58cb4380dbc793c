"""Enumerate transaction interleavings and collect their outcomes.

The unit of interleaving is a whole transaction.  At each point the
scheduler may pick any client with a pending transaction, or any oracle
callback whose query has already been committed.  Clients are reactive,
so the tree is built on the fly rather than from precomputed
permutations; this makes the explorer a small stateful model checker.
"""

from __future__ import annotations

import copy
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable

from ccsim.runtime import Trace, Transaction, TxResult, execute
from ccsim.scenario import Scenario
from ccsim.world import WorldState

ORACLE_PREFIX = "oracle:"


def assemble_blocks(n_txs: int, block_size: int | None, base: int) -> list[int]:
    """Block number of each of ``n_txs`` transactions filled in schedule order."""
    if block_size is not None and block_size < 1:
        raise ValueError("block_size must be >= 1")
    if block_size is None:
        return [base] * n_txs
    return [base + i // block_size for i in range(n_txs)]


@dataclass
class Step:
    actor: str
    action: int
    trace: Trace
    result: TxResult

    @property
    def tx(self) -> Transaction:
        return self.trace.tx


@dataclass
class Outcome:
    schedule_id: int
    schedule: list[tuple[str, int]]
    steps: list[Step]
    world: WorldState
    final_hash: str
    payouts: dict[str, int]
    client_status: dict[str, str]
    truncated: bool = False

    @property
    def traces(self) -> list[Trace]:
        return [s.trace for s in self.steps]

    @property
    def blocks(self) -> list[int]:
        return [s.trace.block_number for s in self.steps]

    def watched_view(self, watched: Iterable[str]) -> dict:
        out = {}
        for addr in sorted(watched):
            acct = self.world.accounts.get(addr)
            if acct is not None:
                out[addr] = acct.to_json()
        return out

    def to_json(self, with_traces: bool = False) -> dict:
        doc = {
            "schedule_id": self.schedule_id,
            "schedule": [f"{a}#{i}" for a, i in self.schedule],
            "final_hash": self.final_hash,
            "payouts": dict(sorted(self.payouts.items())),
            "client_status": dict(sorted(self.client_status.items())),
            "blocks": self.blocks,
            "txs": [
                {
                    "actor": s.actor,
                    "method": s.tx.method,
                    "status": s.trace.status,
                    "reason": s.trace.reason,
                    "return": _plain(s.result.value),
                }
                for s in self.steps
            ],
        }
        if with_traces:
            doc["traces"] = [s.trace.to_json() for s in self.steps]
        return doc


def _plain(v):
    if v is None or isinstance(v, (bool, int, str)):
        return v
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return repr(v)


@dataclass
class Exploration:
    mode: str
    outcomes: list[Outcome]
    truncated: bool = False
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.outcomes)

    def __iter__(self):
        return iter(self.outcomes)


@dataclass
class RunState:
    """Everything needed to continue one partial schedule."""

    scenario: Scenario
    world: WorldState
    clients: dict
    pending: dict[str, Transaction | None]
    callbacks: dict[int, tuple[str, str | None]]
    actions: dict[str, int] = field(default_factory=dict)
    steps: list[Step] = field(default_factory=list)
    tx_counts: dict[str, int] = field(default_factory=dict)
    truncated: bool = False

    @classmethod
    def initial(cls, scenario: Scenario) -> RunState:
        clients = scenario.build_clients()
        pending = {cid: c.first() for cid, c in clients.items()}
        return cls(scenario, scenario.build_world(), clients, pending, {},
                   tx_counts={cid: 0 for cid in clients})

    def fork(self) -> RunState:
        return RunState(
            self.scenario,
            self.world.copy(),
            copy.deepcopy(self.clients),
            dict(self.pending),
            dict(self.callbacks),
            dict(self.actions),
            list(self.steps),
            dict(self.tx_counts),
            self.truncated,
        )


def enabled_actors(state: RunState) -> list[str]:
    """Clients with a pending transaction, then deliverable oracle callbacks."""
    actors = [cid for cid, tx in state.pending.items() if tx is not None]
    actors += [f"{ORACLE_PREFIX}{qid}" for qid in sorted(state.callbacks)]
    return actors


def _block_for(scenario: Scenario, position: int) -> int:
    if scenario.block_size is None:
        return scenario.base_block_number
    return scenario.base_block_number + position // scenario.block_size


def step(state: RunState, actor: str) -> Step:
    """Execute ``actor``'s next transaction on ``state`` in place."""
    sc = state.scenario
    state.world.block_number = _block_for(sc, len(state.steps))
    if actor.startswith(ORACLE_PREFIX):
        qid = int(actor[len(ORACLE_PREFIX):])
        contract, span = state.callbacks.pop(qid)
        tx = Transaction(sc.oracle_address, contract, "__callback",
                         (qid, sc.oracle_result(qid)), 0, sc.step_budget, span, actor)
    else:
        tx = state.pending[actor]
        if tx is None:
            raise ValueError(f"actor {actor!r} is not enabled")
    _, trace, result = execute(state.world, tx, sc.config)
    action = state.actions.get(actor, 0)
    state.actions[actor] = action + 1
    for qid, contract in result.queries:
        state.callbacks[qid] = (contract, tx.span)
    if not actor.startswith(ORACLE_PREFIX):
        state.tx_counts[actor] += 1
        nxt = state.clients[actor].advance(result)
        if nxt is not None and state.tx_counts[actor] >= sc.max_txs_per_client:
            state.truncated = True
            nxt = None
        state.pending[actor] = nxt
    record = Step(actor, action, trace, result)
    state.steps.append(record)
    return record


def _finish(state: RunState, schedule_id: int, initial: WorldState) -> Outcome:
    payouts = {}
    for cid, client in state.clients.items():
        payouts[cid] = state.world.balance(client.address) - initial.balance(client.address)
    return Outcome(
        schedule_id=schedule_id,
        schedule=[(s.actor, s.action) for s in state.steps],
        steps=state.steps,
        world=state.world,
        final_hash=state.world.hash(),
        payouts=payouts,
        client_status={cid: c.status for cid, c in state.clients.items()},
        truncated=state.truncated,
    )


def explore_exhaustive(scenario: Scenario, max_schedules: int | None = None) -> Exploration:
    """Depth-first over every sequence of scheduler choices.

    Children are visited in :func:`enabled_actors` order, so schedule ids
    are stable across runs.
    """
    limit = max_schedules or scenario.max_schedules
    root = RunState.initial(scenario)
    initial = root.world.copy()
    outcomes: list[Outcome] = []
    truncated = False

    stack = [root]
    while stack:
        state = stack.pop()
        actors = enabled_actors(state)
        if not actors:
            if len(outcomes) >= limit:
                truncated = True
                break
            outcome = _finish(state, len(outcomes), initial)
            truncated |= outcome.truncated
            outcomes.append(outcome)
            continue
        children = []
        for i, actor in enumerate(actors):
            child = state if i == len(actors) - 1 else state.fork()
            children.append((child, actor))
        # the last child reuses ``state``; run forks first, before it mutates
        for child, actor in children:
            step(child, actor)
        stack.extend(child for child, _ in reversed(children))
    return Exploration("exhaustive", outcomes, truncated)


def explore_random(scenario: Scenario, seed: int, n_runs: int) -> Exploration:
    rng = random.Random(seed)
    outcomes = []
    truncated = False
    for run in range(n_runs):
        state = RunState.initial(scenario)
        initial = state.world.copy()
        while actors := enabled_actors(state):
            step(state, rng.choice(actors))
        outcome = _finish(state, run, initial)
        truncated |= outcome.truncated
        outcomes.append(outcome)
    return Exploration("random", outcomes, truncated, seed)


def replay(scenario: Scenario, schedule: Iterable[tuple[str, int] | str],
           on_step: Callable[[RunState, str], None] | None = None,
           schedule_id: int = 0) -> Outcome:
    """Re-run one schedule; ``on_step`` sees the state just before each action."""
    state = RunState.initial(scenario)
    initial = state.world.copy()
    for entry in schedule:
        actor = entry[0] if isinstance(entry, tuple) else entry.split("#")[0]
        if actor not in enabled_actors(state):
            raise ValueError(f"schedule not replayable: {actor!r} not enabled")
        if on_step is not None:
            on_step(state, actor)
        step(state, actor)
    if enabled_actors(state):
        raise ValueError("schedule is incomplete")
    return _finish(state, schedule_id, initial)
