"""Sequential specifications used as linearizability oracles.

``apply(state, client, op, args)`` is pure and returns ``(state', ret, ok)``.
States are immutable (ints or sorted tuples) so they can be memoised.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Hashable


@dataclass(frozen=True)
class SequentialSpec:
    name: str
    initial: Hashable
    apply: Callable[[Any, str, str, tuple], tuple[Any, Any, bool]]
    ops: tuple[str, ...]

    def with_initial(self, initial) -> SequentialSpec:
        return SequentialSpec(self.name, initial, self.apply, self.ops)


def _counter(state: int, client: str, op: str, args: tuple):
    if op == "get":
        return state, state, True
    if op == "set":
        (value,) = args
        return value, state, True
    if op == "testAndSet":
        expected, value = args
        if state == expected:
            return value, state, True
        return state, None, False
    if op == "incr":
        # an atomic read-then-write: both halves observe the same value
        return state + 1, (state, state), True
    raise ValueError(f"counter-spec has no operation {op!r}")


def _dao(state: tuple, client: str, op: str, args: tuple):
    balances = dict(state)
    if op == "deposit":
        (amount,) = args
        balances[client] = balances.get(client, 0) + amount
        return tuple(sorted(balances.items())), True, True
    if op == "withdraw":
        amount = balances.get(client, 0)
        if amount == 0:
            return state, None, False
        balances[client] = 0
        return tuple(sorted(balances.items())), amount, True
    raise ValueError(f"dao-spec has no operation {op!r}")


COUNTER_SPEC = SequentialSpec("counter", 0, _counter, ("get", "set", "testAndSet", "incr"))
DAO_SPEC = SequentialSpec("dao", (), _dao, ("deposit", "withdraw"))

SPECS = {
    "counter": COUNTER_SPEC,
    "counter-spec": COUNTER_SPEC,
    "atomic-incr": COUNTER_SPEC,
    "dao": DAO_SPEC,
    "dao-spec": DAO_SPEC,
}


def get_spec(name: str) -> SequentialSpec:
    try:
        return SPECS[name]
    except KeyError:
        raise KeyError(f"unknown sequential spec {name!r}") from None
