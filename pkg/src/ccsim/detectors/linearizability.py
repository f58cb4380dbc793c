"""Brute-force linearizability checking against a sequential specification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

from ccsim.corpus.specs import SequentialSpec

MAX_OPS = 10

LINEARIZABLE = "Linearizable"
NON_LINEARIZABLE = "NonLinearizable"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Operation:
    client: str
    op: str
    args: tuple
    invoke: int
    response: int
    ret: Any = None
    ok: bool = True

    def __post_init__(self):
        if not self.invoke < self.response:
            raise ValueError(f"operation {self.op} responds before it is invoked")

    def to_json(self) -> dict:
        return {"client": self.client, "op": self.op, "args": list(self.args),
                "invoke": self.invoke, "response": self.response,
                "ret": list(self.ret) if isinstance(self.ret, tuple) else self.ret, "ok": self.ok}

    @classmethod
    def from_json(cls, doc: dict) -> Operation:
        ret = doc.get("ret")
        return cls(doc["client"], doc["op"], tuple(doc.get("args", [])), int(doc["invoke"]),
                   int(doc["response"]), tuple(ret) if isinstance(ret, list) else ret,
                   bool(doc.get("ok", True)))


History = Sequence[Operation]


@dataclass
class LinResult:
    verdict: str
    witness: list[int] = field(default_factory=list)
    reason: str = ""

    @property
    def linearizable(self) -> bool:
        return self.verdict == LINEARIZABLE


def validate_history(history: History) -> None:
    by_client: dict[str, list[Operation]] = {}
    for op in history:
        by_client.setdefault(op.client, []).append(op)
    for client, ops in by_client.items():
        ops = sorted(ops, key=lambda o: o.invoke)
        for a, b in zip(ops, ops[1:]):
            if a.response > b.invoke:
                raise ValueError(f"client {client} has overlapping operations")


def _matches(op: Operation, ret, ok: bool) -> bool:
    if ok != op.ok:
        return False
    return not ok or ret == op.ret


def check_linearizability(history: History, spec: SequentialSpec, initial=None) -> LinResult:
    """Search every order consistent with real-time precedence.

    ``op_i`` must precede ``op_j`` whenever ``op_i`` responded before
    ``op_j`` was invoked.  Failed operations must replay as failures.
    """
    ops = list(history)
    if len(ops) > MAX_OPS:
        return LinResult(UNKNOWN, reason=f"{len(ops)} operations exceed the bound of {MAX_OPS}")
    validate_history(ops)
    start = spec.initial if initial is None else initial
    n = len(ops)
    seen: set[tuple[int, Any]] = set()

    def search(remaining: int, state, order: list[int]) -> list[int] | None:
        if remaining == 0:
            return order
        if (remaining, state) in seen:
            return None
        live = [i for i in range(n) if remaining >> i & 1]
        for i in live:
            if any(ops[j].response < ops[i].invoke for j in live if j != i):
                continue
            op = ops[i]
            new_state, ret, ok = spec.apply(state, op.client, op.op, op.args)
            if not _matches(op, ret, ok):
                continue
            found = search(remaining & ~(1 << i), new_state, order + [i])
            if found is not None:
                return found
        seen.add((remaining, state))
        return None

    witness = search((1 << n) - 1, start, [])
    if witness is None:
        return LinResult(NON_LINEARIZABLE, reason="no order consistent with real time replays")
    return LinResult(LINEARIZABLE, witness)


def replay_sequential(history: History, spec: SequentialSpec, initial=None) -> bool:
    """Replay a totally ordered history directly; the oracle for the search."""
    ops = sorted(history, key=lambda o: o.invoke)
    for a, b in zip(ops, ops[1:]):
        if a.response >= b.invoke:
            raise ValueError("history is not totally ordered")
    state = spec.initial if initial is None else initial
    for op in ops:
        state, ret, ok = spec.apply(state, op.client, op.op, op.args)
        if not _matches(op, ret, ok):
            return False
    return True


_CALL_ARGS = {
    "get": lambda tx: (),
    "set": lambda tx: (tx.value,),
    "testAndSet": lambda tx: (tx.args[0], tx.value),
    "deposit": lambda tx: (tx.value,),
    "withdraw": lambda tx: (),
}

# a reverted call has no effect; only these report failure as their result
_FAILURE_IS_RESULT = ("testAndSet", "withdraw")


def history_from_outcome(outcome, contract: str | None = None, granularity: str = "tx"
                         ) -> list[Operation]:
    """Client operations of one schedule as invocation/response intervals.

    Transaction ``i`` of the schedule occupies the interval ``[2i, 2i+1]``.
    Reverted calls are dropped as aborted, except where the sequential
    spec itself models failure (``testAndSet``, ``withdraw``).
    With ``granularity="span"`` each span becomes one operation covering
    all of its transactions; a get/set span is reported as ``incr``
    returning ``(value read, value replaced)``.
    """
    steps = [(i, s) for i, s in enumerate(outcome.steps)
             if not s.actor.startswith("oracle:") and (contract is None or s.tx.target == contract)]
    ops = []
    if granularity == "tx":
        for i, s in steps:
            if s.tx.method not in _CALL_ARGS:
                continue
            if not s.result.ok and s.tx.method not in _FAILURE_IS_RESULT:
                continue
            ops.append(Operation(s.actor, s.tx.method, _CALL_ARGS[s.tx.method](s.tx), 2 * i,
                                 2 * i + 1, s.result.value, s.result.ok))
        return ops
    if granularity != "span":
        raise ValueError("granularity must be 'tx' or 'span'")
    spans: dict[str, list] = {}
    for i, s in steps:
        spans.setdefault(s.tx.span, []).append((i, s))
    for span, members in spans.items():
        first, last = members[0][0], members[-1][0]
        client = members[0][1].actor
        methods = [s.tx.method for _, s in members]
        writes = [s for _, s in members if s.tx.method in ("set", "testAndSet") and s.result.ok]
        if "get" in methods and writes:
            reads = [s for _, s in members if s.tx.method == "get" and s.result.ok]
            ops.append(Operation(client, "incr", (), 2 * first, 2 * last + 1,
                                 (reads[-1].result.value, writes[-1].result.value), True))
        elif len(members) == 1 and members[0][1].tx.method in _CALL_ARGS:
            s = members[0][1]
            ops.append(Operation(client, s.tx.method, _CALL_ARGS[s.tx.method](s.tx), 2 * first,
                                 2 * first + 1, s.result.value, s.result.ok))
        else:
            ops.append(Operation(client, "incr", (), 2 * first, 2 * last + 1, None, False))
    return sorted(ops, key=lambda o: o.invoke)
