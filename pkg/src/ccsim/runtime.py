"""Atomic transaction execution with an intercepting effect API.

A transaction runs to completion on a single frame stack.  External calls
and value sends with fallback hooks nest new frames; a throw inside a
nested frame rolls back only that frame, a throw at frame 0 reverts the
whole transaction.  Every state touch appends one :class:`Event` to the
trace and consumes one step of the budget.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable

from ccsim.world import (
    NULL_ADDRESS,
    Address,
    Cell,
    EngineFault,
    TransferFailure,
    WorldState,
    check_value,
)

INVOKE_FALLBACK = "invoke_fallback"
TRANSFER_ONLY = "transfer_only"
SEND_MODES = (INVOKE_FALLBACK, TRANSFER_ONLY)

DEFAULT_STEP_BUDGET = 10_000
DEFAULT_DEPTH_CAP = 8

COMMITTED = "Committed"
REVERTED = "Reverted"


class _Failure:
    """Result of a nested call that threw or could not be entered."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "FAILURE"

    def __bool__(self) -> bool:
        return False


FAILURE = _Failure()


class Throw(Exception):
    """Solidity-era ``throw``: aborts the current frame, no payload."""


class OutOfSteps(Exception):
    pass


@dataclass(frozen=True)
class Transaction:
    origin: Address
    target: Address
    method: str
    args: tuple = ()
    value: int = 0
    step_budget: int = DEFAULT_STEP_BUDGET
    span: str | None = None
    actor: str = ""

    def to_json(self) -> dict:
        return {
            "origin": self.origin,
            "target": self.target,
            "method": self.method,
            "args": list(self.args),
            "value": self.value,
            "span": self.span,
            "actor": self.actor,
        }


@dataclass(frozen=True)
class Frame:
    id: int
    contract: Address
    method: str
    sender: Address
    value: int
    depth: int
    parent: int | None = None
    trigger: int | None = None  # seq of the parent's event that opened this frame

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "contract": self.contract,
            "method": self.method,
            "sender": self.sender,
            "value": self.value,
            "depth": self.depth,
            "parent": self.parent,
            "trigger": self.trigger,
        }


@dataclass
class Event:
    seq: int
    kind: str
    frame: int
    data: dict[str, Any]

    def __getitem__(self, key: str) -> Any:
        return self.data[key]

    def to_json(self) -> dict:
        return {"seq": self.seq, "kind": self.kind, "frame": self.frame, **self.data}


@dataclass
class Trace:
    tx: Transaction
    events: list[Event] = field(default_factory=list)
    status: str = COMMITTED
    reason: str | None = None
    steps_used: int = 0
    block_number: int = 0
    hash_before: str = ""
    hash_after: str = ""
    value_before: int = 0
    value_after: int = 0

    @property
    def committed(self) -> bool:
        return self.status == COMMITTED

    def frames(self) -> dict[int, Frame]:
        return {e.frame: e["info"] for e in self.events if e.kind == "CallEnter"}

    def failed_frames(self) -> set[int]:
        """Frames whose effects were rolled back, including descendants."""
        frames = self.frames()
        thrown = {e.frame for e in self.events if e.kind == "Throw"}
        if not self.committed:
            return set(frames)
        out = set()
        for fid in frames:
            cur: int | None = fid
            while cur is not None:
                if cur in thrown:
                    out.add(fid)
                    break
                cur = frames[cur].parent
        return out

    def to_json(self) -> dict:
        return {
            "tx": self.tx.to_json(),
            "status": self.status,
            "reason": self.reason,
            "steps_used": self.steps_used,
            "block_number": self.block_number,
            "events": [_jsonable(e.to_json()) for e in self.events],
        }

    def to_jsonl(self) -> str:
        return "\n".join(
            json.dumps(_jsonable(e.to_json()), sort_keys=True) for e in self.events
        )


@dataclass
class TxResult:
    status: str
    value: Any = None
    queries: list[tuple[int, Address]] = field(default_factory=list)
    reason: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == COMMITTED


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, Frame):
        return obj.to_json()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if obj is FAILURE:
        return "FAILURE"
    return obj


@dataclass(frozen=True)
class RuntimeConfig:
    send_mode: str = INVOKE_FALLBACK
    depth_cap: int = DEFAULT_DEPTH_CAP
    oracle_address: Address = "oracle"

    def __post_init__(self):
        if self.send_mode not in SEND_MODES:
            raise ValueError(f"send_mode must be one of {SEND_MODES}")
        if self.depth_cap < 1:
            raise ValueError("depth_cap must be positive")


# Resolved lazily so the corpus can import this module.
ContractLookup = Callable[[str], Any]


def _default_lookup(name: str):
    from ccsim.corpus import get_contract

    return get_contract(name)


class Context:
    """The effect API handed to contract bodies: ``msg``, storage, send, call."""

    def __init__(self, executor: _Executor, frame: Frame):
        self._ex = executor
        self.frame = frame

    @property
    def this(self) -> Address:
        return self.frame.contract

    @property
    def sender(self) -> Address:
        return self.frame.sender

    @property
    def value(self) -> int:
        return self.frame.value

    @property
    def oracle(self) -> Address:
        return self._ex.config.oracle_address

    def load(self, key: str, default: Cell = 0) -> Cell:
        return self._ex.storage_read(self.frame, key, default)

    def store(self, key: str, value: Cell) -> None:
        self._ex.storage_write(self.frame, key, value)

    def send(self, to: Address, amount: int) -> bool:
        return self._ex.send(self.frame, to, amount)

    def call(self, to: Address, method: str, *args, value: int = 0):
        return self._ex.call(self.frame, to, method, args, value)

    def query(self, spec: str) -> int:
        return self._ex.emit_oracle_query(self.frame, spec)

    def block_number(self) -> int:
        return self._ex.observe_block(self.frame)

    def self_balance(self) -> int:
        return self._ex.world.balance(self.frame.contract)

    def throw(self):
        raise Throw()

    def require(self, cond: bool) -> None:
        if not cond:
            raise Throw()


class _Executor:
    def __init__(self, world: WorldState, tx: Transaction, config: RuntimeConfig,
                 lookup: ContractLookup):
        self.world = world
        self.tx = tx
        self.config = config
        self.lookup = lookup
        self.events: list[Event] = []
        self._frames = 0

    def _emit(self, kind: str, frame: int, **data) -> Event:
        if len(self.events) >= self.tx.step_budget:
            raise OutOfSteps()
        event = Event(len(self.events), kind, frame, data)
        self.events.append(event)
        return event

    def _new_frame(self, contract, method, sender, value, depth, parent=None, trigger=None) -> Frame:
        frame = Frame(self._frames, contract, method, sender, value, depth, parent, trigger)
        self._frames += 1
        return frame

    def _body(self, contract: Address, method: str):
        spec = self.lookup(self.world.account(contract).contract)
        if method == "fallback":
            return spec.fallback
        body = spec.methods.get(method)
        if body is None:
            raise Throw()  # no such method: Solidity dispatch falls through to throw
        return body

    def run_frame(self, frame: Frame, args: tuple):
        """Run ``frame`` to completion; Throw propagates to the caller."""
        self._emit("CallEnter", frame.id, info=frame)
        try:
            body = self._body(frame.contract, frame.method)
            result = body(Context(self, frame), *args)
        except Throw:
            self._emit("Throw", frame.id, info=frame)
            self._emit("CallExit", frame.id, info=frame, result=FAILURE)
            raise
        self._emit("CallExit", frame.id, info=frame, result=result)
        return result

    # -- effect API ---------------------------------------------------

    def storage_read(self, frame: Frame, key: str, default: Cell) -> Cell:
        value = self.world.load(frame.contract, key, default)
        self._emit("Read", frame.id, contract=frame.contract, key=key, value=value)
        return value

    def storage_write(self, frame: Frame, key: str, value: Cell) -> None:
        old = self.world.load(frame.contract, key, None)
        self._emit("Write", frame.id, contract=frame.contract, key=key, old=old, new=value)
        self.world.store(frame.contract, key, value)

    def observe_block(self, frame: Frame) -> int:
        self._emit("BlockObserve", frame.id, number=self.world.block_number)
        return self.world.block_number

    def emit_oracle_query(self, frame: Frame, spec: str) -> int:
        qid = self.world.next_query_id()
        self._emit("OracleQuery", frame.id, query_id=qid, spec=spec, contract=frame.contract)
        return qid

    def send(self, frame: Frame, to: Address, amount: int) -> bool:
        check_value(amount)
        if to == NULL_ADDRESS:
            raise EngineFault("send to the null address")
        event = self._emit("SendAttempt", frame.id, **{
            "from": frame.contract, "to": to, "amount": amount,
            "fallback_invoked": False, "success": False,
        })
        token = self.world.snapshot()
        try:
            self.world.transfer(frame.contract, to, amount)
        except TransferFailure:
            self.world.restore(token)
            return False
        hook = None
        if self.config.send_mode == INVOKE_FALLBACK and self.world.is_contract(to):
            hook = self.lookup(self.world.account(to).contract).fallback
        if hook is not None:
            # value hooks do not count toward the call-depth budget
            child = self._new_frame(to, "fallback", frame.contract, amount, frame.depth,
                                    parent=frame.id, trigger=event.seq)
            event.data["fallback_invoked"] = True
            try:
                self.run_frame(child, ())
            except Throw:
                self.world.restore(token)
                return False
        self.world.release(token)
        event.data["success"] = True
        return True

    def call(self, frame: Frame, to: Address, method: str, args: tuple, value: int):
        check_value(value)
        if frame.depth + 1 >= self.config.depth_cap:
            return FAILURE
        if not self.world.is_contract(to):
            raise EngineFault(f"call to non-contract {to}")
        token = self.world.snapshot()
        try:
            self.world.transfer(frame.contract, to, value)
        except TransferFailure:
            self.world.restore(token)
            return FAILURE
        child = self._new_frame(to, method, frame.contract, value, frame.depth + 1,
                                parent=frame.id, trigger=len(self.events))
        try:
            result = self.run_frame(child, tuple(args))
        except Throw:
            self.world.restore(token)
            return FAILURE
        self.world.release(token)
        return result


def execute(world: WorldState, tx: Transaction, config: RuntimeConfig | None = None,
            lookup: ContractLookup | None = None) -> tuple[WorldState, Trace, TxResult]:
    """Run ``tx`` atomically against ``world`` (mutated in place).

    Returns the same world object, the trace, and the result.  On revert
    the world is restored to its pre-transaction contents.
    """
    config = config or RuntimeConfig()
    lookup = lookup or _default_lookup
    if tx.step_budget < 1:
        raise EngineFault("step_budget must be positive")
    trace = Trace(tx=tx, block_number=world.block_number, hash_before=world.hash(),
                  value_before=world.total_value())
    ex = _Executor(world, tx, config, lookup)
    world.account(tx.origin)
    world.account(tx.target)

    token = world.snapshot()
    status, reason, value = COMMITTED, None, None
    try:
        world.transfer(tx.origin, tx.target, tx.value)
    except TransferFailure:
        status, reason = REVERTED, "InsufficientValue"
    if status == COMMITTED and world.is_contract(tx.target):
        frame = ex._new_frame(tx.target, tx.method, tx.origin, tx.value, 0)
        try:
            value = ex.run_frame(frame, tuple(tx.args))
        except Throw:
            status, reason = REVERTED, "Throw"
        except OutOfSteps:
            status, reason = REVERTED, "OutOfSteps"
    if status == COMMITTED:
        world.release(token)
    else:
        world.restore(token)
        value = None

    trace.events = ex.events
    trace.status = status
    trace.reason = reason
    trace.steps_used = len(ex.events)
    trace.hash_after = world.hash()
    trace.value_after = world.total_value()
    queries = []
    if status == COMMITTED:
        dropped = trace.failed_frames()
        queries = [(e["query_id"], e["contract"]) for e in trace.events
                   if e.kind == "OracleQuery" and e.frame not in dropped]
    return world, trace, TxResult(status, value, queries, reason)
