"""Client strategies: deterministic state machines that emit transactions.

A client only knows what its own transactions returned.  The explorer
asks for the first transaction with :meth:`Client.first` and feeds back
each result through :meth:`Client.advance`; ``None`` means the client is
done.  Instances are deep-copied at every branch of the exploration tree,
so they keep plain attributes only.
"""

from __future__ import annotations

from ccsim.runtime import DEFAULT_STEP_BUDGET, Transaction, TxResult

RUNNING = "running"
DONE = "done"
FAILED = "failed"


class Client:
    name = "client"

    def __init__(self, cid: str, address: str, step_budget: int = DEFAULT_STEP_BUDGET):
        self.cid = cid
        self.address = address
        self.step_budget = step_budget
        self.status = RUNNING

    def tx(self, target: str, method: str, *args, value: int = 0, span: str | None = None):
        return Transaction(self.address, target, method, tuple(args), value,
                           self.step_budget, span, self.cid)

    def first(self) -> Transaction | None:
        raise NotImplementedError

    def advance(self, result: TxResult) -> Transaction | None:
        raise NotImplementedError

    def finish(self, status: str = DONE) -> None:
        self.status = status
        return None


class NaiveIncr(Client):
    """get, then set(value=read+1) in a second transaction; one span per increment."""

    name = "naive-incr"

    def __init__(self, cid, address, contract: str, times: int = 1, **kw):
        super().__init__(cid, address, **kw)
        self.contract = contract
        self.times = int(times)
        self.done_ops = 0
        self.phase = "get"

    def _span(self) -> str:
        return f"{self.cid}.incr{self.done_ops}"

    def first(self):
        if self.times <= 0:
            return self.finish()
        return self.tx(self.contract, "get", span=self._span())

    def advance(self, result):
        if self.phase == "get":
            if not result.ok:
                return self.finish(FAILED)
            self.phase = "set"
            return self.tx(self.contract, "set", value=result.value + 1, span=self._span())
        if not result.ok:
            return self.finish(FAILED)
        self.done_ops += 1
        self.phase = "get"
        if self.done_ops >= self.times:
            return self.finish()
        return self.tx(self.contract, "get", span=self._span())


class CasRetryIncr(Client):
    """get, then testAndSet(read, value=read+1); re-read and retry on revert."""

    name = "cas-retry-incr"

    def __init__(self, cid, address, contract: str, retries: int = 3, times: int = 1, **kw):
        super().__init__(cid, address, **kw)
        self.contract = contract
        self.retries = int(retries)
        self.times = int(times)
        self.done_ops = 0
        self.failures = 0
        self.phase = "get"
        self.seen = 0

    def _span(self) -> str:
        return f"{self.cid}.incr{self.done_ops}"

    def first(self):
        if self.times <= 0:
            return self.finish()
        return self.tx(self.contract, "get", span=self._span())

    def advance(self, result):
        if self.phase == "get":
            if not result.ok:
                return self.finish(FAILED)
            self.seen = result.value
            self.phase = "cas"
            return self.tx(self.contract, "testAndSet", self.seen, value=self.seen + 1,
                           span=self._span())
        self.phase = "get"
        if not result.ok:
            self.failures += 1
            if self.failures > self.retries:
                return self.finish(FAILED)
            return self.tx(self.contract, "get", span=self._span())
        self.done_ops += 1
        self.failures = 0
        if self.done_ops >= self.times:
            return self.finish()
        return self.tx(self.contract, "get", span=self._span())


class Script(Client):
    """Fixed list of calls, each its own span: ``[{"method", "args", "value"}]``."""

    name = "script"

    def __init__(self, cid, address, contract: str, calls: list, **kw):
        super().__init__(cid, address, **kw)
        self.contract = contract
        self.calls = [dict(c) for c in calls]
        self.index = 0

    def _next(self):
        if self.index >= len(self.calls):
            return self.finish()
        call = self.calls[self.index]
        span = call.get("span", f"{self.cid}.op{self.index}")
        self.index += 1
        return self.tx(call.get("target", self.contract), call["method"], *call.get("args", []),
                       value=int(call.get("value", 0)), span=span)

    def first(self):
        return self._next()

    def advance(self, result):
        return self._next()


class Depositor(Client):
    name = "depositor"

    def __init__(self, cid, address, contract: str, amount: int, withdraw: bool = False, **kw):
        super().__init__(cid, address, **kw)
        self.contract = contract
        self.amount = int(amount)
        self.withdraw = bool(withdraw)
        self.sent = 0

    def first(self):
        self.sent = 1
        return self.tx(self.contract, "deposit", value=self.amount, span=f"{self.cid}.deposit")

    def advance(self, result):
        if self.withdraw and self.sent == 1:
            self.sent = 2
            return self.tx(self.contract, "withdraw", span=f"{self.cid}.withdraw")
        return self.finish()


class Withdrawer(Client):
    name = "withdrawer"

    def __init__(self, cid, address, contract: str, **kw):
        super().__init__(cid, address, **kw)
        self.contract = contract

    def first(self):
        return self.tx(self.contract, "withdraw", span=f"{self.cid}.withdraw")

    def advance(self, result):
        return self.finish(DONE if result.ok else FAILED)


class Gambler(Client):
    """Calls enter once; the oracle callback inherits the same span."""

    name = "gambler"

    def __init__(self, cid, address, contract: str, value: int, **kw):
        super().__init__(cid, address, **kw)
        self.contract = contract
        self.value = int(value)

    def first(self):
        return self.tx(self.contract, "enter", value=self.value, span=f"{self.cid}.gamble")

    def advance(self, result):
        return self.finish(DONE if result.ok else FAILED)


class LockUser(Client):
    """acquire (retrying while it returns false), act, then release unless ``hold``.

    ``mode`` is ``read`` (act = get) or ``write`` (act = set with ``value``).
    ``acquire: false`` skips acquisition for a client that already holds the lock.
    """

    name = "lock-user"

    def __init__(self, cid, address, contract: str, mode: str = "read", hold: bool = False,
                 retries: int = 2, value: int = 0, acquire: bool = True, **kw):
        super().__init__(cid, address, **kw)
        if mode not in ("read", "write"):
            raise ValueError("lock-user mode must be 'read' or 'write'")
        self.contract = contract
        self.mode = mode
        self.hold = bool(hold)
        self.retries = int(retries)
        self.value = int(value)
        self.acquire = bool(acquire)
        self.attempts = 0
        self.phase = "acquire" if self.acquire else "act"

    @property
    def _lock(self) -> str:
        return "ReadLock" if self.mode == "read" else "WriteLock"

    def _span(self) -> str:
        # each lock call is its own logical operation; the lock, not the span,
        # is what protects the critical section
        return f"{self.cid}.{self.mode}{self.phase}{self.attempts}"

    def _emit(self):
        if self.phase == "acquire":
            self.attempts += 1
            return self.tx(self.contract, "acquire" + self._lock, span=self._span())
        if self.phase == "act":
            if self.mode == "read":
                return self.tx(self.contract, "get", span=self._span())
            return self.tx(self.contract, "set", value=self.value, span=self._span())
        return self.tx(self.contract, "release" + self._lock, span=self._span())

    def first(self):
        return self._emit()

    def advance(self, result):
        if self.phase == "acquire":
            if result.ok and result.value is True:
                self.phase = "act"
                return self._emit()
            if self.attempts > self.retries:
                return self.finish(FAILED)
            return self._emit()
        if self.phase == "act":
            if self.hold:
                return self.finish(DONE if result.ok else FAILED)
            self.phase = "release"
            return self._emit()
        return self.finish()


STRATEGIES: dict[str, type[Client]] = {
    cls.name: cls
    for cls in (NaiveIncr, CasRetryIncr, Script, Depositor, Withdrawer, Gambler, LockUser)
}


def make_client(strategy: str, cid: str, address: str, params: dict,
                step_budget: int = DEFAULT_STEP_BUDGET) -> Client:
    try:
        cls = STRATEGIES[strategy]
    except KeyError:
        raise KeyError(f"unknown strategy {strategy!r}") from None
    return cls(cid, address, step_budget=step_budget, **params)
