"""Accounts, balances and contract storage, with journaled snapshots.

The world is the shared memory every transaction runs against.  All
mutation goes through a handful of methods so that an undo journal can
be kept while at least one snapshot is open; restoring a snapshot pops
the journal back to the recorded mark.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from typing import Union

NULL_ADDRESS = "0x0"
UINT_MAX = 2**256 - 1

Address = str
Cell = Union[int, bool, str]


class EngineFault(Exception):
    """Programming error inside the engine or a corpus body; aborts the run."""


class TransferFailure(Exception):
    """Raised when a transfer would drive a balance negative."""


def cell_tag(value: Cell) -> str:
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, str):
        return "address"
    raise EngineFault(f"unsupported storage value {value!r}")


def check_value(amount: int) -> int:
    if isinstance(amount, bool) or not isinstance(amount, int):
        raise EngineFault(f"value must be an integer, got {amount!r}")
    if amount < 0:
        raise EngineFault(f"negative value {amount}")
    if amount > UINT_MAX:
        raise EngineFault(f"value overflow: {amount}")
    return amount


@dataclass
class Account:
    balance: int = 0
    contract: str | None = None
    storage: dict[str, Cell] = field(default_factory=dict)

    def to_json(self) -> dict:
        out: dict = {"balance": self.balance}
        if self.contract is not None:
            out["contract"] = self.contract
            out["storage"] = {k: self.storage[k] for k in sorted(self.storage)}
        return out


@dataclass(frozen=True)
class SnapshotToken:
    world_id: int
    serial: int
    mark: int


class WorldState:
    """Mutable world with an undo journal.

    ``snapshot``/``restore``/``release`` follow stack discipline: restoring
    or releasing a token invalidates every token taken after it.
    """

    def __init__(self, accounts: dict[Address, Account] | None = None, block_number: int = 0):
        self.accounts: dict[Address, Account] = dict(accounts or {})
        self.block_number = block_number
        self.query_counter = 0
        self._journal: list[tuple] = []
        self._tokens: list[SnapshotToken] = []
        self._serial = 0

    # -- construction -------------------------------------------------

    def add_account(self, address: Address, balance: int = 0) -> Account:
        if address in self.accounts:
            raise EngineFault(f"duplicate address {address}")
        if address == NULL_ADDRESS:
            raise EngineFault("the null address cannot hold an account")
        acct = Account(balance=check_value(balance))
        self.accounts[address] = acct
        return acct

    def deploy(self, address: Address, contract: str, storage: dict[str, Cell] | None = None,
               balance: int = 0) -> Account:
        acct = self.add_account(address, balance)
        acct.contract = contract
        for key, value in (storage or {}).items():
            cell_tag(value)
            acct.storage[key] = value
        return acct

    def copy(self) -> WorldState:
        if self._tokens:
            raise EngineFault("cannot copy a world with open snapshots")
        return copy.deepcopy(self)

    # -- queries -------------------------------------------------------

    def account(self, address: Address) -> Account:
        try:
            return self.accounts[address]
        except KeyError:
            raise EngineFault(f"unknown address {address!r}") from None

    def balance(self, address: Address) -> int:
        return self.account(address).balance

    def is_contract(self, address: Address) -> bool:
        acct = self.accounts.get(address)
        return acct is not None and acct.contract is not None

    def total_value(self) -> int:
        return sum(a.balance for a in self.accounts.values())

    def load(self, address: Address, key: str, default: Cell = 0) -> Cell:
        acct = self.account(address)
        if acct.contract is None:
            raise EngineFault(f"{address} has no storage")
        return acct.storage.get(key, default)

    # -- mutation ------------------------------------------------------

    def store(self, address: Address, key: str, value: Cell) -> Cell:
        acct = self.account(address)
        if acct.contract is None:
            raise EngineFault(f"{address} has no storage")
        tag = cell_tag(value)
        if tag == "int":
            check_value(value)
        missing = key not in acct.storage
        old = acct.storage.get(key)
        if not missing and cell_tag(old) != tag:
            raise EngineFault(f"tag mismatch on {address}.{key}: {cell_tag(old)} -> {tag}")
        if self._tokens:
            self._journal.append(("store", address, key, missing, old))
        acct.storage[key] = value
        return old

    def _set_balance(self, address: Address, amount: int) -> None:
        acct = self.account(address)
        if self._tokens:
            self._journal.append(("balance", address, acct.balance))
        acct.balance = check_value(amount)

    def transfer(self, src: Address, dst: Address, amount: int) -> None:
        check_value(amount)
        if dst == NULL_ADDRESS:
            raise EngineFault("transfer to the null address")
        if amount == 0:
            self.account(src)
            self.account(dst)
            return
        if self.balance(src) < amount:
            raise TransferFailure(f"{src} holds {self.balance(src)}, needs {amount}")
        self._set_balance(src, self.balance(src) - amount)
        self._set_balance(dst, self.balance(dst) + amount)

    def next_query_id(self) -> int:
        if self._tokens:
            self._journal.append(("query", self.query_counter))
        self.query_counter += 1
        return self.query_counter

    # -- snapshots -----------------------------------------------------

    def snapshot(self) -> SnapshotToken:
        self._serial += 1
        token = SnapshotToken(id(self), self._serial, len(self._journal))
        self._tokens.append(token)
        return token

    def _pop_to(self, token: SnapshotToken) -> None:
        if token.world_id != id(self) or token not in self._tokens:
            raise EngineFault(f"stale or foreign snapshot token {token}")
        while self._tokens[-1] != token:
            self._tokens.pop()
        self._tokens.pop()

    def restore(self, token: SnapshotToken) -> WorldState:
        self._pop_to(token)
        while len(self._journal) > token.mark:
            entry = self._journal.pop()
            if entry[0] == "store":
                _, address, key, missing, old = entry
                if missing:
                    del self.accounts[address].storage[key]
                else:
                    self.accounts[address].storage[key] = old
            elif entry[0] == "balance":
                _, address, old = entry
                self.accounts[address].balance = old
            else:
                self.query_counter = entry[1]
        if not self._tokens:
            self._journal.clear()
        return self

    def release(self, token: SnapshotToken) -> None:
        """Keep the changes made since ``token`` and drop the token."""
        self._pop_to(token)
        if not self._tokens:
            self._journal.clear()

    # -- canonical form ------------------------------------------------

    def to_json(self) -> dict:
        return {
            "accounts": {a: self.accounts[a].to_json() for a in sorted(self.accounts)},
            "block_number": self.block_number,
            "query_counter": self.query_counter,
        }

    def canonical(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WorldState):
            return NotImplemented
        return self.canonical() == other.canonical()

    __hash__ = None  # mutable

    def __deepcopy__(self, memo):
        new = WorldState.__new__(WorldState)
        new.accounts = {
            a: Account(acct.balance, acct.contract, dict(acct.storage))
            for a, acct in self.accounts.items()
        }
        new.block_number = self.block_number
        new.query_counter = self.query_counter
        new._journal = []
        new._tokens = []
        new._serial = 0
        return new


def snapshot(world: WorldState) -> SnapshotToken:
    return world.snapshot()


def restore(world: WorldState, token: SnapshotToken) -> WorldState:
    return world.restore(token)


def transfer(world: WorldState, src: Address, dst: Address, amount: int) -> WorldState:
    world.transfer(src, dst, amount)
    return world


def total_value(world: WorldState) -> int:
    return world.total_value()
