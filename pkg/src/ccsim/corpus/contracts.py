"""Native bodies for the contracts in the corpus.

Each body receives a :class:`ccsim.runtime.Context` as ``ctx`` and touches
state only through it.  Statement order follows the original Solidity
fragments line by line, since detectors depend on event order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from ccsim.world import NULL_ADDRESS

BLOCKKING_MIN_ENTRY = 50
BLOCKKING_BIG_PAYMENT = 999
ORACLE_QUERY = "random number between 1 and 9"


@dataclass(frozen=True)
class ContractSpec:
    name: str
    figure: str
    summary: str
    methods: Mapping[str, Callable[..., Any]]
    fallback: Callable[..., Any] | None = None
    init: Callable[[dict], dict] = field(default=lambda params: {})


# -- Counter / CASCounter ---------------------------------------------------


def counter_get(ctx):
    return ctx.load("balance")


def counter_set(ctx):
    t = ctx.load("balance")
    ctx.store("balance", ctx.value)
    ctx.require(ctx.send(ctx.sender, t))
    return t


def cas_test_and_set(ctx, expected):
    t = ctx.load("balance")
    if t == expected:
        ctx.store("balance", ctx.value)
        ctx.require(ctx.send(ctx.sender, t))
        return t
    ctx.throw()


def _counter_init(params: dict) -> dict:
    return {"balance": int(params.get("balance", 0))}


# -- OwnedCounter -------------------------------------------------------------


def by_owner(body):
    def guarded(ctx, *args):
        if ctx.sender != ctx.load("owner", NULL_ADDRESS):
            ctx.throw()
        return body(ctx, *args)

    guarded.__name__ = body.__name__
    return guarded


def _owned_init(params: dict) -> dict:
    if "owner" not in params:
        raise ValueError("OwnedCounter needs an 'owner' parameter")
    return {"owner": params["owner"], "balance": int(params.get("balance", 0))}


# -- RWLockCounter ------------------------------------------------------------


def _reader_key(addr: str) -> str:
    return f"readers.{addr}"


def can_read(body):
    def guarded(ctx, *args):
        # readers OR the writer; the figure's `!=`/`||` combination is not used
        is_reader = ctx.load(_reader_key(ctx.sender), False)
        if not is_reader and ctx.sender != ctx.load("writer", NULL_ADDRESS):
            ctx.throw()
        return body(ctx, *args)

    guarded.__name__ = body.__name__
    return guarded


def can_write(body):
    def guarded(ctx, *args):
        if ctx.sender != ctx.load("writer", NULL_ADDRESS):
            ctx.throw()
        return body(ctx, *args)

    guarded.__name__ = body.__name__
    return guarded


def acquire_read_lock(ctx):
    if ctx.load("writer", NULL_ADDRESS) == NULL_ADDRESS:
        if not ctx.load(_reader_key(ctx.sender), False):
            ctx.store(_reader_key(ctx.sender), True)
            ctx.store("readerCount", ctx.load("readerCount") + 1)
        return True
    return False


def release_read_lock(ctx):
    if not ctx.load(_reader_key(ctx.sender), False):
        return False
    ctx.store(_reader_key(ctx.sender), False)
    ctx.store("readerCount", ctx.load("readerCount") - 1)
    return True


def acquire_write_lock(ctx):
    if ctx.load("writer", NULL_ADDRESS) != NULL_ADDRESS:
        return False
    if ctx.load("readerCount") != 0:
        return False
    ctx.store("writer", ctx.sender)
    return True


def release_write_lock(ctx):
    if ctx.load("writer", NULL_ADDRESS) != ctx.sender:
        return False
    ctx.store("writer", NULL_ADDRESS)
    return True


def _rwlock_init(params: dict) -> dict:
    storage = {"balance": int(params.get("balance", 0)), "writer": NULL_ADDRESS}
    readers = list(params.get("readers", []))
    for r in readers:
        storage[_reader_key(r)] = True
    storage["readerCount"] = len(readers)
    if params.get("writer"):
        if readers:
            raise ValueError("RWLockCounter cannot start with both a writer and readers")
        storage["writer"] = params["writer"]
    return storage


# -- DAO ----------------------------------------------------------------------


def _bal(addr: str) -> str:
    return f"balances.{addr}"


def dao_deposit(ctx):
    key = _bal(ctx.sender)
    ctx.store(key, ctx.load(key) + ctx.value)
    ctx.store("totalSupply", ctx.load("totalSupply") + ctx.value)
    return True


def dao_withdraw(ctx):
    key = _bal(ctx.sender)
    amount = ctx.load(key)
    if amount == 0:
        ctx.throw()
    # withdrawRewardFor: pay first, then burn
    ctx.require(ctx.send(ctx.sender, amount))
    ctx.store("totalSupply", ctx.load("totalSupply") - ctx.load(key))
    ctx.store(key, 0)
    ctx.store(f"paidOut.{ctx.sender}", 0)
    return True


def fixed_dao_withdraw(ctx):
    key = _bal(ctx.sender)
    amount = ctx.load(key)
    if amount == 0:
        ctx.throw()
    ctx.store("totalSupply", ctx.load("totalSupply") - ctx.load(key))
    ctx.store(key, 0)
    ctx.store(f"paidOut.{ctx.sender}", 0)
    ctx.require(ctx.send(ctx.sender, amount))
    return True


def _dao_init(params: dict) -> dict:
    storage: dict = {}
    total = 0
    for addr, amount in sorted(params.get("balances", {}).items()):
        storage[_bal(addr)] = int(amount)
        total += int(amount)
    storage["totalSupply"] = total
    return storage


# -- Attacker -----------------------------------------------------------------


def attacker_fallback(ctx):
    entries = ctx.load("entries")
    if entries >= ctx.load("reentries"):
        return None
    ctx.store("entries", entries + 1)
    ctx.call(ctx.load("victim", NULL_ADDRESS), "withdraw")  # Failure swallowed
    return None


def attacker_deposit(ctx, amount):
    ctx.call(ctx.load("victim", NULL_ADDRESS), "deposit", value=amount)
    return True


def _attacker_init(params: dict) -> dict:
    if "victim" not in params:
        raise ValueError("Attacker needs a 'victim' parameter")
    return {"victim": params["victim"], "reentries": int(params.get("reentries", 0)),
            "entries": 0}


# -- BlockKing ----------------------------------------------------------------


def blockking_enter(ctx):
    if ctx.value < BLOCKKING_MIN_ENTRY:
        ctx.send(ctx.sender, ctx.value)
        return None
    ctx.store("warrior", ctx.sender)
    ctx.store("warriorGold", ctx.value)
    ctx.store("warriorBlock", ctx.block_number())
    return ctx.query(ORACLE_QUERY)


def blockking_callback(ctx, query_id, result):
    if ctx.sender != ctx.oracle:
        ctx.throw()
    ctx.store("randomNumber", int(str(result)[0]))
    _process_payment(ctx)
    return None


def _process_payment(ctx):
    warrior = ctx.load("warrior", NULL_ADDRESS)
    single_digit_block = ctx.load("warriorBlock") % 10
    ctx.store("singleDigitBlock", single_digit_block)
    if single_digit_block == ctx.load("randomNumber"):
        ctx.store("rewardPercent", 50)
        if ctx.load("warriorGold") > BLOCKKING_BIG_PAYMENT:
            ctx.store("rewardPercent", 75)
        ctx.store("king", warrior)
        ctx.store("kingBlock", ctx.load("warriorBlock"))
    pot = ctx.self_balance()
    reward = pot * ctx.load("rewardPercent") // 100
    king = ctx.load("king", NULL_ADDRESS)
    if reward:
        ctx.send(king, reward)
    rest = ctx.self_balance()
    if rest:
        ctx.send(ctx.load("owner", NULL_ADDRESS), rest)


def _blockking_init(params: dict) -> dict:
    if "owner" not in params:
        raise ValueError("BlockKing needs an 'owner' parameter")
    return {
        "owner": params["owner"],
        "king": params["owner"],
        "warrior": NULL_ADDRESS,
        "rewardPercent": int(params.get("rewardPercent", 50)),
    }


CONTRACTS: dict[str, ContractSpec] = {
    "Counter": ContractSpec(
        "Counter", "Fig. 2-left", "get/set counter; set stores msg.value and refunds the old value",
        {"get": counter_get, "set": counter_set}, init=_counter_init),
    "CASCounter": ContractSpec(
        "CASCounter", "Fig. 2-right", "Counter plus testAndSet(expected); mismatch throws",
        {"get": counter_get, "set": counter_set, "testAndSet": cas_test_and_set},
        init=_counter_init),
    "OwnedCounter": ContractSpec(
        "OwnedCounter", "Fig. 3-left", "Counter whose get/set are guarded by byOwner",
        {"get": by_owner(counter_get), "set": by_owner(counter_set)}, init=_owned_init),
    "RWLockCounter": ContractSpec(
        "RWLockCounter", "Fig. 3-right", "Counter guarded by a read/write lock held in storage",
        {
            "acquireReadLock": acquire_read_lock,
            "releaseReadLock": release_read_lock,
            "acquireWriteLock": acquire_write_lock,
            "releaseWriteLock": release_write_lock,
            "get": can_read(counter_get),
            "set": can_write(counter_set),
        },
        init=_rwlock_init),
    "DAO": ContractSpec(
        "DAO", "Fig. DAO code fragment", "withdraw pays out before zeroing the balance",
        {"deposit": dao_deposit, "withdraw": dao_withdraw}, init=_dao_init),
    "FixedDAO": ContractSpec(
        "FixedDAO", "Fig. DAO code fragment (checks-effects-interactions)",
        "withdraw zeroes the balance before paying out",
        {"deposit": dao_deposit, "withdraw": fixed_dao_withdraw}, init=_dao_init),
    "Attacker": ContractSpec(
        "Attacker", "DAO attack pattern", "fallback re-enters victim.withdraw up to a bound",
        {"deposit": attacker_deposit}, fallback=attacker_fallback, init=_attacker_init),
    "BlockKing": ContractSpec(
        "BlockKing", "Fig. 1", "oracle-backed gamble; enter records the warrior, callback pays out",
        {"enter": blockking_enter, "__callback": blockking_callback}, init=_blockking_init),
}


def get_contract(name: str) -> ContractSpec:
    try:
        return CONTRACTS[name]
    except KeyError:
        raise KeyError(f"unknown contract {name!r}") from None
