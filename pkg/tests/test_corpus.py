import pytest

from ccsim.corpus import CONTRACTS, get_contract, get_spec, registry_listing
from ccsim.runtime import COMMITTED, REVERTED, TRANSFER_ONLY, RuntimeConfig, Transaction, execute
from ccsim.world import NULL_ADDRESS, WorldState

from conftest import run


def test_counter_get_on_fresh_contract_is_zero():
    w = WorldState()
    w.add_account("a", 0)
    w.deploy("c", "Counter", {})
    _, _, res = run(w, "a", "c", "get")
    assert res.value == 0


# -- OwnedCounter --------------------------------------------------------------

def owned_world():
    w = WorldState()
    w.add_account("alice", 50)
    w.add_account("mallory", 50)
    w.deploy("c", "OwnedCounter", get_contract("OwnedCounter").init({"owner": "alice", "balance": 0}))
    return w


def test_owner_set_behaves_like_counter_set():
    w = owned_world()
    _, _, res = run(w, "alice", "c", "set", value=4)
    assert res.value == 0 and w.load("c", "balance") == 4


@pytest.mark.parametrize("method,value", [("get", 0), ("set", 9)])
def test_non_owner_reverts_and_storage_unchanged(method, value):
    w = owned_world()
    before = w.hash()
    _, trace, res = run(w, "mallory", "c", method, value=value)
    assert res.status == REVERTED
    assert w.hash() == before
    # the modifier check is the only thing that ran
    assert [e["key"] for e in trace.events if e.kind == "Read"] == ["owner"]


# -- RWLockCounter -------------------------------------------------------------

def rw_world(**params):
    w = WorldState()
    for a in ("A", "B"):
        w.add_account(a, 50)
    w.deploy("c", "RWLockCounter", get_contract("RWLockCounter").init(params))
    return w


def test_reader_blocks_writer():
    w = rw_world()
    assert run(w, "A", "c", "acquireReadLock")[2].value is True
    assert run(w, "B", "c", "acquireWriteLock")[2].value is False


def test_writer_blocks_reader():
    w = rw_world()
    assert run(w, "A", "c", "acquireWriteLock")[2].value is True
    assert run(w, "B", "c", "acquireReadLock")[2].value is False
    assert w.load("c", "writer") == "A"


def test_release_by_non_holder_is_refused():
    w = rw_world()
    run(w, "A", "c", "acquireWriteLock")
    assert run(w, "B", "c", "releaseWriteLock")[2].value is False
    assert run(w, "A", "c", "releaseWriteLock")[2].value is True
    assert w.load("c", "writer") == NULL_ADDRESS


def test_get_needs_a_lock_and_set_needs_the_write_lock():
    w = rw_world()
    assert run(w, "A", "c", "get")[2].status == REVERTED
    run(w, "A", "c", "acquireReadLock")
    assert run(w, "A", "c", "get")[2].status == COMMITTED
    assert run(w, "A", "c", "set", value=3)[2].status == REVERTED
    run(w, "A", "c", "releaseReadLock")
    run(w, "A", "c", "acquireWriteLock")
    assert run(w, "A", "c", "set", value=3)[2].status == COMMITTED
    # the writer can read too
    assert run(w, "A", "c", "get")[2].value == 3


def test_rwlock_init_rejects_writer_with_readers():
    with pytest.raises(ValueError):
        get_contract("RWLockCounter").init({"readers": ["A"], "writer": "B"})


# -- DAO / FixedDAO / Attacker --------------------------------------------------

def dao_world(kind, pool=100, stake=10, reentries=4):
    w = WorldState()
    w.deploy("dao", kind, get_contract(kind).init({"balances": {"attacker": stake,
                                                                "honest": pool - stake}}),
             balance=pool)
    w.deploy("attacker", "Attacker", get_contract("Attacker").init(
        {"victim": "dao", "reentries": reentries}))
    w.add_account("honest", 0)
    return w


def attack(kind, depth_cap, reentries, pool=100, stake=10, mode="invoke_fallback"):
    w = dao_world(kind, pool, stake, reentries)
    _, trace, res = execute(w, Transaction("attacker", "dao", "withdraw"),
                            RuntimeConfig(send_mode=mode, depth_cap=depth_cap))
    return w, trace, res


def hand_count_gain(trace, stake):
    # oracle: successful sends into the attacker, each worth one stake
    return sum(e["amount"] for e in trace.events
               if e.kind == "SendAttempt" and e["to"] == "attacker" and e["success"]
               and e.frame not in trace.failed_frames())


def test_honest_deposit_then_withdraw():
    w = WorldState()
    w.add_account("h", 10)
    w.deploy("dao", "DAO", get_contract("DAO").init({}))
    assert run(w, "h", "dao", "deposit", value=10)[2].ok
    assert w.load("dao", "totalSupply") == 10
    _, _, res = run(w, "h", "dao", "withdraw")
    assert res.ok and w.balance("h") == 10
    assert w.load("dao", "balances.h") == 0 and w.load("dao", "totalSupply") == 0


def test_dao_attack_drains_five_stakes():
    w, trace, res = attack("DAO", depth_cap=6, reentries=4)
    assert res.ok
    assert w.balance("attacker") == 50 == hand_count_gain(trace, 10)
    assert w.balance("dao") == 50


def test_fixed_dao_attack_gets_only_the_stake():
    w, trace, res = attack("FixedDAO", depth_cap=6, reentries=4)
    assert res.ok
    assert w.balance("attacker") == 10 == hand_count_gain(trace, 10)
    assert w.balance("dao") == 90


def test_dao_send_precedes_zeroing_and_fixed_dao_the_reverse():
    _, t_dao, _ = attack("DAO", 6, 0)
    _, t_fix, _ = attack("FixedDAO", 6, 0)

    def order(trace):
        out = []
        for e in trace.events:
            if e.frame != 0:
                continue
            if e.kind == "SendAttempt":
                out.append("send")
            elif e.kind == "Write" and e["key"] == "balances.attacker":
                out.append("zero")
        return out

    assert order(t_dao) == ["send", "zero"]
    assert order(t_fix) == ["zero", "send"]


def test_attacker_with_no_reentries_is_an_honest_recipient():
    w, trace, _ = attack("DAO", 6, 0)
    assert w.balance("attacker") == 10
    assert w.load("attacker", "entries") == 0


@pytest.mark.parametrize("r", [0, 1, 2, 4, 6, 12])
@pytest.mark.parametrize("cap", [1, 2, 3, 6, 8])
def test_attacker_gain_formula(r, cap):
    stake, pool = 10, 100
    w, trace, res = attack("DAO", cap, r, pool, stake)
    assert res.ok
    expected = min((1 + min(r, cap - 1)) * stake, pool)
    assert w.balance("attacker") == expected == hand_count_gain(trace, stake)
    w, trace, _ = attack("FixedDAO", cap, r, pool, stake)
    assert w.balance("attacker") == stake


def test_gain_bounded_by_pool():
    # pool 30, stake 10, unlimited re-entry: the fourth send fails and unwinds
    w, trace, res = attack("DAO", 20, 10, pool=30, stake=10)
    assert res.ok
    assert w.balance("attacker") == 30
    assert w.total_value() == 30


def test_depth_cap_below_reentry_truncates_and_commits():
    w, trace, res = attack("DAO", 3, 4)
    assert res.ok and w.balance("attacker") == 30


def test_transfer_only_mode_defuses_attack():
    w, _, _ = attack("DAO", 6, 4, mode=TRANSFER_ONLY)
    assert w.balance("attacker") == 10


# -- BlockKing -----------------------------------------------------------------

def bk_world(block=57):
    w = WorldState(block_number=block)
    for a, bal in (("owner", 0), ("A", 5000), ("B", 5000), ("oracle", 0)):
        w.add_account(a, bal)
    w.deploy("bk", "BlockKing", get_contract("BlockKing").init({"owner": "owner"}))
    return w


def test_winning_callback_crowns_warrior():
    w = bk_world(57)
    run(w, "A", "bk", "enter", value=100)
    _, _, res = run(w, "oracle", "bk", "__callback", 1, 7)
    assert res.ok
    assert w.load("bk", "singleDigitBlock") == 7
    assert w.load("bk", "king") == "A"
    assert w.load("bk", "kingBlock") == 57
    # 50% of the pot to the king, the rest to the owner
    assert w.balance("A") == 5000 - 100 + 50 and w.balance("owner") == 50


def test_losing_callback_keeps_king():
    w = bk_world(57)
    run(w, "A", "bk", "enter", value=100)
    run(w, "oracle", "bk", "__callback", 1, 3)
    assert w.load("bk", "king") == "owner"
    assert w.balance("owner") == 100


def test_big_payment_gets_75_percent():
    w = bk_world(57)
    run(w, "A", "bk", "enter", value=1000)
    run(w, "oracle", "bk", "__callback", 1, 7)
    assert w.load("bk", "rewardPercent") == 75
    assert w.balance("A") == 5000 - 1000 + 750


def test_entry_below_threshold_is_refunded_without_query():
    w = bk_world()
    _, trace, res = run(w, "A", "bk", "enter", value=49)
    assert res.ok and res.queries == []
    assert w.balance("A") == 5000
    assert not any(e.kind == "OracleQuery" for e in trace.events)


def test_threshold_is_fifty_units():
    w = bk_world()
    _, _, res = run(w, "A", "bk", "enter", value=50)
    assert res.queries == [(1, "bk")]


def test_callback_from_non_oracle_reverts():
    w = bk_world()
    run(w, "A", "bk", "enter", value=100)
    before = w.hash()
    _, _, res = run(w, "B", "bk", "__callback", 1, 7)
    assert res.status == REVERTED and w.hash() == before


def test_enter_records_block_number():
    w = bk_world(123)
    _, trace, _ = run(w, "A", "bk", "enter", value=100)
    assert w.load("bk", "warriorBlock") == 123
    assert [e["number"] for e in trace.events if e.kind == "BlockObserve"] == [123]


def test_overwrite_gives_second_gambler_both_chances():
    w = bk_world(57)
    run(w, "A", "bk", "enter", value=100)
    run(w, "B", "bk", "enter", value=100)
    run(w, "oracle", "bk", "__callback", 1, 7)
    assert w.load("bk", "king") == "B"


# -- registry and specs --------------------------------------------------------

def test_registry_contents_and_figures():
    assert {"Counter", "CASCounter", "OwnedCounter", "RWLockCounter", "DAO", "FixedDAO",
            "Attacker", "BlockKing"} <= set(CONTRACTS)
    text = registry_listing()
    assert "Fig. 2-right" in text and "Fig. 1" in text
    assert text == registry_listing()


def test_counter_spec():
    spec = get_spec("counter")
    assert spec.apply(5, "c", "set", (7,)) == (7, 5, True)
    assert spec.apply(5, "c", "testAndSet", (4, 9)) == (5, None, False)
    assert spec.apply(5, "c", "testAndSet", (5, 9)) == (9, 5, True)
    assert spec.apply(3, "c", "incr", ()) == (4, (3, 3), True)


def test_dao_spec_pays_at_most_the_deposit():
    spec = get_spec("dao")
    s = spec.initial
    s, _, _ = spec.apply(s, "h", "deposit", (10,))
    s, paid, ok = spec.apply(s, "h", "withdraw", ())
    assert (paid, ok) == (10, True)
    _, paid, ok = spec.apply(s, "h", "withdraw", ())
    assert ok is False and paid is None
