import json

import pytest

from ccsim.world import (
    NULL_ADDRESS,
    EngineFault,
    TransferFailure,
    WorldState,
    restore,
    snapshot,
    total_value,
    transfer,
)


def make():
    w = WorldState(block_number=3)
    w.add_account("a", 10)
    w.add_account("b", 0)
    w.deploy("c", "Counter", {"balance": 5}, balance=5)
    return w


def test_snapshot_restore_without_writes_is_identity():
    w = make()
    before = w.canonical()
    restore(w, snapshot(w))
    assert w.canonical() == before


def test_restore_undoes_write():
    w = make()
    tok = snapshot(w)
    w.store("c", "k", 7)
    assert w.load("c", "k") == 7
    restore(w, tok)
    assert w.load("c", "k", default=0) == 0
    assert "k" not in w.account("c").storage


def test_nested_snapshots_stack_discipline():
    w = make()
    outer_state = w.canonical()
    s1 = w.snapshot()
    w.store("c", "balance", 6)
    mid_state = w.canonical()
    s2 = w.snapshot()
    w.store("c", "balance", 9)
    w.transfer("a", "b", 4)
    w.restore(s2)
    assert w.canonical() == mid_state
    w.restore(s1)
    assert w.canonical() == outer_state


def test_restore_outer_invalidates_inner_token():
    w = make()
    s1 = w.snapshot()
    s2 = w.snapshot()
    w.restore(s1)
    with pytest.raises(EngineFault):
        w.restore(s2)


def test_foreign_token_is_a_fault():
    w1, w2 = make(), make()
    tok = w1.snapshot()
    with pytest.raises(EngineFault):
        w2.restore(tok)


def test_release_keeps_changes_and_outer_restore_still_undoes_them():
    w = make()
    before = w.canonical()
    s1 = w.snapshot()
    s2 = w.snapshot()
    w.store("c", "balance", 1)
    w.release(s2)
    assert w.load("c", "balance") == 1
    w.restore(s1)
    assert w.canonical() == before


def test_transfer_moves_value():
    w = make()
    transfer(w, "a", "b", 10)
    assert (w.balance("a"), w.balance("b")) == (0, 10)


def test_zero_transfer_is_identity():
    w = make()
    before = w.canonical()
    transfer(w, "a", "b", 0)
    assert w.canonical() == before


def test_insufficient_transfer_fails_and_leaves_world():
    w = WorldState()
    w.add_account("a", 5)
    w.add_account("b", 0)
    before = w.canonical()
    with pytest.raises(TransferFailure):
        w.transfer("a", "b", 6)
    assert w.canonical() == before


def test_total_value():
    w = WorldState()
    w.add_account("x", 3)
    w.add_account("y", 4)
    assert total_value(w) == 7


def test_values_are_checked():
    w = make()
    with pytest.raises(EngineFault):
        w.store("c", "balance", -1)
    with pytest.raises(EngineFault):
        w.store("c", "balance", 2**256)
    with pytest.raises(EngineFault):
        w.add_account("d", -3)


def test_cell_tag_is_fixed():
    w = make()
    w.store("c", "flag", True)
    with pytest.raises(EngineFault):
        w.store("c", "flag", 1)
    with pytest.raises(EngineFault):
        w.store("c", "balance", "alice")


def test_null_address_is_reserved():
    w = make()
    with pytest.raises(EngineFault):
        w.add_account(NULL_ADDRESS)
    with pytest.raises(EngineFault):
        w.transfer("a", NULL_ADDRESS, 1)


def test_plain_accounts_have_no_storage():
    w = make()
    with pytest.raises(EngineFault):
        w.store("a", "k", 1)


def test_canonical_json_sorted_and_hash_stable():
    w1 = WorldState()
    w1.add_account("b", 1)
    w1.add_account("a", 2)
    w2 = WorldState()
    w2.add_account("a", 2)
    w2.add_account("b", 1)
    assert w1.canonical() == w2.canonical()
    assert w1.hash() == w2.hash()
    doc = json.loads(w1.canonical())
    assert list(doc["accounts"]) == ["a", "b"]


def test_copy_is_independent():
    w = make()
    c = w.copy()
    c.store("c", "balance", 1)
    assert w.load("c", "balance") == 5
    assert c != w
