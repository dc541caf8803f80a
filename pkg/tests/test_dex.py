"""Escrow exchange: listing, atomic fills, cancellation, and its invariants."""

import pytest

from bda import payloads
from bda.dexbook import escrow_by_book, open_orders
from bda.errors import (
    InsufficientBalance,
    InsufficientCash,
    NotSeller,
    NotWhitelisted,
    OrderClosed,
    Overfill,
)
from bda.state import ESCROW_ACCOUNT_ID

from conftest import assert_conservation, assert_whitelist_closure


def place(world, asset_id, seller="owner1", kind="economic", amount=100_000, price=2) -> str:
    order_id, _ = world.ledger.transact(
        world[seller].key, payloads.place_order(asset_id, kind, amount, price)
    )
    return order_id


class TestPlace:
    def test_tokens_move_to_escrow(self, minted):
        world, asset_id = minted
        place(world, asset_id)
        assert world.balance(asset_id, "economic", "owner1") == 900_000
        assert world.ledger.state.balance(asset_id, "economic", ESCROW_ACCOUNT_ID) == 100_000
        assert_conservation(world.ledger.state)

    def test_amount_beyond_balance_rejected(self, minted):
        world, asset_id = minted
        with pytest.raises(InsufficientBalance):
            place(world, asset_id, amount=1_000_001)

    def test_two_orders_within_balance_both_open(self, minted):
        world, asset_id = minted
        place(world, asset_id, amount=600_000)
        place(world, asset_id, amount=400_000)
        assert len(open_orders(world.ledger.state, asset_id)) == 2
        assert world.balance(asset_id, "economic", "owner1") == 0


class TestFill:
    def test_partial_fill_settles_atomically(self, minted):
        world, asset_id = minted
        order_id = place(world, asset_id)  # 100_000 @ 2
        seller_cash = world.cash("owner1")
        buyer_cash = world.cash("investor1")
        world.ledger.transact(world["investor1"].key, payloads.fill_order(order_id, 40_000))
        order = world.ledger.state.data["orders"][order_id]
        assert order["remaining"] == 60_000
        assert order["status"] == "open"
        assert world.cash("investor1") == buyer_cash - 80_000
        assert world.cash("owner1") == seller_cash + 80_000
        assert world.balance(asset_id, "economic", "investor1") == 40_000
        assert world.ledger.state.balance(asset_id, "economic", ESCROW_ACCOUNT_ID) == 60_000
        assert_conservation(world.ledger.state)

    def test_full_fill_closes_order(self, minted):
        world, asset_id = minted
        order_id = place(world, asset_id, amount=1_000, price=1)
        world.ledger.transact(world["investor1"].key, payloads.fill_order(order_id, 1_000))
        assert world.ledger.state.data["orders"][order_id]["status"] == "filled"
        with pytest.raises(OrderClosed):
            world.ledger.transact(world["investor1"].key, payloads.fill_order(order_id, 1))

    def test_ownership_fill_requires_whitelist(self, minted):
        world, asset_id = minted
        order_id = place(world, asset_id, kind="ownership", amount=10_000, price=1)
        with pytest.raises(NotWhitelisted):
            world.ledger.transact(world["investor1"].key, payloads.fill_order(order_id, 10_000))
        world.ledger.transact(world["owner2"].key, payloads.fill_order(order_id, 10_000))
        assert world.balance(asset_id, "ownership", "owner2") == 10_000
        assert_whitelist_closure(world.ledger.state)

    def test_zero_and_overfill_rejected(self, minted):
        world, asset_id = minted
        order_id = place(world, asset_id, amount=5_000)
        with pytest.raises(Overfill):
            world.ledger.transact(world["investor1"].key, payloads.fill_order(order_id, 0))
        with pytest.raises(Overfill):
            world.ledger.transact(world["investor1"].key, payloads.fill_order(order_id, 5_001))

    def test_insufficient_cash_rejected(self, minted):
        world, asset_id = minted
        order_id = place(world, asset_id, amount=900_000, price=1000)
        with pytest.raises(InsufficientCash):
            world.ledger.transact(world["investor1"].key, payloads.fill_order(order_id, 900_000))


class TestCancel:
    def test_cancel_returns_escrow(self, minted):
        world, asset_id = minted
        order_id = place(world, asset_id)
        world.ledger.transact(world["investor1"].key, payloads.fill_order(order_id, 40_000))
        world.ledger.transact(world["owner1"].key, payloads.cancel_order(order_id))
        assert world.balance(asset_id, "economic", "owner1") == 960_000
        assert world.ledger.state.balance(asset_id, "economic", ESCROW_ACCOUNT_ID) == 0
        assert world.ledger.state.data["orders"][order_id]["status"] == "cancelled"

    def test_stranger_cannot_cancel(self, minted):
        world, asset_id = minted
        order_id = place(world, asset_id)
        with pytest.raises(NotSeller):
            world.ledger.transact(world["investor1"].key, payloads.cancel_order(order_id))

    def test_cancel_twice_rejected(self, minted):
        world, asset_id = minted
        order_id = place(world, asset_id)
        world.ledger.transact(world["owner1"].key, payloads.cancel_order(order_id))
        with pytest.raises(OrderClosed):
            world.ledger.transact(world["owner1"].key, payloads.cancel_order(order_id))

    def test_unknown_order_reports_closed(self, minted):
        world, _ = minted
        with pytest.raises(OrderClosed):
            world.ledger.transact(world["owner1"].key, payloads.cancel_order("00" * 32))


class TestEscrowSoundness:
    def test_direct_transfer_to_escrow_rejected(self, minted):
        from bda import payloads as p
        from bda.errors import PayloadRejected

        world, asset_id = minted
        with pytest.raises(PayloadRejected):
            world.ledger.transact(
                world["owner1"].key,
                p.transfer_tokens(
                    asset_id, "economic", world["owner1"].account_id, ESCROW_ACCOUNT_ID, 5
                ),
            )


    def test_open_order_totals_match_escrow_balance(self, minted):
        world, asset_id = minted
        place(world, asset_id, amount=300_000, price=1)
        ownership_order = place(world, asset_id, kind="ownership", amount=50_000, price=3)
        economic_order = place(world, asset_id, amount=200_000, price=2)
        world.ledger.transact(world["owner2"].key, payloads.fill_order(ownership_order, 20_000))
        world.ledger.transact(world["investor1"].key, payloads.fill_order(economic_order, 150_000))
        world.ledger.transact(world["owner1"].key, payloads.cancel_order(economic_order))
        state = world.ledger.state
        for (aid, kind), total in escrow_by_book(state).items():
            assert state.balance(aid, kind, ESCROW_ACCOUNT_ID) == total
        for kind in ("ownership", "economic"):
            booked = escrow_by_book(state).get((asset_id, kind), 0)
            assert state.balance(asset_id, kind, ESCROW_ACCOUNT_ID) == booked
        assert_conservation(state)
        assert_whitelist_closure(state)
