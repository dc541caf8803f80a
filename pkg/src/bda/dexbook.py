"""Escrow-based limit-order exchange for fungible tokens against tokenized cash.

Sellers list tokens at a unit price; listing moves the tokens into the
exchange's escrow account. A taker picks an order and fills any part of it;
cash and tokens settle atomically inside the fill transaction. There is no
matching engine and no fee: buyers choose orders directly.
"""

from __future__ import annotations

from bda.errors import (
    InsufficientBalance,
    InsufficientCash,
    NotSeller,
    NotWhitelisted,
    OrderClosed,
    Overfill,
)
from bda.state import ESCROW_ACCOUNT_ID, ApplyContext, State


def apply_place_order(state: State, ctx: ApplyContext, payload: dict) -> None:
    asset_id = payload["asset_id"]
    state.require_asset(asset_id)
    kind, amount = payload["kind"], payload["amount"]
    if state.balance(asset_id, kind, ctx.signer) < amount:
        raise InsufficientBalance(f"{kind} balance below {amount}")
    state.move_tokens(asset_id, kind, ctx.signer, ESCROW_ACCOUNT_ID, amount)
    state.data["orders"][ctx.tx_hash] = {
        "seller": ctx.signer,
        "asset_id": asset_id,
        "kind": kind,
        "unit_price": payload["unit_price"],
        "remaining": amount,
        "status": "open",
        "created_height": ctx.height,
        "fills": [],
    }


def apply_fill_order(state: State, ctx: ApplyContext, payload: dict) -> None:
    order = state.data["orders"].get(payload["order_id"])
    if order is None or order["status"] != "open":
        raise OrderClosed(payload["order_id"])
    amount = payload["amount"]
    if amount <= 0 or amount > order["remaining"]:
        raise Overfill(f"fill of {amount} against {order['remaining']} remaining")
    if order["kind"] == "ownership" and not state.is_whitelisted(ctx.signer):
        raise NotWhitelisted(ctx.signer)
    cost = amount * order["unit_price"]
    if state.cash_balance(ctx.signer) < cost:
        raise InsufficientCash(f"fill costs {cost}")
    state.debit_cash(ctx.signer, cost)
    state.credit_cash(order["seller"], cost)
    state.move_tokens(order["asset_id"], order["kind"], ESCROW_ACCOUNT_ID, ctx.signer, amount)
    order["remaining"] -= amount
    order["fills"].append(
        {"buyer": ctx.signer, "amount": amount, "cash": cost, "height": ctx.height}
    )
    if order["remaining"] == 0:
        order["status"] = "filled"


def apply_cancel_order(state: State, ctx: ApplyContext, payload: dict) -> None:
    order = state.data["orders"].get(payload["order_id"])
    if order is None or order["status"] != "open":
        raise OrderClosed(payload["order_id"])
    if order["seller"] != ctx.signer:
        raise NotSeller(ctx.signer)
    state.move_tokens(order["asset_id"], order["kind"], ESCROW_ACCOUNT_ID, ctx.signer, order["remaining"])
    order["remaining"] = 0
    order["status"] = "cancelled"


def open_orders(state: State, asset_id: str | None = None) -> list[tuple[str, dict]]:
    """Open orders sorted by order id for deterministic listings."""
    return sorted(
        (order_id, order)
        for order_id, order in state.data["orders"].items()
        if order["status"] == "open"
        and (asset_id is None or order["asset_id"] == asset_id)
    )


def escrow_by_book(state: State) -> dict[tuple[str, str], int]:
    """Sum of open-order remainders per (asset, kind); must equal escrow balances."""
    totals: dict[tuple[str, str], int] = {}
    for order in state.data["orders"].values():
        if order["status"] == "open":
            key = (order["asset_id"], order["kind"])
            totals[key] = totals.get(key, 0) + order["remaining"]
    return totals
