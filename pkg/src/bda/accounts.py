"""Account registration and the test/genesis cash faucet."""

from __future__ import annotations

from bda.crypto import account_id_for_key
from bda.errors import DuplicateKey, NotAdmin, PayloadRejected, UnauthorizedWhitelist, UnknownAccount
from bda.state import ApplyContext, State


def apply_register_account(state: State, ctx: ApplyContext, payload: dict) -> None:
    """Create an account sponsored by an existing signer.

    Sponsorship (rather than self-signing) keeps the new account's nonce at
    zero. Granting whitelist status requires an admin sponsor.
    """
    public_key = payload["public_key"]
    account_id = account_id_for_key(bytes.fromhex(public_key)).hex()
    if state.account(account_id) is not None:
        raise DuplicateKey(account_id)
    if payload["whitelisted"] and not state.has_role(ctx.signer, "admin"):
        raise UnauthorizedWhitelist("whitelisted accounts require an admin sponsor")
    state.data["accounts"][account_id] = {
        "public_key": public_key,
        "roles": sorted(set(payload["roles"])),
        "whitelisted": payload["whitelisted"],
        "nonce": 0,
    }


def apply_faucet(state: State, ctx: ApplyContext, payload: dict) -> None:
    """Mint tokenized cash to an account; admin-only and gated by genesis."""
    if not state.data["faucet_enabled"]:
        raise PayloadRejected("faucet disabled for this chain")
    if not state.has_role(ctx.signer, "admin"):
        raise NotAdmin("faucet requires admin role")
    account = payload["account"]
    if state.account(account) is None:
        raise UnknownAccount(account)
    state.credit_cash(account, payload["amount"])
    state.data["cash_minted"] += payload["amount"]
