"""Ledger state: one nested, canonically hashable document plus typed accessors.

The whole state is a plain dict of JSON-able values (ids are lowercase hex
strings) so that the per-block state root is simply the hash of its canonical
encoding, cloning is cheap, and replay comparisons are byte-exact. Block
height deliberately lives outside this document: sealing an empty block must
not change the state root.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator

from bda.canonical import encode
from bda.crypto import NULL_PUBLIC_KEY, account_id_for_key, sha256
from bda.errors import UnknownAccount, UnknownAsset, UnknownPath


@dataclass(frozen=True)
class ApplyContext:
    """Per-transaction facts handed to state-transition handlers."""

    signer: str
    height: int
    tx_hash: str
    timestamp: int

# System account holding exchange escrow. Its public key is the reserved
# unsignable all-zero key, so it can never author a transaction; it exists as
# a balance-table row so conservation and whitelist checks stay uniform.
ESCROW_ACCOUNT_ID = account_id_for_key(NULL_PUBLIC_KEY).hex()

DEFAULT_PROPOSAL_TTL = 100


def _clone_value(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _clone_value(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_clone_value(v) for v in value]
    return value


class State:
    """Mutable ledger state with canonical-root and path-query support."""

    def __init__(self, data: dict[str, Any]):
        self.data = data

    @classmethod
    def from_genesis(cls, genesis: dict[str, Any]) -> "State":
        """Build the initial state declared by a genesis document."""
        data: dict[str, Any] = {
            "chain_id": genesis["chain_id"],
            "faucet_enabled": bool(genesis.get("faucet_enabled", False)),
            "proposal_ttl": int(genesis.get("proposal_ttl", DEFAULT_PROPOSAL_TTL)),
            "accounts": {},
            "cash": {},
            "cash_minted": 0,
            "assets": {},
            "orders": {},
            "certifiers": {},
            "contracts": {},
            "licenses": {},
        }
        state = cls(data)
        state._add_account(
            public_key=NULL_PUBLIC_KEY.hex(),
            roles=["admin"],
            whitelisted=True,
        )
        for entry in genesis.get("accounts", []):
            account_id = state._add_account(
                public_key=entry["public_key"],
                roles=list(entry["roles"]),
                whitelisted=bool(entry.get("whitelisted", False)),
            )
            cash = int(entry.get("cash", 0))
            if cash:
                data["cash"][account_id] = cash
                data["cash_minted"] += cash
        return state

    def _add_account(self, public_key: str, roles: list[str], whitelisted: bool) -> str:
        account_id = account_id_for_key(bytes.fromhex(public_key)).hex()
        if account_id in self.data["accounts"]:
            raise ValueError(f"duplicate genesis account {account_id}")
        self.data["accounts"][account_id] = {
            "public_key": public_key,
            "roles": sorted(set(roles)),
            "whitelisted": whitelisted,
            "nonce": 0,
        }
        return account_id

    def clone(self) -> "State":
        return State(_clone_value(self.data))

    def root(self) -> str:
        return sha256(encode(self.data)).hex()

    # --- accounts -------------------------------------------------------

    def account(self, account_id: str) -> dict | None:
        return self.data["accounts"].get(account_id)

    def require_account(self, account_id: str) -> dict:
        account = self.account(account_id)
        if account is None:
            raise UnknownAccount(account_id)
        return account

    def has_role(self, account_id: str, role: str) -> bool:
        account = self.account(account_id)
        return account is not None and role in account["roles"]

    def is_whitelisted(self, account_id: str) -> bool:
        account = self.account(account_id)
        return account is not None and account["whitelisted"]

    # --- cash -----------------------------------------------------------

    def cash_balance(self, account_id: str) -> int:
        return self.data["cash"].get(account_id, 0)

    def credit_cash(self, account_id: str, amount: int) -> None:
        if amount == 0:
            return
        self.data["cash"][account_id] = self.cash_balance(account_id) + amount

    def debit_cash(self, account_id: str, amount: int) -> None:
        balance = self.cash_balance(account_id)
        if balance < amount:
            raise ValueError("cash underflow")
        remaining = balance - amount
        if remaining:
            self.data["cash"][account_id] = remaining
        else:
            self.data["cash"].pop(account_id, None)

    def total_cash(self) -> int:
        return sum(self.data["cash"].values())

    # --- assets and token tables ------------------------------------------

    def asset(self, asset_id: str) -> dict | None:
        return self.data["assets"].get(asset_id)

    def require_asset(self, asset_id: str) -> dict:
        asset = self.asset(asset_id)
        if asset is None:
            raise UnknownAsset(asset_id)
        return asset

    def iter_assets(self) -> Iterator[tuple[str, dict]]:
        return iter(self.data["assets"].items())

    def table(self, asset_id: str, kind: str) -> dict:
        return self.require_asset(asset_id)[kind]

    def balance(self, asset_id: str, kind: str, account_id: str) -> int:
        return self.table(asset_id, kind)["balances"].get(account_id, 0)

    def move_tokens(self, asset_id: str, kind: str, from_: str, to: str, amount: int) -> None:
        """Unchecked balance move; callers enforce the transfer rules."""
        balances = self.table(asset_id, kind)["balances"]
        available = balances.get(from_, 0)
        if available < amount:
            raise ValueError("token underflow")
        remaining = available - amount
        if remaining:
            balances[from_] = remaining
        else:
            balances.pop(from_, None)
        balances[to] = balances.get(to, 0) + amount

    # --- path queries -----------------------------------------------------

    # Leaves under these roots default to 0 when the enclosing map exists but
    # the key does not (e.g. a registered account that was never funded).
    _ZERO_DEFAULT_ROOTS = ("cash",)

    def query(self, path: str) -> Any:
        """Read a state cell by slash-separated path.

        Missing leaves inside an existing map read as 0 for balance-like cells
        and None for record-like cells; a path that never names a defined cell
        raises UnknownPath.
        """
        parts = [p for p in path.split("/") if p]
        if not parts or parts[0] not in self.data:
            raise UnknownPath(path)
        node: Any = self.data
        for depth, part in enumerate(parts):
            if not isinstance(node, dict):
                raise UnknownPath(path)
            if part in node:
                node = node[part]
                continue
            # missing leaf of a terminal map reads as a default
            if depth == len(parts) - 1:
                if parts[0] in self._ZERO_DEFAULT_ROOTS or part == "balances" or (
                    depth > 0 and parts[depth - 1] == "balances"
                ):
                    return 0
                return None
            raise UnknownPath(path)
        return node
