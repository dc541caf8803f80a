"""Append-only, hash-chained, signature-verified transaction ledger.

A single writer seals pending transactions into blocks: each transaction is
applied all-or-nothing, rejected ones are recorded with their reason and
leave no trace in state, and the post-block state root is embedded in the
block. Every block file is canonical bytes; the hash of those exact bytes is
the next block's prev_hash, and a HEAD file pins the tip, so any single-byte
mutation of the store is detectable by replay.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from bda import accounts, assets, certifiers, dexbook
from bda.canonical import CanonicalError, decode, encode
from bda.crypto import (
    HASH_ALGORITHM,
    SIGNATURE_SCHEME,
    KeyPair,
    sha256,
    verify_signature,
)
from bda.errors import BadNonce, BadSignature, LedgerError, PayloadRejected, error_from_reason
from bda.payloads import ROLES, validate_payload
from bda.state import ApplyContext, State

GENESIS_PREV_HASH = "0" * 64

HANDLERS: dict[str, Callable[[State, ApplyContext, dict], None]] = {
    "register_account": accounts.apply_register_account,
    "faucet": accounts.apply_faucet,
    "mint_asset": assets.apply_mint_asset,
    "transfer_tokens": assets.apply_transfer_tokens,
    "pay_license": assets.apply_pay_license,
    "bind_license": assets.apply_bind_license,
    "vote": assets.apply_vote,
    "attach_certification": assets.apply_attach_certification,
    "register_certifier": certifiers.apply_register_certifier,
    "revoke_certifier": certifiers.apply_revoke_certifier,
    "place_order": dexbook.apply_place_order,
    "fill_order": dexbook.apply_fill_order,
    "cancel_order": dexbook.apply_cancel_order,
}


# --- transactions ------------------------------------------------------------


def tx_signing_bytes(chain_id: str, nonce: int, payload: dict, signer: str) -> bytes:
    return encode({"chain_id": chain_id, "nonce": nonce, "payload": payload, "signer": signer})


def tx_hash(tx: dict) -> str:
    return sha256(encode(tx)).hex()


def make_transaction(keypair: KeyPair, nonce: int, payload: dict, chain_id: str) -> dict:
    signer = keypair.account_id.hex()
    signature = keypair.sign(tx_signing_bytes(chain_id, nonce, payload, signer))
    return {
        "chain_id": chain_id,
        "nonce": nonce,
        "payload": payload,
        "signer": signer,
        "signature": signature.hex(),
    }


def _check_envelope(state: State, tx: dict, expected_nonce: int | None = None) -> None:
    if not isinstance(tx, dict) or set(tx) != {"chain_id", "nonce", "payload", "signer", "signature"}:
        raise PayloadRejected("malformed transaction envelope")
    if tx["chain_id"] != state.data["chain_id"]:
        raise BadSignature("transaction targets a different chain")
    account = state.account(tx["signer"])
    if account is None:
        raise BadSignature(f"unregistered signer {tx['signer']}")
    message = tx_signing_bytes(tx["chain_id"], tx["nonce"], tx["payload"], tx["signer"])
    try:
        ok = verify_signature(
            bytes.fromhex(account["public_key"]), bytes.fromhex(tx["signature"]), message
        )
    except ValueError:
        ok = False
    if not ok:
        raise BadSignature("signature does not verify")
    if expected_nonce is None:
        expected_nonce = account["nonce"] + 1
    if tx["nonce"] != expected_nonce:
        raise BadNonce(f"expected nonce {expected_nonce}, got {tx['nonce']}")


def apply_block_transactions(
    state: State, height: int, txs: list[dict], timestamp: int
) -> list[dict]:
    """Apply a block's transactions in order, all-or-nothing each.

    Mutates state; returns one outcome per transaction. This is the single
    transition procedure used both when sealing and when replaying, so a
    chain is valid exactly when replay reproduces its recorded outcomes and
    state roots.
    """
    assets.sweep_expired_proposals(state, height)
    outcomes: list[dict] = []
    for tx in txs:
        snapshot = state.clone()
        try:
            _check_envelope(state, tx)
            validate_payload(tx["payload"])
            state.require_account(tx["signer"])["nonce"] = tx["nonce"]
            ctx = ApplyContext(
                signer=tx["signer"], height=height, tx_hash=tx_hash(tx), timestamp=timestamp
            )
            HANDLERS[tx["payload"]["type"]](state, ctx, tx["payload"])
            outcomes.append({"status": "applied", "reason": None})
        except LedgerError as exc:
            state.data = snapshot.data
            outcomes.append({"status": "rejected", "reason": exc.reason()})
    return outcomes


# --- genesis ------------------------------------------------------------------


def make_genesis(
    chain_id: str,
    accounts_: list[dict],
    faucet_enabled: bool = False,
    proposal_ttl: int = 100,
) -> dict:
    """Build and sanity-check a genesis document."""
    if not chain_id:
        raise ValueError("chain_id must be non-empty")
    has_admin = False
    for entry in accounts_:
        roles = set(entry["roles"])
        if not roles or not roles <= ROLES:
            raise ValueError(f"genesis roles must be a non-empty subset of {sorted(ROLES)}")
        has_admin = has_admin or "admin" in roles
    if not has_admin:
        raise ValueError("genesis must declare at least one admin account")
    return {
        "chain_id": chain_id,
        "hash_algorithm": HASH_ALGORITHM,
        "signature_scheme": SIGNATURE_SCHEME,
        "faucet_enabled": faucet_enabled,
        "proposal_ttl": proposal_ttl,
        "accounts": [
            {
                "public_key": entry["public_key"],
                "roles": sorted(set(entry["roles"])),
                "whitelisted": bool(entry.get("whitelisted", False)),
                "cash": int(entry.get("cash", 0)),
            }
            for entry in accounts_
        ],
    }


# --- chain verification ---------------------------------------------------------


@dataclass
class BlockCheck:
    """Audit result for one block."""

    height: int
    linkage_ok: bool = True
    signatures_ok: bool = True
    state_root_ok: bool = True
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.linkage_ok and self.signatures_ok and self.state_root_ok


@dataclass
class VerificationReport:
    """Full-chain audit: per-block checks plus head consistency."""

    blocks: list[BlockCheck]
    head_ok: bool

    @property
    def ok(self) -> bool:
        return self.head_ok and all(b.ok for b in self.blocks)

    def first_bad_height(self) -> int | None:
        bad = [b.height for b in self.blocks if not b.ok]
        if bad:
            return min(bad)
        return len(self.blocks) - 1 if not self.head_ok and self.blocks else None

    def summary(self) -> str:
        if self.ok:
            return f"chain ok: {len(self.blocks)} blocks verified"
        lines = [f"chain INVALID (first bad block: {self.first_bad_height()})"]
        for check in self.blocks:
            if not check.ok:
                lines.append(
                    f"  block {check.height}: "
                    f"linkage={'ok' if check.linkage_ok else 'FAIL'} "
                    f"signatures={'ok' if check.signatures_ok else 'FAIL'} "
                    f"state_root={'ok' if check.state_root_ok else 'FAIL'} "
                    + ("; ".join(check.notes))
                )
        if not self.head_ok:
            lines.append("  head record does not match the tip block")
        return "\n".join(lines)


_BLOCK_FIELDS = {"height", "prev_hash", "timestamp", "txs", "outcomes", "state_root", "genesis"}


def _parse_block(raw: bytes) -> dict:
    block = decode(raw)
    if not isinstance(block, dict) or set(block) != _BLOCK_FIELDS:
        raise CanonicalError("block fields do not match the block schema")
    if (
        not isinstance(block["height"], int)
        or isinstance(block["height"], bool)
        or not isinstance(block["prev_hash"], str)
        or not isinstance(block["timestamp"], int)
        or not isinstance(block["txs"], list)
        or not isinstance(block["outcomes"], list)
        or not isinstance(block["state_root"], str)
        or not isinstance(block["genesis"], (dict, type(None)))
        or len(block["txs"]) != len(block["outcomes"])
    ):
        raise CanonicalError("block fields have the wrong types")
    return block


def verify_block_stream(blocks: list[bytes], head: dict | None) -> VerificationReport:
    """Replay a chain of raw block bytes and audit every link, signature, and root.

    A linkage mismatch between heights N and N+1 is attributed to block N:
    either block could be the tampered one, and reporting the earlier height
    keeps the finding at or before the corruption.
    """
    checks: list[BlockCheck] = []
    state: State | None = None
    prev_hash = GENESIS_PREV_HASH
    replay_broken = False
    for height, raw in enumerate(blocks):
        check = BlockCheck(height=height)
        checks.append(check)
        try:
            block = _parse_block(raw)
        except CanonicalError as exc:
            check.linkage_ok = check.signatures_ok = check.state_root_ok = False
            check.notes.append(f"unparseable block: {exc}")
            prev_hash = sha256(raw).hex()
            replay_broken = True
            continue
        if block["height"] != height:
            check.linkage_ok = False
            check.notes.append(f"height field {block['height']} at position {height}")
        if block["prev_hash"] != prev_hash:
            target = checks[height - 1] if height > 0 else check
            target.linkage_ok = False
            target.notes.append(f"hash link to block {height} broken")
        for index, tx in enumerate(block["txs"]):
            if not _tx_signature_ok(state, tx):
                check.signatures_ok = False
                check.notes.append(f"transaction {index} signature invalid")
        if replay_broken:
            check.state_root_ok = False
            check.notes.append("not replayed: earlier block unparseable")
        else:
            try:
                state = _replay_block(state, height, block, check)
            except (LedgerError, CanonicalError, KeyError, TypeError, ValueError) as exc:
                check.state_root_ok = False
                check.notes.append(f"replay failed: {exc}")
                replay_broken = True
        prev_hash = sha256(raw).hex()
    head_ok = bool(blocks)
    if head is not None and blocks:
        head_ok = head.get("height") == len(blocks) - 1 and head.get("hash") == prev_hash
    return VerificationReport(blocks=checks, head_ok=head_ok)


def _tx_signature_ok(state: State | None, tx: dict) -> bool:
    if state is None:
        return False
    try:
        account = state.account(tx["signer"])
        if account is None:
            return False
        message = tx_signing_bytes(tx["chain_id"], tx["nonce"], tx["payload"], tx["signer"])
        return verify_signature(
            bytes.fromhex(account["public_key"]), bytes.fromhex(tx["signature"]), message
        )
    except (KeyError, TypeError, ValueError, CanonicalError):
        return False


def _replay_block(state: State | None, height: int, block: dict, check: BlockCheck) -> State:
    if height == 0:
        if block["genesis"] is None:
            raise CanonicalError("genesis block missing its genesis document")
        state = State.from_genesis(block["genesis"])
        if block["txs"]:
            check.state_root_ok = False
            check.notes.append("genesis block must not carry transactions")
    else:
        if state is None:
            raise CanonicalError("no genesis state to replay from")
        outcomes = apply_block_transactions(state, height, block["txs"], block["timestamp"])
        if outcomes != block["outcomes"]:
            check.state_root_ok = False
            check.notes.append("replayed outcomes differ from recorded outcomes")
    if state.root() != block["state_root"]:
        check.state_root_ok = False
        check.notes.append("replayed state root differs from recorded state root")
    return state


# --- block store -----------------------------------------------------------------


def _block_filename(height: int) -> str:
    return f"block_{height:08d}.bin"


class BlockStore:
    """One canonical-bytes file per block plus a HEAD record of the tip."""

    def __init__(self, directory: str | Path | None):
        self.directory = Path(directory) if directory is not None else None
        self._blocks: list[bytes] = []
        self._head: dict | None = None
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)
            self._load()

    def _load(self) -> None:
        assert self.directory is not None
        paths = sorted(self.directory.glob("block_*.bin"))
        for height, path in enumerate(paths):
            if path.name != _block_filename(height):
                raise ValueError(f"block store has a gap or stray file at {path.name}")
            self._blocks.append(path.read_bytes())
        head_path = self.directory / "HEAD"
        if head_path.exists():
            self._head = decode(head_path.read_bytes())

    def append(self, raw: bytes, height: int) -> None:
        if height != len(self._blocks):
            raise ValueError(f"appending height {height} to store of {len(self._blocks)}")
        self._blocks.append(raw)
        self._head = {"height": height, "hash": sha256(raw).hex()}
        if self.directory is not None:
            path = self.directory / _block_filename(height)
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(raw)
            tmp.rename(path)
            head_tmp = self.directory / "HEAD.tmp"
            head_tmp.write_bytes(encode(self._head))
            head_tmp.rename(self.directory / "HEAD")

    def blocks(self) -> list[bytes]:
        return list(self._blocks)

    def head(self) -> dict | None:
        return dict(self._head) if self._head else None

    def __len__(self) -> int:
        return len(self._blocks)


def verify_chain_files(directory: str | Path) -> VerificationReport:
    """Audit a block store directory without trusting any of it."""
    directory = Path(directory)
    blocks: list[bytes] = []
    height = 0
    while (directory / _block_filename(height)).exists():
        blocks.append((directory / _block_filename(height)).read_bytes())
        height += 1
    head: dict | None = None
    head_path = directory / "HEAD"
    if head_path.exists():
        try:
            head = decode(head_path.read_bytes())
        except CanonicalError:
            head = {"height": -1, "hash": ""}
    return verify_block_stream(blocks, head)


# --- the ledger -------------------------------------------------------------------


class Ledger:
    """Single-writer ledger: concurrent-safe submission, sealed-state reads.

    Readers always observe the state as of the last sealed block; sealing
    works on a private copy and publishes it atomically.
    """

    def __init__(
        self,
        store: BlockStore,
        clock: Callable[[], int] | None = None,
    ):
        self._store = store
        self._clock = clock or (lambda: int(time.time()))
        self._lock = threading.RLock()
        self._pending: list[dict] = []
        self._pending_by_signer: dict[str, int] = {}
        self._sealed_state: State | None = None
        self._height = -1
        if len(store) == 0:
            raise ValueError("empty block store; create the chain with Ledger.create")
        self._replay_store()

    @classmethod
    def create(
        cls,
        genesis: dict,
        data_dir: str | Path | None = None,
        clock: Callable[[], int] | None = None,
    ) -> "Ledger":
        """Start a fresh chain by sealing the genesis block.

        The genesis document is embedded in block 0 (the authoritative copy,
        covered by the hash chain) and, on disk, also written out as
        genesis.json for humans.
        """
        store = BlockStore(Path(data_dir) / "blocks" if data_dir is not None else None)
        if len(store):
            raise ValueError("block store already initialized; use Ledger.open")
        clock = clock or (lambda: int(time.time()))
        state = State.from_genesis(genesis)
        block = {
            "height": 0,
            "prev_hash": GENESIS_PREV_HASH,
            "timestamp": clock(),
            "txs": [],
            "outcomes": [],
            "state_root": state.root(),
            "genesis": genesis,
        }
        store.append(encode(block), 0)
        if data_dir is not None:
            (Path(data_dir) / "genesis.json").write_text(
                json.dumps(genesis, indent=2, sort_keys=True) + "\n"
            )
        return cls(store, clock=clock)

    @classmethod
    def open(
        cls, data_dir: str | Path, clock: Callable[[], int] | None = None
    ) -> "Ledger":
        """Open an existing chain, replaying and checking every block."""
        return cls(BlockStore(Path(data_dir) / "blocks"), clock=clock)

    def _replay_store(self) -> None:
        state: State | None = None
        for height, raw in enumerate(self._store.blocks()):
            block = _parse_block(raw)
            if height == 0:
                state = State.from_genesis(block["genesis"])
            else:
                assert state is not None
                outcomes = apply_block_transactions(
                    state, height, block["txs"], block["timestamp"]
                )
                if outcomes != block["outcomes"]:
                    raise ValueError(f"block {height}: recorded outcomes do not replay")
            if state.root() != block["state_root"]:
                raise ValueError(f"block {height}: state root does not replay")
            self._height = height
        self._sealed_state = state

    # --- reads ------------------------------------------------------------

    @property
    def chain_id(self) -> str:
        return self.state.data["chain_id"]

    @property
    def state(self) -> State:
        """The sealed state; treat as read-only."""
        assert self._sealed_state is not None
        return self._sealed_state

    @property
    def height(self) -> int:
        return self._height

    def query_state(self, path: str) -> Any:
        return self.state.query(path)

    def state_root(self) -> str:
        return self.state.root()

    def blocks(self) -> list[bytes]:
        return self._store.blocks()

    def block(self, height: int) -> dict:
        return _parse_block(self._store.blocks()[height])

    def next_nonce(self, account_id: str) -> int:
        """The nonce the account's next transaction must carry (pending included)."""
        with self._lock:
            account = self.state.require_account(account_id)
            return account["nonce"] + self._pending_by_signer.get(account_id, 0) + 1

    # --- writes ------------------------------------------------------------

    def submit_transaction(self, tx: dict) -> str:
        """Enqueue a transaction after structural, signature, and nonce checks.

        Nonces are checked against the sealed nonce projected over pending
        transactions by the same signer, so a sequence of submissions between
        seals is accepted. Semantic rules are enforced at seal time.
        """
        with self._lock:
            validate_payload(tx.get("payload") if isinstance(tx, dict) else None)
            state = self.state
            account = state.account(tx["signer"]) if isinstance(tx, dict) and "signer" in tx else None
            expected = (
                account["nonce"] + self._pending_by_signer.get(tx["signer"], 0) + 1
                if account is not None
                else None
            )
            _check_envelope(state, tx, expected_nonce=expected)
            self._pending.append(tx)
            self._pending_by_signer[tx["signer"]] = (
                self._pending_by_signer.get(tx["signer"], 0) + 1
            )
            return tx_hash(tx)

    def enqueue(self, keypair: KeyPair, payload: dict) -> str:
        """Build, sign, and submit a transaction under the correct next nonce."""
        with self._lock:
            nonce = self.next_nonce(keypair.account_id.hex())
            tx = make_transaction(keypair, nonce, payload, self.chain_id)
            return self.submit_transaction(tx)

    def seal_block(self) -> dict:
        """Seal all pending transactions into the next block (may be empty)."""
        with self._lock:
            txs = self._pending
            self._pending = []
            self._pending_by_signer = {}
            height = self._height + 1
            working = self.state.clone()
            timestamp = int(self._clock())
            outcomes = apply_block_transactions(working, height, txs, timestamp)
            block = {
                "height": height,
                "prev_hash": sha256(self._store.blocks()[-1]).hex(),
                "timestamp": timestamp,
                "txs": txs,
                "outcomes": outcomes,
                "state_root": working.root(),
                "genesis": None,
            }
            self._store.append(encode(block), height)
            self._height = height
            self._sealed_state = working
            return block

    def transact(self, keypair: KeyPair, payload: dict) -> tuple[str, dict]:
        """Submit one transaction and seal immediately; raise if it was rejected.

        Convenience for synchronous drivers (CLI, gateway, scenarios); a
        seal-time rejection is re-raised as the originally recorded error.
        """
        with self._lock:
            txid = self.enqueue(keypair, payload)
            block = self.seal_block()
        for recorded, outcome in zip(block["txs"], block["outcomes"]):
            if tx_hash(recorded) == txid and outcome["status"] != "applied":
                raise error_from_reason(outcome["reason"])
        return txid, block

    # --- audit ---------------------------------------------------------------

    def verify_chain(self) -> VerificationReport:
        return verify_block_stream(self._store.blocks(), self._store.head())
