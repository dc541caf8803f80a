"""Payment-gated datastore: stores prescribed-format records off-ledger and
releases data only against verified on-ledger payments, issuing one license
per payment.

The gateway trusts nothing but sealed ledger state. A data request is
authenticated by the consumer's signature, checked against the asset's
payment log, and bound to a fresh license receipt through a ledger
transaction before any bytes leave the store; per-asset serialization makes
the check-then-bind step race-free.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from bda import payloads
from bda.assets import derive_license_id, verify_payment
from bda.canonical import decode, encode
from bda.crypto import KeyPair, sha256, verify_signature
from bda.errors import (
    AssetRetired,
    BadSignature,
    NotOwner,
    NoValidPayment,
    PayloadDeleted,
    StatusMismatch,
    UnknownAsset,
    UnknownLicense,
)
from bda.ledger import Ledger
from bda.records import BuildingDataRecord, parse_record


@dataclass(frozen=True)
class LicenseReceipt:
    """Proof that one payment bought the right to read one asset's data."""

    license_id: str
    asset_id: str
    consumer: str
    payment_id: str
    content_hash: str
    issued_height: int
    terms: str

    def to_dict(self) -> dict:
        return {
            "license_id": self.license_id,
            "asset_id": self.asset_id,
            "consumer": self.consumer,
            "payment_id": self.payment_id,
            "content_hash": self.content_hash,
            "issued_height": self.issued_height,
            "terms": self.terms,
        }


def request_signing_bytes(request: dict) -> bytes:
    """Canonical bytes a consumer signs to authenticate a gateway request."""
    return encode(request)


def sign_request(request: dict, key: KeyPair) -> str:
    return key.sign(request_signing_bytes(request)).hex()


class DatastoreGateway:
    """Content-addressed record store with payment-gated release."""

    def __init__(self, ledger: Ledger, service_key: KeyPair, root: str | Path | None = None):
        self.ledger = ledger
        self.service_key = service_key
        self.root = Path(root) if root is not None else None
        self._staging: dict[str, bytes] = {}
        self._records: dict[str, dict[str, bytes]] = {}
        self._versions: dict[str, list[str]] = {}
        self._tombstones: set[str] = set()
        self._asset_locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        if self.root is not None:
            self._load()

    # --- persistence ------------------------------------------------------

    def _load(self) -> None:
        assert self.root is not None
        staging_dir = self.root / "staging"
        if staging_dir.is_dir():
            for path in staging_dir.glob("*.rec"):
                self._staging[path.stem] = path.read_bytes()
        assets_dir = self.root / "assets"
        if assets_dir.is_dir():
            for asset_dir in assets_dir.iterdir():
                manifest_path = asset_dir / "manifest.bin"
                if not manifest_path.is_file():
                    continue
                manifest = decode(manifest_path.read_bytes())
                asset_id = asset_dir.name
                self._versions[asset_id] = list(manifest["versions"])
                if manifest["tombstone"]:
                    self._tombstones.add(asset_id)
                self._records[asset_id] = {
                    h: (asset_dir / f"{h}.rec").read_bytes()
                    for h in manifest["versions"]
                    if (asset_dir / f"{h}.rec").is_file()
                }

    def _persist_staging(self, content_hash: str) -> None:
        if self.root is None:
            return
        staging_dir = self.root / "staging"
        staging_dir.mkdir(parents=True, exist_ok=True)
        (staging_dir / f"{content_hash}.rec").write_bytes(self._staging[content_hash])

    def _persist_asset(self, asset_id: str) -> None:
        if self.root is None:
            return
        asset_dir = self.root / "assets" / asset_id
        asset_dir.mkdir(parents=True, exist_ok=True)
        for content_hash, raw in self._records.get(asset_id, {}).items():
            path = asset_dir / f"{content_hash}.rec"
            if not path.exists():
                path.write_bytes(raw)
        manifest = {
            "versions": self._versions.get(asset_id, []),
            "tombstone": asset_id in self._tombstones,
        }
        (asset_dir / "manifest.bin").write_bytes(encode(manifest))
        if asset_id in self._tombstones:
            for path in asset_dir.glob("*.rec"):
                path.unlink()

    def _lock_for(self, asset_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._asset_locks.setdefault(asset_id, threading.Lock())

    # --- storage operations ----------------------------------------------------

    def store_record(
        self, owner: str, record_bytes: bytes, asset_id: str | None = None
    ) -> str:
        """Persist a record under its content hash.

        With an asset id the signer must currently hold ownership tokens and
        the hash is appended to the asset's version history; without one the
        record goes to staging for a mint that has not happened yet.
        """
        record = parse_record(record_bytes)
        content_hash = record.content_hash()
        if asset_id is None:
            self._staging[content_hash] = record_bytes
            self._persist_staging(content_hash)
            return content_hash
        state = self.ledger.state
        asset = state.asset(asset_id)
        if asset is None:
            raise UnknownAsset(asset_id)
        if state.balance(asset_id, "ownership", owner) <= 0:
            raise NotOwner(owner)
        if asset_id in self._tombstones:
            raise StatusMismatch("asset payload was deleted")
        with self._lock_for(asset_id):
            records = self._records.setdefault(asset_id, {})
            versions = self._versions.setdefault(asset_id, [])
            records[content_hash] = record_bytes
            if content_hash not in versions:
                versions.append(content_hash)
            self._persist_asset(asset_id)
        return content_hash

    def _adopt_from_staging(self, asset_id: str, content_hash: str) -> None:
        if content_hash in self._staging:
            records = self._records.setdefault(asset_id, {})
            versions = self._versions.setdefault(asset_id, [])
            if content_hash not in records:
                records[content_hash] = self._staging[content_hash]
                if content_hash not in versions:
                    versions.append(content_hash)
                self._persist_asset(asset_id)

    def current_record(self, asset_id: str) -> BuildingDataRecord:
        """The record the asset's on-ledger pointer currently names."""
        asset = self.ledger.state.require_asset(asset_id)
        content_hash = asset["pointer"]["content_hash"]
        if asset_id in self._tombstones:
            raise PayloadDeleted(asset_id)
        self._adopt_from_staging(asset_id, content_hash)
        raw = self._records.get(asset_id, {}).get(content_hash)
        if raw is None:
            raise PayloadDeleted(f"no stored record for {content_hash}")
        return parse_record(raw)

    def version_history(self, asset_id: str) -> list[str]:
        return list(self._versions.get(asset_id, []))

    def has_payload(self, asset_id: str) -> bool:
        return asset_id not in self._tombstones and bool(self._records.get(asset_id))

    # --- gated release -----------------------------------------------------------

    def _authenticate(self, request: dict, signature: str) -> None:
        account = self.ledger.state.account(request.get("consumer", ""))
        if account is None:
            raise BadSignature("unknown consumer")
        try:
            ok = verify_signature(
                bytes.fromhex(account["public_key"]),
                bytes.fromhex(signature),
                request_signing_bytes(request),
            )
        except ValueError:
            ok = False
        if not ok:
            raise BadSignature("request signature does not verify")

    def request_data(
        self,
        consumer: str,
        asset_id: str,
        payment_id: str,
        signature: str,
        query: list[str] | None = None,
    ) -> tuple[dict[str, Any], LicenseReceipt]:
        """Release a data view against an unconsumed on-ledger payment.

        Consumes the payment by binding it to a fresh license receipt; the
        view is selected by optional top-level field selectors.
        """
        request = {
            "action": "request",
            "consumer": consumer,
            "asset_id": asset_id,
            "payment_id": payment_id,
            "query": query,
        }
        self._authenticate(request, signature)
        with self._lock_for(asset_id):
            state = self.ledger.state
            asset = state.asset(asset_id)
            if asset is None:
                raise UnknownAsset(asset_id)
            if asset["status"] == "retired":
                raise AssetRetired(asset_id)
            if payment_id not in verify_payment(state, asset_id, consumer):
                raise NoValidPayment(payment_id)
            record = self.current_record(asset_id)
            view = record.view(query)
            content_hash = asset["pointer"]["content_hash"]
            license_id = derive_license_id(payment_id)
            self.ledger.transact(
                self.service_key,
                payloads.bind_license(asset_id, payment_id, consumer, license_id, content_hash),
            )
            receipt = self.license(license_id)
            return view, receipt

    def read_with_license(self, consumer: str, license_id: str, signature: str) -> dict[str, Any]:
        """Re-read the current record version under an existing license."""
        request = {"action": "read", "consumer": consumer, "license_id": license_id}
        self._authenticate(request, signature)
        entry = self.ledger.state.data["licenses"].get(license_id)
        if entry is None or entry["consumer"] != consumer:
            raise UnknownLicense(license_id)
        asset = self.ledger.state.asset(entry["asset_id"])
        if asset is None or asset["status"] == "retired":
            raise PayloadDeleted(entry["asset_id"])
        record = self.current_record(entry["asset_id"])
        return record.to_dict()

    def license(self, license_id: str) -> LicenseReceipt:
        entry = self.ledger.state.data["licenses"].get(license_id)
        if entry is None:
            raise UnknownLicense(license_id)
        return LicenseReceipt(license_id=license_id, **entry)

    # --- lifecycle -----------------------------------------------------------------

    def delete_payload(self, asset_id: str) -> None:
        """Destroy payload bytes and history once the ledger shows retirement.

        Keeps a metadata tombstone for audit; deleting again succeeds.
        """
        asset = self.ledger.state.asset(asset_id)
        if asset is None:
            raise UnknownAsset(asset_id)
        if asset_id in self._tombstones:
            return
        if asset["status"] != "retired":
            raise StatusMismatch(f"asset status is {asset['status']}")
        self._records.pop(asset_id, None)
        self._versions[asset_id] = []
        self._tombstones.add(asset_id)
        self._persist_asset(asset_id)

    def sync(self) -> dict[str, int]:
        """Housekeeping against sealed state: adopt staged mints, delete retired."""
        adopted = 0
        deleted = 0
        for asset_id, asset in self.ledger.state.iter_assets():
            if asset["status"] == "retired":
                if asset_id not in self._tombstones:
                    self.delete_payload(asset_id)
                    deleted += 1
                continue
            pointer_hash = asset["pointer"]["content_hash"]
            if pointer_hash not in self._records.get(asset_id, {}):
                before = len(self._records.get(asset_id, {}))
                self._adopt_from_staging(asset_id, pointer_hash)
                if len(self._records.get(asset_id, {})) > before:
                    adopted += 1
        return {"adopted": adopted, "deleted": deleted}

    def pointer_integrity_findings(self) -> list[str]:
        """Audit: audited assets must store bytes hashing to their pointer."""
        findings = []
        for asset_id, asset in self.ledger.state.iter_assets():
            if not asset["metadata"]["audited"]:
                continue
            pointer_hash = asset["pointer"]["content_hash"]
            raw = self._records.get(asset_id, {}).get(pointer_hash)
            if raw is None:
                findings.append(f"{asset_id}: audited but record {pointer_hash} not stored")
            elif sha256(raw).hex() != pointer_hash:
                findings.append(f"{asset_id}: stored record does not hash to pointer")
        return findings
