"""Accredited-expert key store and record certification.

The key store lives on the ledger and only admin-signed transactions mutate
it. Certification itself is an off-ledger act: an expert signs the content
hash of a record, timestamped and bound to one asset, producing a detached
signature that anyone can verify against the key store.
"""

from __future__ import annotations

from dataclasses import dataclass

from bda.assets import certification_signing_bytes
from bda.canonical import decode, encode
from bda.crypto import KeyPair, sha256, verify_signature
from bda.errors import (
    MalformedRecord,
    NotActive,
    NotActiveCertifier,
    NotAdmin,
    UnknownAccount,
)
from bda.records import parse_record
from bda.state import ApplyContext, State

VERDICT_VALID = "valid"
VERDICT_VALID_ISSUER_REVOKED = "valid_issuer_revoked"
VERDICT_INVALID = "invalid"


# --- ledger handlers ---------------------------------------------------------


def apply_register_certifier(state: State, ctx: ApplyContext, payload: dict) -> None:
    if not state.has_role(ctx.signer, "admin"):
        raise NotAdmin("key store updates require admin role")
    account_id = payload["certifier_account"]
    if state.account(account_id) is None:
        raise UnknownAccount(account_id)
    entry = state.data["certifiers"].get(account_id)
    if entry is None:
        state.data["certifiers"][account_id] = {
            "accreditation_tag": payload["accreditation_tag"],
            "active": True,
            "registered_height": ctx.height,
        }
    else:
        entry["accreditation_tag"] = payload["accreditation_tag"]
        entry["active"] = True


def apply_revoke_certifier(state: State, ctx: ApplyContext, payload: dict) -> None:
    if not state.has_role(ctx.signer, "admin"):
        raise NotAdmin("key store updates require admin role")
    entry = state.data["certifiers"].get(payload["certifier_account"])
    if entry is None or not entry["active"]:
        raise NotActive(payload["certifier_account"])
    entry["active"] = False


# --- off-ledger certification ---------------------------------------------------


@dataclass(frozen=True)
class Certification:
    """Detached, timestamped expert signature over one record for one asset."""

    record_content_hash: str
    certifier: str
    timestamp: int
    asset_id: str
    signature: str

    def to_dict(self) -> dict:
        return {
            "record_content_hash": self.record_content_hash,
            "certifier": self.certifier,
            "timestamp": self.timestamp,
            "asset_id": self.asset_id,
            "signature": self.signature,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Certification":
        return cls(
            record_content_hash=data["record_content_hash"],
            certifier=data["certifier"],
            timestamp=data["timestamp"],
            asset_id=data["asset_id"],
            signature=data["signature"],
        )

    def to_bytes(self) -> bytes:
        return encode(self.to_dict())

    @classmethod
    def from_bytes(cls, raw: bytes) -> "Certification":
        return cls.from_dict(decode(raw))


def certify_record(
    state: State,
    certifier_key: KeyPair,
    record_bytes: bytes,
    asset_id: str,
    timestamp: int,
) -> Certification:
    """Sign a record's content hash as an active accredited expert."""
    certifier = certifier_key.account_id.hex()
    entry = state.data["certifiers"].get(certifier)
    if entry is None or not entry["active"]:
        raise NotActiveCertifier(certifier)
    try:
        parse_record(record_bytes)
    except MalformedRecord:
        raise
    content_hash = sha256(record_bytes).hex()
    signature = certifier_key.sign(
        certification_signing_bytes(content_hash, timestamp, asset_id)
    )
    return Certification(
        record_content_hash=content_hash,
        certifier=certifier,
        timestamp=timestamp,
        asset_id=asset_id,
        signature=signature.hex(),
    )


def verify_record(state: State, record_bytes: bytes, certification: Certification) -> str:
    """Tri-state check of a record against a detached certification.

    Recomputes the content hash, resolves the signer's key through the
    on-ledger key store, and verifies the signature. A signature by a since-
    revoked expert still verifies but is flagged so consumers can apply their
    own trust policy.
    """
    if sha256(record_bytes).hex() != certification.record_content_hash:
        return VERDICT_INVALID
    entry = state.data["certifiers"].get(certification.certifier)
    account = state.account(certification.certifier)
    if entry is None or account is None:
        return VERDICT_INVALID
    message = certification_signing_bytes(
        certification.record_content_hash, certification.timestamp, certification.asset_id
    )
    try:
        ok = verify_signature(
            bytes.fromhex(account["public_key"]),
            bytes.fromhex(certification.signature),
            message,
        )
    except ValueError:
        return VERDICT_INVALID
    if not ok:
        return VERDICT_INVALID
    return VERDICT_VALID if entry["active"] else VERDICT_VALID_ISSUER_REVOKED
