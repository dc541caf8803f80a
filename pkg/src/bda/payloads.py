"""Transaction payload schemas and structural validation.

Payloads are plain dicts with a ``type`` tag so they canonically encode into
block files without any extra translation. Structural validity (field
presence, types, closed vocabularies, positivity) is enforced when a
transaction is submitted; semantic rules (balances, roles, whitelists) are
enforced when a block is sealed.
"""

from __future__ import annotations

import re
from typing import Any

from bda.errors import PayloadRejected

ROLES = frozenset({"owner", "consumer", "investor", "certifier", "tokenizer", "admin"})

CATEGORIES = frozenset(
    {"wiring", "plumbing", "materials_inventory", "temporary_works", "utility_history", "other"}
)

TOKEN_KINDS = frozenset({"ownership", "economic"})

PROPOSAL_ACTIONS = frozenset(
    {"set_license_fee", "set_datastore_pointer", "retire_asset", "set_audited"}
)

STATUS_ACTIVE = "active"
STATUS_RETIRED = "retired"
STATUS_RETAINED = "retained_historic"

_HEX32_RE = re.compile(r"^[0-9a-f]{64}$")
_HEX_RE = re.compile(r"^[0-9a-f]*$")


def _fail(message: str) -> None:
    raise PayloadRejected(message)


def _check_hex32(value: Any, field: str) -> str:
    if not isinstance(value, str) or not _HEX32_RE.match(value):
        _fail(f"{field} must be 64 lowercase hex characters")
    return value


def _check_hex(value: Any, field: str) -> str:
    if not isinstance(value, str) or len(value) % 2 or not _HEX_RE.match(value):
        _fail(f"{field} must be lowercase hex")
    return value


def _check_str(value: Any, field: str) -> str:
    if not isinstance(value, str):
        _fail(f"{field} must be a string")
    return value


def _check_int(value: Any, field: str, minimum: int | None = None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        _fail(f"{field} must be an integer")
    if minimum is not None and value < minimum:
        _fail(f"{field} must be >= {minimum}")
    return value


def _check_bool(value: Any, field: str) -> bool:
    if not isinstance(value, bool):
        _fail(f"{field} must be a boolean")
    return value


def _check_keys(payload: dict, required: set[str], context: str) -> None:
    keys = set(payload)
    missing = required - keys
    extra = keys - required
    if missing:
        _fail(f"{context} missing fields: {sorted(missing)}")
    if extra:
        _fail(f"{context} has unknown fields: {sorted(extra)}")


def validate_metadata(metadata: Any) -> dict:
    if not isinstance(metadata, dict):
        _fail("metadata must be a map")
    _check_keys(
        metadata,
        {"building_ref", "category", "jurisdiction", "keywords", "audited"},
        "metadata",
    )
    _check_str(metadata["building_ref"], "metadata.building_ref")
    if metadata["category"] not in CATEGORIES:
        _fail(f"metadata.category must be one of {sorted(CATEGORIES)}")
    _check_str(metadata["jurisdiction"], "metadata.jurisdiction")
    if not isinstance(metadata["keywords"], list) or not all(
        isinstance(k, str) for k in metadata["keywords"]
    ):
        _fail("metadata.keywords must be a list of strings")
    _check_bool(metadata["audited"], "metadata.audited")
    return metadata


def validate_pointer(pointer: Any, field: str = "pointer") -> dict:
    if not isinstance(pointer, dict):
        _fail(f"{field} must be a map")
    _check_keys(pointer, {"content_hash", "locator"}, field)
    _check_hex32(pointer["content_hash"], f"{field}.content_hash")
    _check_str(pointer["locator"], f"{field}.locator")
    return pointer


def validate_contract_terms(terms: Any) -> dict:
    if not isinstance(terms, dict):
        _fail("terms must be a map")
    _check_keys(
        terms,
        {
            "owner",
            "tokenizer",
            "metadata",
            "pointer",
            "license_fee",
            "ownership_supply",
            "economic_supply",
        },
        "terms",
    )
    _check_hex32(terms["owner"], "terms.owner")
    _check_hex32(terms["tokenizer"], "terms.tokenizer")
    validate_metadata(terms["metadata"])
    validate_pointer(terms["pointer"], "terms.pointer")
    _check_int(terms["license_fee"], "terms.license_fee")
    _check_int(terms["ownership_supply"], "terms.ownership_supply")
    _check_int(terms["economic_supply"], "terms.economic_supply")
    return terms


def validate_certification(cert: Any, field: str = "certification") -> dict:
    if not isinstance(cert, dict):
        _fail(f"{field} must be a map")
    _check_keys(
        cert,
        {"record_content_hash", "certifier", "timestamp", "asset_id", "signature"},
        field,
    )
    _check_hex32(cert["record_content_hash"], f"{field}.record_content_hash")
    _check_hex32(cert["certifier"], f"{field}.certifier")
    _check_int(cert["timestamp"], f"{field}.timestamp", minimum=0)
    _check_hex32(cert["asset_id"], f"{field}.asset_id")
    _check_hex(cert["signature"], f"{field}.signature")
    return cert


def _validate_register_account(p: dict) -> None:
    _check_keys(p, {"type", "public_key", "roles", "whitelisted"}, "register_account")
    _check_hex(p["public_key"], "public_key")
    if len(p["public_key"]) != 64:
        _fail("public_key must be 32 bytes of hex")
    if (
        not isinstance(p["roles"], list)
        or not p["roles"]
        or not set(p["roles"]) <= ROLES
        or len(set(p["roles"])) != len(p["roles"])
    ):
        _fail(f"roles must be a non-empty subset of {sorted(ROLES)}")
    _check_bool(p["whitelisted"], "whitelisted")


def _validate_faucet(p: dict) -> None:
    _check_keys(p, {"type", "account", "amount"}, "faucet")
    _check_hex32(p["account"], "account")
    _check_int(p["amount"], "amount", minimum=1)


def _validate_mint_asset(p: dict) -> None:
    _check_keys(p, {"type", "terms", "owner_signature", "tokenizer_signature"}, "mint_asset")
    validate_contract_terms(p["terms"])
    _check_hex(p["owner_signature"], "owner_signature")
    _check_hex(p["tokenizer_signature"], "tokenizer_signature")


def _validate_transfer_tokens(p: dict) -> None:
    _check_keys(p, {"type", "asset_id", "kind", "from", "to", "amount"}, "transfer_tokens")
    _check_hex32(p["asset_id"], "asset_id")
    if p["kind"] not in TOKEN_KINDS:
        _fail(f"kind must be one of {sorted(TOKEN_KINDS)}")
    _check_hex32(p["from"], "from")
    _check_hex32(p["to"], "to")
    _check_int(p["amount"], "amount", minimum=1)


def _validate_pay_license(p: dict) -> None:
    _check_keys(p, {"type", "asset_id", "amount"}, "pay_license")
    _check_hex32(p["asset_id"], "asset_id")
    _check_int(p["amount"], "amount", minimum=1)


def _validate_bind_license(p: dict) -> None:
    _check_keys(
        p,
        {"type", "asset_id", "payment_id", "consumer", "license_id", "content_hash"},
        "bind_license",
    )
    _check_hex32(p["asset_id"], "asset_id")
    _check_hex32(p["payment_id"], "payment_id")
    _check_hex32(p["consumer"], "consumer")
    _check_hex32(p["license_id"], "license_id")
    _check_hex32(p["content_hash"], "content_hash")


def _validate_vote(p: dict) -> None:
    _check_keys(p, {"type", "asset_id", "action", "parameter"}, "vote")
    _check_hex32(p["asset_id"], "asset_id")
    action = p["action"]
    if action not in PROPOSAL_ACTIONS:
        _fail(f"action must be one of {sorted(PROPOSAL_ACTIONS)}")
    parameter = p["parameter"]
    if action == "set_license_fee":
        _check_int(parameter, "parameter", minimum=1)
    elif action == "set_datastore_pointer":
        validate_pointer(parameter, "parameter")
    elif action in ("retire_asset", "set_audited"):
        _check_bool(parameter, "parameter")


def _validate_attach_certification(p: dict) -> None:
    _check_keys(p, {"type", "asset_id", "certification"}, "attach_certification")
    _check_hex32(p["asset_id"], "asset_id")
    validate_certification(p["certification"])


def _validate_register_certifier(p: dict) -> None:
    _check_keys(p, {"type", "certifier_account", "accreditation_tag"}, "register_certifier")
    _check_hex32(p["certifier_account"], "certifier_account")
    _check_str(p["accreditation_tag"], "accreditation_tag")


def _validate_revoke_certifier(p: dict) -> None:
    _check_keys(p, {"type", "certifier_account"}, "revoke_certifier")
    _check_hex32(p["certifier_account"], "certifier_account")


def _validate_place_order(p: dict) -> None:
    _check_keys(p, {"type", "asset_id", "kind", "amount", "unit_price"}, "place_order")
    _check_hex32(p["asset_id"], "asset_id")
    if p["kind"] not in TOKEN_KINDS:
        _fail(f"kind must be one of {sorted(TOKEN_KINDS)}")
    _check_int(p["amount"], "amount", minimum=1)
    _check_int(p["unit_price"], "unit_price", minimum=1)


def _validate_fill_order(p: dict) -> None:
    _check_keys(p, {"type", "order_id", "amount"}, "fill_order")
    _check_hex32(p["order_id"], "order_id")
    # amount 0 is structurally accepted so the fill rule can reject it as Overfill
    _check_int(p["amount"], "amount", minimum=0)


def _validate_cancel_order(p: dict) -> None:
    _check_keys(p, {"type", "order_id"}, "cancel_order")
    _check_hex32(p["order_id"], "order_id")


_VALIDATORS = {
    "register_account": _validate_register_account,
    "faucet": _validate_faucet,
    "mint_asset": _validate_mint_asset,
    "transfer_tokens": _validate_transfer_tokens,
    "pay_license": _validate_pay_license,
    "bind_license": _validate_bind_license,
    "vote": _validate_vote,
    "attach_certification": _validate_attach_certification,
    "register_certifier": _validate_register_certifier,
    "revoke_certifier": _validate_revoke_certifier,
    "place_order": _validate_place_order,
    "fill_order": _validate_fill_order,
    "cancel_order": _validate_cancel_order,
}

PAYLOAD_TYPES = frozenset(_VALIDATORS)


def validate_payload(payload: Any) -> dict:
    """Validate payload structure; raises PayloadRejected on any defect."""
    if not isinstance(payload, dict):
        _fail("payload must be a map")
    ptype = payload.get("type")
    validator = _VALIDATORS.get(ptype)
    if validator is None:
        _fail(f"unknown payload type {ptype!r}")
    validator(payload)
    return payload


# --- builders ----------------------------------------------------------------


def register_account(public_key: str, roles: list[str], whitelisted: bool) -> dict:
    return {
        "type": "register_account",
        "public_key": public_key,
        "roles": sorted(roles),
        "whitelisted": whitelisted,
    }


def faucet(account: str, amount: int) -> dict:
    return {"type": "faucet", "account": account, "amount": amount}


def mint_asset(terms: dict, owner_signature: str, tokenizer_signature: str) -> dict:
    return {
        "type": "mint_asset",
        "terms": terms,
        "owner_signature": owner_signature,
        "tokenizer_signature": tokenizer_signature,
    }


def transfer_tokens(asset_id: str, kind: str, from_: str, to: str, amount: int) -> dict:
    return {
        "type": "transfer_tokens",
        "asset_id": asset_id,
        "kind": kind,
        "from": from_,
        "to": to,
        "amount": amount,
    }


def pay_license(asset_id: str, amount: int) -> dict:
    return {"type": "pay_license", "asset_id": asset_id, "amount": amount}


def bind_license(
    asset_id: str, payment_id: str, consumer: str, license_id: str, content_hash: str
) -> dict:
    return {
        "type": "bind_license",
        "asset_id": asset_id,
        "payment_id": payment_id,
        "consumer": consumer,
        "license_id": license_id,
        "content_hash": content_hash,
    }


def vote(asset_id: str, action: str, parameter: Any) -> dict:
    return {"type": "vote", "asset_id": asset_id, "action": action, "parameter": parameter}


def attach_certification(asset_id: str, certification: dict) -> dict:
    return {"type": "attach_certification", "asset_id": asset_id, "certification": certification}


def register_certifier(certifier_account: str, accreditation_tag: str) -> dict:
    return {
        "type": "register_certifier",
        "certifier_account": certifier_account,
        "accreditation_tag": accreditation_tag,
    }


def revoke_certifier(certifier_account: str) -> dict:
    return {"type": "revoke_certifier", "certifier_account": certifier_account}


def place_order(asset_id: str, kind: str, amount: int, unit_price: int) -> dict:
    return {
        "type": "place_order",
        "asset_id": asset_id,
        "kind": kind,
        "amount": amount,
        "unit_price": unit_price,
    }


def fill_order(order_id: str, amount: int) -> dict:
    return {"type": "fill_order", "order_id": order_id, "amount": amount}


def cancel_order(order_id: str) -> dict:
    return {"type": "cancel_order", "order_id": order_id}
