"""Data-asset contracts: minting, token transfers, license payments with
dividend distribution, majority governance, certification attachment, and
license binding.

Every mutation here is a transaction handler invoked by the ledger's single
writer; handlers validate everything before touching state so a raised error
leaves nothing half-applied.
"""

from __future__ import annotations

from bda.canonical import encode
from bda.crypto import sha256, verify_signature
from bda.distribution import distribute_payment
from bda.errors import (
    AlreadyRetired,
    AssetRetired,
    BadConsent,
    BadSupply,
    DuplicateContract,
    InsufficientBalance,
    InsufficientCash,
    NoValidPayment,
    NotAdmin,
    NotActiveCertifier,
    NotOwnershipHolder,
    NotSigner,
    NotTokenizer,
    NotWhitelisted,
    OwnerNotWhitelisted,
    PayloadRejected,
    ProposalExpired,
    UnknownAsset,
    WrongAmount,
)
from bda.state import ESCROW_ACCOUNT_ID, ApplyContext, State

DEFAULT_SUPPLY = 1_000_000

LICENSE_TERMS = "use-only, no resale"


def terms_signing_bytes(terms: dict) -> bytes:
    """Canonical bytes both contract parties sign."""
    return encode(terms)


def terms_hash(terms: dict) -> str:
    return sha256(terms_signing_bytes(terms)).hex()


def certification_signing_bytes(record_content_hash: str, timestamp: int, asset_id: str) -> bytes:
    return encode(
        {
            "asset_id": asset_id,
            "record_content_hash": record_content_hash,
            "timestamp": timestamp,
        }
    )


def derive_license_id(payment_id: str) -> str:
    return sha256(encode({"payment_id": payment_id, "purpose": "license"})).hex()


def proposal_key(asset_id: str, action: str, parameter) -> str:
    return sha256(
        encode({"action": action, "asset_id": asset_id, "parameter": parameter})
    ).hex()


# --- handlers ------------------------------------------------------------


def apply_mint_asset(state: State, ctx: ApplyContext, payload: dict) -> None:
    """Create an asset contract from dual-signed terms; all tokens go to the owner."""
    terms = payload["terms"]
    if not state.has_role(ctx.signer, "tokenizer"):
        raise NotTokenizer(ctx.signer)
    if terms["tokenizer"] != ctx.signer:
        raise NotTokenizer("signer is not the contracted tokenizer")
    owner = terms["owner"]
    if not state.is_whitelisted(owner):
        raise OwnerNotWhitelisted(owner)
    if terms["ownership_supply"] <= 0 or terms["economic_supply"] <= 0:
        raise BadSupply("token supplies must be positive")
    if terms["license_fee"] <= 0:
        raise BadSupply("license fee must be positive")
    if terms["metadata"]["audited"]:
        raise PayloadRejected("assets mint unaudited; certification comes later")
    _verify_consent(state, terms, payload["owner_signature"], payload["tokenizer_signature"])
    thash = terms_hash(terms)
    if thash in state.data["contracts"]:
        raise DuplicateContract(thash)
    asset_id = ctx.tx_hash
    if asset_id in state.data["assets"]:
        raise PayloadRejected("asset id collision")
    state.data["assets"][asset_id] = {
        "metadata": {
            "building_ref": terms["metadata"]["building_ref"],
            "category": terms["metadata"]["category"],
            "jurisdiction": terms["metadata"]["jurisdiction"],
            "keywords": list(terms["metadata"]["keywords"]),
            "audited": False,
        },
        "pointer": dict(terms["pointer"]),
        "license_fee": terms["license_fee"],
        "status": "active",
        "ownership": {
            "total_supply": terms["ownership_supply"],
            "balances": {owner: terms["ownership_supply"]},
        },
        "economic": {
            "total_supply": terms["economic_supply"],
            "balances": {owner: terms["economic_supply"]},
        },
        "payments": {},
        "certifications": [],
        "proposals": {},
    }
    state.data["contracts"][thash] = asset_id


def _verify_consent(state: State, terms: dict, owner_sig: str, tokenizer_sig: str) -> None:
    message = terms_signing_bytes(terms)
    owner = state.account(terms["owner"])
    tokenizer = state.account(terms["tokenizer"])
    if owner is None or not verify_signature(
        bytes.fromhex(owner["public_key"]), bytes.fromhex(owner_sig), message
    ):
        raise BadConsent("owner signature does not verify")
    if tokenizer is None or not verify_signature(
        bytes.fromhex(tokenizer["public_key"]), bytes.fromhex(tokenizer_sig), message
    ):
        raise BadConsent("tokenizer signature does not verify")


def apply_transfer_tokens(state: State, ctx: ApplyContext, payload: dict) -> None:
    asset_id = payload["asset_id"]
    state.require_asset(asset_id)
    if payload["from"] != ctx.signer:
        raise NotSigner("only the holder may move their tokens")
    recipient = payload["to"]
    if recipient == ESCROW_ACCOUNT_ID:
        raise PayloadRejected("escrow holds exchange deposits only; place an order instead")
    if state.account(recipient) is None:
        raise PayloadRejected(f"unregistered recipient {recipient}")
    kind, amount = payload["kind"], payload["amount"]
    if state.balance(asset_id, kind, ctx.signer) < amount:
        raise InsufficientBalance(f"{kind} balance below {amount}")
    if kind == "ownership" and not state.is_whitelisted(recipient):
        raise NotWhitelisted(recipient)
    state.move_tokens(asset_id, kind, ctx.signer, recipient, amount)


def beneficial_balances(state: State, asset_id: str, kind: str) -> dict[str, int]:
    """Holdings used for dividend snapshots.

    Tokens sitting in exchange escrow still earn for their seller until the
    moment they are sold, so escrow's row is folded back into the sellers'
    rows according to the open orders.
    """
    balances = dict(state.table(asset_id, kind)["balances"])
    escrowed = balances.pop(ESCROW_ACCOUNT_ID, 0)
    if escrowed:
        for order in state.data["orders"].values():
            if (
                order["status"] == "open"
                and order["asset_id"] == asset_id
                and order["kind"] == kind
            ):
                seller = order["seller"]
                balances[seller] = balances.get(seller, 0) + order["remaining"]
    return balances


def apply_pay_license(state: State, ctx: ApplyContext, payload: dict) -> None:
    """Accept a license payment and distribute every unit as dividends."""
    asset_id = payload["asset_id"]
    asset = state.require_asset(asset_id)
    if asset["status"] == "retired":
        raise AssetRetired(asset_id)
    amount = payload["amount"]
    if amount != asset["license_fee"]:
        raise WrongAmount(f"license fee is {asset['license_fee']}")
    if state.cash_balance(ctx.signer) < amount:
        raise InsufficientCash(f"payment requires {amount}")
    payment_id = ctx.tx_hash
    if payment_id in asset["payments"]:
        raise PayloadRejected("payment id collision")
    payouts = distribute_payment(
        amount,
        beneficial_balances(state, asset_id, "economic"),
        beneficial_balances(state, asset_id, "ownership"),
    )
    state.debit_cash(ctx.signer, amount)
    for payout in payouts:
        state.credit_cash(payout.account, payout.amount)
    asset["payments"][payment_id] = {
        "payer": ctx.signer,
        "amount": amount,
        "height": ctx.height,
        "payouts": [
            {"account": p.account, "kind": p.kind, "amount": p.amount} for p in payouts
        ],
        "license_id": None,
    }


def apply_vote(state: State, ctx: ApplyContext, payload: dict) -> None:
    """Create-or-join a proposal; executes the moment weight passes majority.

    Vote weight is the voter's ownership balance at vote time; execution
    requires the combined weight of distinct voters to exceed half the
    ownership supply.
    """
    asset_id = payload["asset_id"]
    asset = state.require_asset(asset_id)
    action, parameter = payload["action"], payload["parameter"]
    weight = state.balance(asset_id, "ownership", ctx.signer)
    if weight <= 0:
        raise NotOwnershipHolder(ctx.signer)
    if action == "retire_asset" and asset["status"] != "active":
        raise AlreadyRetired(asset_id)
    key = proposal_key(asset_id, action, parameter)
    proposal = asset["proposals"].get(key)
    if proposal is not None and ctx.height > proposal["deadline_height"]:
        # normally unreachable through the ledger: expired proposals are swept
        # at the start of the first block past their deadline
        raise ProposalExpired(key)
    if proposal is None:
        proposal = {
            "action": action,
            "parameter": parameter,
            "votes": {},
            "created_height": ctx.height,
            "deadline_height": ctx.height + state.data["proposal_ttl"],
        }
        asset["proposals"][key] = proposal
    proposal["votes"][ctx.signer] = weight
    total = asset["ownership"]["total_supply"]
    if 2 * sum(proposal["votes"].values()) > total:
        _execute_proposal(state, ctx, asset_id, action, parameter)
        asset["proposals"].pop(key, None)


def _execute_proposal(state: State, ctx: ApplyContext, asset_id: str, action: str, parameter) -> None:
    asset = state.require_asset(asset_id)
    if action == "retire_asset":
        if asset["status"] != "active":
            raise AlreadyRetired(asset_id)
        asset["status"] = "retained_historic" if parameter else "retired"
        return
    if asset["status"] == "retired":
        raise PayloadRejected("asset retired; governance closed")
    if action == "set_license_fee":
        asset["license_fee"] = parameter
    elif action == "set_datastore_pointer":
        asset["pointer"] = dict(parameter)
        asset["metadata"]["audited"] = False
    elif action == "set_audited":
        if parameter and not _has_matching_certification(asset):
            raise PayloadRejected("no certification on file for the current record version")
        asset["metadata"]["audited"] = bool(parameter)
    else:  # pragma: no cover - vocabulary enforced at submit
        raise PayloadRejected(f"unknown proposal action {action}")


def _has_matching_certification(asset: dict) -> bool:
    current = asset["pointer"]["content_hash"]
    return any(c["record_content_hash"] == current for c in asset["certifications"])


def sweep_expired_proposals(state: State, height: int) -> None:
    """Deterministic start-of-block housekeeping: drop proposals past deadline."""
    for _, asset in state.iter_assets():
        proposals = asset["proposals"]
        expired = [k for k, p in proposals.items() if p["deadline_height"] < height]
        for key in expired:
            del proposals[key]


def apply_attach_certification(state: State, ctx: ApplyContext, payload: dict) -> None:
    """File an expert's detached signature against the asset's current record."""
    asset_id = payload["asset_id"]
    asset = state.require_asset(asset_id)
    if state.balance(asset_id, "ownership", ctx.signer) <= 0:
        raise NotOwnershipHolder(ctx.signer)
    cert = payload["certification"]
    if cert["asset_id"] != asset_id:
        raise PayloadRejected("certification names a different asset")
    entry = state.data["certifiers"].get(cert["certifier"])
    if entry is None or not entry["active"]:
        raise NotActiveCertifier(cert["certifier"])
    certifier_account = state.require_account(cert["certifier"])
    message = certification_signing_bytes(
        cert["record_content_hash"], cert["timestamp"], cert["asset_id"]
    )
    if not verify_signature(
        bytes.fromhex(certifier_account["public_key"]),
        bytes.fromhex(cert["signature"]),
        message,
    ):
        raise PayloadRejected("certification signature does not verify")
    if cert["record_content_hash"] != asset["pointer"]["content_hash"]:
        raise PayloadRejected("certification does not match the current record version")
    if cert not in asset["certifications"]:
        asset["certifications"].append(dict(cert))


def apply_bind_license(state: State, ctx: ApplyContext, payload: dict) -> None:
    """Bind one unconsumed payment to one license receipt (gateway-submitted)."""
    if not state.has_role(ctx.signer, "admin"):
        raise NotAdmin("license binding is submitted by the gateway operator")
    asset_id = payload["asset_id"]
    asset = state.require_asset(asset_id)
    if asset["status"] == "retired":
        raise AssetRetired(asset_id)
    payment = asset["payments"].get(payload["payment_id"])
    if payment is None or payment["payer"] != payload["consumer"]:
        raise NoValidPayment(payload["payment_id"])
    if payment["license_id"] is not None:
        raise NoValidPayment("payment already bound to a license")
    license_id = derive_license_id(payload["payment_id"])
    if payload["license_id"] != license_id:
        raise PayloadRejected("license id must derive from the payment id")
    if payload["content_hash"] != asset["pointer"]["content_hash"]:
        raise PayloadRejected("receipt must name the current record version")
    payment["license_id"] = license_id
    state.data["licenses"][license_id] = {
        "asset_id": asset_id,
        "consumer": payload["consumer"],
        "payment_id": payload["payment_id"],
        "content_hash": payload["content_hash"],
        "issued_height": ctx.height,
        "terms": LICENSE_TERMS,
    }


# --- read-only queries ------------------------------------------------------


def verify_payment(state: State, asset_id: str, consumer: str) -> list[str]:
    """Payment ids by the consumer for the asset not yet bound to a license."""
    asset = state.asset(asset_id)
    if asset is None:
        raise UnknownAsset(asset_id)
    unconsumed = [
        (record["height"], payment_id)
        for payment_id, record in asset["payments"].items()
        if record["payer"] == consumer and record["license_id"] is None
    ]
    return [payment_id for _, payment_id in sorted(unconsumed)]


def audited_flag_findings(state: State) -> list[str]:
    """Audit: every audited asset must hold a verifying certification for its
    current record version, signed by a key present in the key store."""
    findings = []
    for asset_id, asset in state.iter_assets():
        if not asset["metadata"]["audited"]:
            continue
        current = asset["pointer"]["content_hash"]
        matching = [
            c for c in asset["certifications"] if c["record_content_hash"] == current
        ]
        if not matching:
            findings.append(f"{asset_id}: audited without certification for current record")
            continue
        if not any(_certification_verifies(state, cert) for cert in matching):
            findings.append(f"{asset_id}: no attached certification verifies")
    return findings


def _certification_verifies(state: State, cert: dict) -> bool:
    account = state.account(cert["certifier"])
    if account is None or cert["certifier"] not in state.data["certifiers"]:
        return False
    message = certification_signing_bytes(
        cert["record_content_hash"], cert["timestamp"], cert["asset_id"]
    )
    try:
        return verify_signature(
            bytes.fromhex(account["public_key"]), bytes.fromhex(cert["signature"]), message
        )
    except ValueError:
        return False
