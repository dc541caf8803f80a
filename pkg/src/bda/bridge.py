"""Tokenizer bridge: turns dual-signed contract terms into an on-ledger mint.

Both the owner and the tokenizer sign the canonical terms; the mint payload
embeds the terms and both signatures, so the ledger itself enforces consent
and once-only execution (the terms hash is registered on first mint). The
bridge is therefore a stateless client: safe to retry, safe to run
concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from bda import payloads
from bda.assets import terms_hash, terms_signing_bytes
from bda.canonical import decode, encode
from bda.crypto import KeyPair, verify_signature
from bda.errors import BadConsent, DuplicateContract
from bda.ledger import Ledger


@dataclass(frozen=True)
class ContractTerms:
    """The signed agreement a mint executes: parties, asset, fee, supplies."""

    owner: str
    tokenizer: str
    metadata: dict
    pointer: dict
    license_fee: int
    ownership_supply: int
    economic_supply: int
    owner_signature: str = ""
    tokenizer_signature: str = ""

    def body(self) -> dict:
        return {
            "owner": self.owner,
            "tokenizer": self.tokenizer,
            "metadata": self.metadata,
            "pointer": self.pointer,
            "license_fee": self.license_fee,
            "ownership_supply": self.ownership_supply,
            "economic_supply": self.economic_supply,
        }

    def signing_bytes(self) -> bytes:
        return terms_signing_bytes(self.body())

    def hash(self) -> str:
        return terms_hash(self.body())

    def signed_by_owner(self, owner_key: KeyPair) -> "ContractTerms":
        return replace(self, owner_signature=owner_key.sign(self.signing_bytes()).hex())

    def signed_by_tokenizer(self, tokenizer_key: KeyPair) -> "ContractTerms":
        return replace(
            self, tokenizer_signature=tokenizer_key.sign(self.signing_bytes()).hex()
        )

    def to_bytes(self) -> bytes:
        return encode(
            {
                "terms": self.body(),
                "owner_signature": self.owner_signature,
                "tokenizer_signature": self.tokenizer_signature,
            }
        )

    @classmethod
    def from_bytes(cls, raw: bytes) -> "ContractTerms":
        data = decode(raw)
        body = data["terms"]
        return cls(
            owner=body["owner"],
            tokenizer=body["tokenizer"],
            metadata=body["metadata"],
            pointer=body["pointer"],
            license_fee=body["license_fee"],
            ownership_supply=body["ownership_supply"],
            economic_supply=body["economic_supply"],
            owner_signature=data["owner_signature"],
            tokenizer_signature=data["tokenizer_signature"],
        )

    def render_text(self) -> str:
        """Human-readable rendering for signing ceremonies."""
        md = self.metadata
        lines = [
            "TOKENIZATION CONTRACT TERMS",
            f"  terms hash:        {self.hash()}",
            f"  owner account:     {self.owner}",
            f"  tokenizer account: {self.tokenizer}",
            f"  building:          {md['building_ref']} ({md['jurisdiction']})",
            f"  category:          {md['category']}",
            f"  keywords:          {', '.join(md['keywords'])}",
            f"  record hash:       {self.pointer['content_hash']}",
            f"  record locator:    {self.pointer['locator']}",
            f"  license fee:       {self.license_fee}",
            f"  ownership supply:  {self.ownership_supply}",
            f"  economic supply:   {self.economic_supply}",
            f"  owner signed:      {'yes' if self.owner_signature else 'NO'}",
            f"  tokenizer signed:  {'yes' if self.tokenizer_signature else 'NO'}",
        ]
        return "\n".join(lines)


def verify_consent(ledger: Ledger, terms: ContractTerms) -> None:
    """Check both signatures against the parties' registered keys."""
    message = terms.signing_bytes()
    for party, signature, label in (
        (terms.owner, terms.owner_signature, "owner"),
        (terms.tokenizer, terms.tokenizer_signature, "tokenizer"),
    ):
        account = ledger.state.account(party)
        try:
            ok = account is not None and verify_signature(
                bytes.fromhex(account["public_key"]), bytes.fromhex(signature), message
            )
        except ValueError:
            ok = False
        if not ok:
            raise BadConsent(f"{label} signature does not verify")


def execute_contract(ledger: Ledger, terms: ContractTerms, tokenizer_key: KeyPair) -> str:
    """Mint the asset agreed in dual-signed terms; returns the new asset id.

    Rejects before submission on missing consent or a previously executed
    terms hash; the ledger enforces both again at seal time.
    """
    verify_consent(ledger, terms)
    if terms.hash() in ledger.state.data["contracts"]:
        raise DuplicateContract(terms.hash())
    payload = payloads.mint_asset(
        terms.body(), terms.owner_signature, terms.tokenizer_signature
    )
    asset_id, _ = ledger.transact(tokenizer_key, payload)
    return asset_id
