"""Tokenizer bridge: dual consent, once-only execution, terms files."""

import pytest

from bda.bridge import ContractTerms, execute_contract, verify_consent
from bda.errors import BadConsent, DuplicateContract

from conftest import make_record


@pytest.fixture
def terms(world) -> ContractTerms:
    record = make_record()
    world.gateway.store_record(world["owner1"].account_id, record.to_bytes())
    return ContractTerms(
        owner=world["owner1"].account_id,
        tokenizer=world["tokenizer1"].account_id,
        metadata={
            "building_ref": "BLDG-0001",
            "category": "wiring",
            "jurisdiction": "SG",
            "keywords": ["wiring"],
            "audited": False,
        },
        pointer={"content_hash": record.content_hash(), "locator": "gateway/local"},
        license_fee=100,
        ownership_supply=1_000_000,
        economic_supply=1_000_000,
    )


def test_dual_signed_terms_mint_to_owner(world, terms):
    signed = terms.signed_by_owner(world["owner1"].key).signed_by_tokenizer(world["tokenizer1"].key)
    asset_id = execute_contract(world.ledger, signed, world["tokenizer1"].key)
    owner = world["owner1"].account_id
    assert world.ledger.state.balance(asset_id, "ownership", owner) == 1_000_000
    assert world.ledger.state.balance(asset_id, "economic", owner) == 1_000_000
    assert world.ledger.state.data["contracts"][signed.hash()] == asset_id


def test_missing_owner_signature_is_bad_consent(world, terms):
    signed = terms.signed_by_tokenizer(world["tokenizer1"].key)
    with pytest.raises(BadConsent):
        execute_contract(world.ledger, signed, world["tokenizer1"].key)


def test_signature_by_wrong_party_is_bad_consent(world, terms):
    forged = terms.signed_by_owner(world["owner2"].key).signed_by_tokenizer(world["tokenizer1"].key)
    with pytest.raises(BadConsent):
        verify_consent(world.ledger, forged)


def test_tampered_terms_invalidate_signatures(world, terms):
    from dataclasses import replace

    signed = terms.signed_by_owner(world["owner1"].key).signed_by_tokenizer(world["tokenizer1"].key)
    sweetened = replace(signed, license_fee=1)
    with pytest.raises(BadConsent):
        execute_contract(world.ledger, sweetened, world["tokenizer1"].key)


def test_same_terms_cannot_mint_twice(world, terms):
    signed = terms.signed_by_owner(world["owner1"].key).signed_by_tokenizer(world["tokenizer1"].key)
    execute_contract(world.ledger, signed, world["tokenizer1"].key)
    with pytest.raises(DuplicateContract):
        execute_contract(world.ledger, signed, world["tokenizer1"].key)


def test_every_mint_traces_to_a_contract(world, terms):
    signed = terms.signed_by_owner(world["owner1"].key).signed_by_tokenizer(world["tokenizer1"].key)
    execute_contract(world.ledger, signed, world["tokenizer1"].key)
    state = world.ledger.state
    minted_ids = set(dict(state.iter_assets()))
    assert set(state.data["contracts"].values()) == minted_ids


def test_terms_file_round_trip(world, terms):
    signed = terms.signed_by_owner(world["owner1"].key)
    restored = ContractTerms.from_bytes(signed.to_bytes())
    assert restored == signed
    assert restored.hash() == terms.hash()  # signatures are outside the hash


def test_text_rendering_shows_signing_status(world, terms):
    text = terms.render_text()
    assert "owner signed:      NO" in text
    signed = terms.signed_by_owner(world["owner1"].key)
    assert "owner signed:      yes" in signed.render_text()
    assert terms.hash() in text
