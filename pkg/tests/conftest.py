"""Shared fixtures: a wired-up world with funded actors and a minted asset."""

from __future__ import annotations

import pytest

from bda import payloads
from bda.bridge import ContractTerms, execute_contract
from bda.records import BuildingDataRecord
from bda.scenario import LOGICAL_EPOCH, World
from bda.state import ESCROW_ACCOUNT_ID


STANDARD_ACTORS = [
    {"name": "owner1", "roles": ["owner"], "whitelisted": True, "cash": 10_000},
    {"name": "owner2", "roles": ["owner"], "whitelisted": True, "cash": 1_000_000},
    {"name": "tokenizer1", "roles": ["tokenizer"], "cash": 0},
    {"name": "certifier1", "roles": ["certifier"], "cash": 0},
    {"name": "investor1", "roles": ["investor"], "cash": 1_000_000},
    {"name": "consumer1", "roles": ["consumer"], "cash": 5_000},
    {"name": "consumer2", "roles": ["consumer"], "cash": 5_000},
]


@pytest.fixture
def world() -> World:
    return World(seed=1234, chain_id="bda-test", actors=STANDARD_ACTORS)


def make_record(payload: bytes = b"wiring diagram v1", category: str = "wiring") -> BuildingDataRecord:
    return BuildingDataRecord(
        building_ref="BLDG-0001",
        category=category,
        jurisdiction="SG",
        payload=payload,
        created_at=LOGICAL_EPOCH,
        updated_at=LOGICAL_EPOCH,
    )


def mint_default_asset(
    world: World,
    record: BuildingDataRecord | None = None,
    license_fee: int = 100,
    ownership_supply: int = 1_000_000,
    economic_supply: int = 1_000_000,
    keywords: tuple[str, ...] = ("wiring", "diagram"),
) -> str:
    record = record or make_record()
    world.gateway.store_record(world["owner1"].account_id, record.to_bytes())
    terms = ContractTerms(
        owner=world["owner1"].account_id,
        tokenizer=world["tokenizer1"].account_id,
        metadata={
            "building_ref": record.building_ref,
            "category": record.category,
            "jurisdiction": record.jurisdiction,
            "keywords": list(keywords),
            "audited": False,
        },
        pointer={"content_hash": record.content_hash(), "locator": "gateway/local"},
        license_fee=license_fee,
        ownership_supply=ownership_supply,
        economic_supply=economic_supply,
    )
    terms = terms.signed_by_owner(world["owner1"].key).signed_by_tokenizer(world["tokenizer1"].key)
    asset_id = execute_contract(world.ledger, terms, world["tokenizer1"].key)
    world.gateway.sync()
    return asset_id


@pytest.fixture
def minted(world: World) -> tuple[World, str]:
    return world, mint_default_asset(world)


def assert_conservation(state) -> None:
    """Token supplies and cash are conserved exactly."""
    for asset_id, asset in state.iter_assets():
        for kind in ("ownership", "economic"):
            table = asset[kind]
            assert sum(table["balances"].values()) == table["total_supply"], (
                f"{kind} supply broken for {asset_id}"
            )
    assert state.total_cash() == state.data["cash_minted"]


def assert_whitelist_closure(state) -> None:
    """Every nonzero ownership balance belongs to a whitelisted account."""
    for asset_id, asset in state.iter_assets():
        for account_id, balance in asset["ownership"]["balances"].items():
            if balance > 0:
                assert state.is_whitelisted(account_id), (
                    f"non-whitelisted {account_id} holds ownership of {asset_id}"
                )


def pay_and_get_payment_id(world: World, asset_id: str, consumer_name: str = "consumer1") -> str:
    asset = world.ledger.state.require_asset(asset_id)
    payment_id, _ = world.ledger.transact(
        world[consumer_name].key, payloads.pay_license(asset_id, asset["license_fee"])
    )
    return payment_id


__all__ = [
    "ESCROW_ACCOUNT_ID",
    "assert_conservation",
    "assert_whitelist_closure",
    "make_record",
    "mint_default_asset",
    "pay_and_get_payment_id",
]
