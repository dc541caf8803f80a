"""Search index: sync from sealed state, deterministic ranking, metadata-only."""

import pytest

from bda import payloads
from bda.certifiers import certify_record
from bda.errors import LedgerUnavailable
from bda.records import BuildingDataRecord
from bda.scenario import LOGICAL_EPOCH
from bda.search import SearchIndex

from conftest import make_record, mint_default_asset


def make_assets(world):
    wiring = mint_default_asset(world, record=make_record(b"w1"), keywords=("wiring", "diagram"))
    utility = mint_default_asset(
        world,
        record=BuildingDataRecord(
            building_ref="BLDG-0002", category="utility_history", jurisdiction="SG",
            payload=b"kwh series", created_at=1, updated_at=1,
        ),
        keywords=("power", "usage", "monthly"),
    )
    plumbing = mint_default_asset(
        world,
        record=make_record(b"p1", category="plumbing"),
        keywords=("plumbing", "riser", "diagram"),
        license_fee=250,
    )
    return wiring, utility, plumbing


class TestSync:
    def test_minted_assets_are_listed(self, world):
        ids = make_assets(world)
        assert world.index.sync_from_ledger() == 3
        assert set(world.index.entries()) == set(ids)

    def test_retired_asset_delisted(self, world):
        wiring, utility, plumbing = make_assets(world)
        world.index.sync_from_ledger()
        world.ledger.transact(world["owner1"].key, payloads.vote(wiring, "retire_asset", False))
        changed = world.index.sync_from_ledger()
        assert changed == 1
        assert wiring not in world.index.entries()
        # retained-historic assets stay listed
        world.ledger.transact(world["owner1"].key, payloads.vote(utility, "retire_asset", True))
        world.index.sync_from_ledger()
        assert utility in world.index.entries()

    def test_fee_change_reflected(self, world):
        wiring, *_ = make_assets(world)
        world.index.sync_from_ledger()
        world.ledger.transact(world["owner1"].key, payloads.vote(wiring, "set_license_fee", 175))
        assert world.index.sync_from_ledger() == 1
        assert world.index.entries()[wiring].license_fee == 175

    def test_unavailable_ledger(self):
        index = SearchIndex(None)
        with pytest.raises(LedgerUnavailable):
            index.sync_from_ledger()

        def broken():
            raise RuntimeError("connection refused")

        with pytest.raises(LedgerUnavailable):
            SearchIndex(broken).sync_from_ledger()


class TestQuery:
    def test_audited_filter(self, world):
        wiring, *_ = make_assets(world)
        world.ledger.transact(
            world["admin"].key, payloads.register_certifier(world["certifier1"].account_id, "pe")
        )
        record = make_record(b"w1")
        cert = certify_record(
            world.ledger.state, world["certifier1"].key, record.to_bytes(), wiring, LOGICAL_EPOCH
        )
        world.ledger.transact(world["owner1"].key, payloads.attach_certification(wiring, cert.to_dict()))
        world.ledger.transact(world["owner1"].key, payloads.vote(wiring, "set_audited", True))
        world.index.sync_from_ledger()
        hits = world.index.query(["wiring"], audited_only=True)
        assert [h.asset_id for h in hits] == [wiring]
        assert hits[0].audited is True

    def test_no_match_is_empty(self, world):
        make_assets(world)
        world.index.sync_from_ledger()
        assert world.index.query(["helipad"]) == []

    def test_all_terms_rank_above_partial(self, world):
        wiring, utility, plumbing = make_assets(world)
        world.index.sync_from_ledger()
        hits = world.index.query(["power", "usage"], category="utility_history")
        assert [h.asset_id for h in hits] == [utility]
        # "diagram" matches wiring and plumbing; add "riser" so plumbing is
        # the only full match and must rank first
        hits = world.index.query(["diagram", "riser"])
        assert hits[0].asset_id == plumbing
        assert {h.asset_id for h in hits[1:]} == {wiring}

    def test_ties_break_by_ascending_asset_id(self, world):
        ids = sorted(make_assets(world))
        world.index.sync_from_ledger()
        hits = world.index.query([], jurisdiction="SG")
        assert [h.asset_id for h in hits] == ids

    def test_determinism(self, world):
        make_assets(world)
        world.index.sync_from_ledger()
        first = world.index.query(["diagram"])
        for _ in range(5):
            assert world.index.query(["diagram"]) == first

    def test_results_consistent_with_ledger(self, world):
        make_assets(world)
        world.index.sync_from_ledger()
        for hit in world.index.query([]):
            asset = world.ledger.state.asset(hit.asset_id)
            assert asset is not None
            assert asset["license_fee"] == hit.license_fee
            assert asset["metadata"]["audited"] == hit.audited


class TestMetadataOnly:
    def test_entry_size_independent_of_payload_size(self, world):
        small = mint_default_asset(world, record=make_record(b"x"), keywords=("alpha",))
        world.index.sync_from_ledger()
        small_size = world.index.entries()[small].size_bytes()

        big = mint_default_asset(
            world, record=make_record(b"x" * 100), keywords=("alpha",)
        )
        world.index.sync_from_ledger()
        big_size = world.index.entries()[big].size_bytes()
        assert small_size == big_size

    def test_entries_carry_no_payload_bytes(self, world):
        asset_id = mint_default_asset(world, record=make_record(b"SECRET-PAYLOAD"))
        world.index.sync_from_ledger()
        entry = world.index.entries()[asset_id].to_dict()
        assert "payload" not in entry
        flat = repr(entry)
        assert "SECRET-PAYLOAD" not in flat
