"""Ledger core: registration, submission, sealing, tamper evidence, queries."""

import pytest

from bda import payloads
from bda.canonical import decode, encode
from bda.crypto import KeyPair, sha256
from bda.errors import (
    BadNonce,
    BadSignature,
    DuplicateKey,
    PayloadRejected,
    UnauthorizedWhitelist,
    UnknownPath,
)
from bda.ledger import (
    Ledger,
    make_genesis,
    make_transaction,
    tx_hash,
    verify_block_stream,
    verify_chain_files,
)
from bda.scenario import World

from conftest import STANDARD_ACTORS, assert_conservation, mint_default_asset


@pytest.fixture
def ledger(world) -> Ledger:
    return world.ledger


class TestRegisterAccount:
    def test_account_id_is_key_hash(self, world):
        fresh = KeyPair.generate()
        payload = payloads.register_account(fresh.public_bytes.hex(), ["owner"], True)
        world.ledger.transact(world["admin"].key, payload)
        account = world.ledger.state.account(sha256(fresh.public_bytes).hex())
        assert account is not None
        assert account["nonce"] == 0
        assert account["whitelisted"] is True

    def test_duplicate_key_rejected(self, world):
        fresh = KeyPair.generate()
        payload = payloads.register_account(fresh.public_bytes.hex(), ["owner"], False)
        world.ledger.transact(world["admin"].key, payload)
        with pytest.raises(DuplicateKey):
            world.ledger.transact(world["admin"].key, payload)

    def test_whitelist_needs_admin_sponsor(self, world):
        fresh = KeyPair.generate()
        payload = payloads.register_account(fresh.public_bytes.hex(), ["investor"], True)
        with pytest.raises(UnauthorizedWhitelist):
            world.ledger.transact(world["owner1"].key, payload)

    def test_empty_roles_rejected_structurally(self, world):
        fresh = KeyPair.generate()
        with pytest.raises(PayloadRejected):
            world.ledger.transact(
                world["admin"].key,
                {"type": "register_account", "public_key": fresh.public_bytes.hex(),
                 "roles": [], "whitelisted": False},
            )


class TestSubmit:
    def test_returns_hash_of_canonical_bytes(self, minted):
        world, asset_id = minted
        owner = world["owner1"]
        payload = payloads.transfer_tokens(
            asset_id, "economic", owner.account_id, world["investor1"].account_id, 5
        )
        nonce = world.ledger.next_nonce(owner.account_id)
        tx = make_transaction(owner.key, nonce, payload, world.ledger.chain_id)
        txid = world.ledger.submit_transaction(tx)
        assert txid == sha256(encode(tx)).hex()
        world.ledger.seal_block()

    def test_reused_nonce_rejected(self, minted):
        world, asset_id = minted
        owner = world["owner1"]
        payload = payloads.transfer_tokens(
            asset_id, "economic", owner.account_id, world["investor1"].account_id, 5
        )
        nonce = world.ledger.next_nonce(owner.account_id)
        world.ledger.submit_transaction(
            make_transaction(owner.key, nonce, payload, world.ledger.chain_id)
        )
        with pytest.raises(BadNonce):
            world.ledger.submit_transaction(
                make_transaction(owner.key, nonce, payload, world.ledger.chain_id)
            )

    def test_unregistered_signer_rejected(self, minted):
        world, asset_id = minted
        stranger = KeyPair.generate()
        payload = payloads.pay_license(asset_id, 100)
        with pytest.raises(BadSignature):
            world.ledger.submit_transaction(
                make_transaction(stranger, 1, payload, world.ledger.chain_id)
            )

    def test_wrong_chain_id_rejected(self, minted):
        world, asset_id = minted
        payload = payloads.pay_license(asset_id, 100)
        tx = make_transaction(world["consumer1"].key, 1, payload, "other-chain")
        with pytest.raises(BadSignature):
            world.ledger.submit_transaction(tx)


class TestSeal:
    def test_three_valid_transactions_apply(self, minted):
        world, asset_id = minted
        ledger = world.ledger
        owner = world["owner1"]
        for _ in range(3):
            nonce = ledger.next_nonce(owner.account_id)
            payload = payloads.transfer_tokens(
                asset_id, "economic", owner.account_id, world["investor1"].account_id, 7
            )
            ledger.submit_transaction(
                make_transaction(owner.key, nonce, payload, ledger.chain_id)
            )
        block = ledger.seal_block()
        assert [o["status"] for o in block["outcomes"]] == ["applied"] * 3

    def test_invalid_transaction_rejected_without_poisoning_block(self, minted):
        world, asset_id = minted
        ledger = world.ledger
        good = payloads.transfer_tokens(
            asset_id, "economic", world["owner1"].account_id, world["investor1"].account_id, 7
        )
        bad = payloads.transfer_tokens(
            asset_id, "economic", world["consumer1"].account_id,
            world["investor1"].account_id, 10**12,  # overdraft
        )
        ledger.submit_transaction(
            make_transaction(world["owner1"].key, ledger.next_nonce(world["owner1"].account_id), good, ledger.chain_id)
        )
        ledger.submit_transaction(
            make_transaction(world["consumer1"].key, ledger.next_nonce(world["consumer1"].account_id), bad, ledger.chain_id)
        )
        block = ledger.seal_block()
        statuses = [o["status"] for o in block["outcomes"]]
        assert statuses == ["applied", "rejected"]
        assert "InsufficientBalance" in block["outcomes"][1]["reason"]

    def test_empty_block_keeps_state_root(self, ledger):
        before = ledger.state_root()
        block = ledger.seal_block()
        assert block["txs"] == []
        assert block["state_root"] == before

    def test_rejected_only_block_keeps_state_root(self, minted):
        world, asset_id = minted
        ledger = world.ledger
        before = ledger.state_root()
        bad = payloads.transfer_tokens(
            asset_id, "economic", world["consumer1"].account_id,
            world["investor1"].account_id, 10**12,
        )
        ledger.submit_transaction(
            make_transaction(world["consumer1"].key, ledger.next_nonce(world["consumer1"].account_id), bad, ledger.chain_id)
        )
        block = ledger.seal_block()
        assert [o["status"] for o in block["outcomes"]] == ["rejected"]
        assert ledger.state_root() == before == block["state_root"]

    def test_rejected_transaction_does_not_consume_nonce(self, minted):
        world, asset_id = minted
        ledger = world.ledger
        consumer = world["consumer1"]
        before = ledger.state.require_account(consumer.account_id)["nonce"]
        bad = payloads.pay_license(asset_id, 1)  # wrong amount
        ledger.submit_transaction(
            make_transaction(consumer.key, before + 1, bad, ledger.chain_id)
        )
        ledger.seal_block()
        assert ledger.state.require_account(consumer.account_id)["nonce"] == before

    def test_applied_nonces_are_gapless(self, minted):
        world, asset_id = minted
        ledger = world.ledger
        owner = world["owner1"]
        # alternate valid and invalid submissions over several blocks
        for i in range(6):
            amount = 3 if i % 2 == 0 else 10**12
            payload = payloads.transfer_tokens(
                asset_id, "economic", owner.account_id, world["investor1"].account_id, amount
            )
            ledger.submit_transaction(
                make_transaction(owner.key, ledger.next_nonce(owner.account_id), payload, ledger.chain_id)
            )
            ledger.seal_block()
        applied_nonces = [
            tx["nonce"]
            for raw in ledger.blocks()
            for tx, outcome in zip(decode(raw)["txs"], decode(raw)["outcomes"])
            if tx["signer"] == owner.account_id and outcome["status"] == "applied"
        ]
        assert applied_nonces == list(range(1, len(applied_nonces) + 1))


class TestVerifyChain:
    def _tamper(self, raw: bytes, marker: bytes) -> bytes:
        index = raw.index(marker)
        mutated = bytearray(raw)
        mutated[index] ^= 0x01
        return bytes(mutated)

    def test_untampered_ten_block_chain_passes(self, minted):
        world, asset_id = minted
        while world.ledger.height < 9:
            if world.ledger.height % 2:
                world.ledger.transact(
                    world["owner1"].key,
                    payloads.transfer_tokens(
                        asset_id, "economic", world["owner1"].account_id,
                        world["investor1"].account_id, 2,
                    ),
                )
            else:
                world.ledger.seal_block()
        report = world.ledger.verify_chain()
        assert len(report.blocks) == 10
        assert report.ok
        assert all(c.ok for c in report.blocks)

    def test_flipped_tx_byte_detected_at_or_before_block(self, minted):
        world, asset_id = minted
        ledger = world.ledger
        for _ in range(3):
            ledger.transact(
                world["owner1"].key,
                payloads.transfer_tokens(
                    asset_id, "economic", world["owner1"].account_id,
                    world["investor1"].account_id, 11,
                ),
            )
        blocks = ledger.blocks()
        target = next(h for h, raw in enumerate(blocks) if b"transfer_tokens" in raw)
        blocks[target] = self._tamper(blocks[target], b"transfer_tokens")
        report = verify_block_stream(blocks, None)
        assert not report.ok
        assert report.first_bad_height() is not None
        assert report.first_bad_height() <= target

    def test_replaced_signature_reported_as_signature_failure(self, minted):
        world, asset_id = minted
        ledger = world.ledger
        ledger.transact(world["consumer1"].key, payloads.pay_license(asset_id, 100))
        blocks = ledger.blocks()
        height = len(blocks) - 1
        block = decode(blocks[height])
        block["txs"][0]["signature"] = "ab" * 64
        blocks[height] = encode(block)
        report = verify_block_stream(blocks, None)
        assert not report.ok
        assert not report.blocks[height].signatures_ok

    def test_head_pins_the_tip(self, minted):
        world, _ = minted
        ledger = world.ledger
        blocks = ledger.blocks()
        tip = len(blocks) - 1
        mutated = bytearray(blocks[tip])
        mutated[-1] ^= 0x04
        blocks[tip] = bytes(mutated)
        report = verify_block_stream(blocks, ledger._store.head())
        assert not report.ok
        assert report.first_bad_height() is not None
        assert report.first_bad_height() <= tip


class TestQueryState:
    def test_fresh_account_balance_is_zero(self, minted):
        world, asset_id = minted
        consumer = world["consumer2"].account_id
        assert world.ledger.query_state(f"assets/{asset_id}/ownership/balances/{consumer}") == 0

    def test_unpaid_payment_record_absent(self, minted):
        world, asset_id = minted
        missing = "ab" * 32
        assert world.ledger.query_state(f"assets/{asset_id}/payments/{missing}") is None

    def test_unknown_path_raises(self, ledger):
        with pytest.raises(UnknownPath):
            ledger.query_state("no/such/cell")
        with pytest.raises(UnknownPath):
            ledger.query_state(f"assets/{'00' * 32}/status")

    def test_defined_cells_read_back(self, minted):
        world, asset_id = minted
        assert world.ledger.query_state(f"assets/{asset_id}/status") == "active"
        assert world.ledger.query_state(f"assets/{asset_id}/license_fee") == 100
        assert world.ledger.query_state(f"cash/{world['consumer1'].account_id}") == 5_000


class TestPersistence:
    def test_reopen_replays_identical_state(self, tmp_path):
        world = World(seed=7, chain_id="bda-disk", actors=STANDARD_ACTORS, data_dir=tmp_path)
        asset_id = mint_default_asset(world)
        world.ledger.transact(world["consumer1"].key, payloads.pay_license(asset_id, 100))
        root = world.ledger.state_root()
        height = world.ledger.height

        reopened = Ledger.open(tmp_path)
        assert reopened.height == height
        assert reopened.state_root() == root
        assert verify_chain_files(tmp_path / "blocks").ok

    def test_genesis_file_mirrors_block_zero(self, tmp_path):
        import json

        world = World(seed=9, chain_id="bda-gen", actors=STANDARD_ACTORS, data_dir=tmp_path)
        on_disk = json.loads((tmp_path / "genesis.json").read_text())
        embedded = decode(world.ledger.blocks()[0])["genesis"]
        assert on_disk == embedded
        assert on_disk["chain_id"] == "bda-gen"
        assert on_disk["hash_algorithm"] == "sha256"
        assert on_disk["signature_scheme"] == "ed25519"

    def test_corrupt_file_fails_open_but_audits(self, tmp_path):
        world = World(seed=8, chain_id="bda-disk2", actors=STANDARD_ACTORS, data_dir=tmp_path)
        asset_id = mint_default_asset(world)
        world.ledger.transact(world["consumer1"].key, payloads.pay_license(asset_id, 100))
        target = sorted((tmp_path / "blocks").glob("block_*.bin"))[2]
        raw = bytearray(target.read_bytes())
        raw[20] ^= 0xFF
        target.write_bytes(bytes(raw))
        with pytest.raises((ValueError, Exception)):
            Ledger.open(tmp_path)
        report = verify_chain_files(tmp_path / "blocks")
        assert not report.ok
        assert report.first_bad_height() <= 2


class TestGenesis:
    def test_requires_admin(self):
        key = KeyPair.generate()
        with pytest.raises(ValueError):
            make_genesis("c", [{"public_key": key.public_bytes.hex(), "roles": ["owner"]}])

    def test_conservation_holds_from_genesis(self, minted):
        world, _ = minted
        assert_conservation(world.ledger.state)
