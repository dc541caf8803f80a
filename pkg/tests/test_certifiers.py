"""Certifier key store and detached record certification."""

import pytest

from bda import payloads
from bda.certifiers import (
    VERDICT_INVALID,
    VERDICT_VALID,
    VERDICT_VALID_ISSUER_REVOKED,
    Certification,
    certify_record,
    verify_record,
)
from bda.errors import (
    MalformedRecord,
    NotActive,
    NotActiveCertifier,
    NotAdmin,
    UnknownAccount,
)

from conftest import make_record

TS = 1_700_000_123


@pytest.fixture
def accredited(world):
    world.ledger.transact(
        world["admin"].key,
        payloads.register_certifier(world["certifier1"].account_id, "licensed surveyor"),
    )
    return world


class TestKeyStore:
    def test_admin_registers_certifier(self, accredited):
        entry = accredited.ledger.state.data["certifiers"][accredited["certifier1"].account_id]
        assert entry["active"] is True
        assert entry["accreditation_tag"] == "licensed surveyor"

    def test_non_admin_rejected(self, world):
        with pytest.raises(NotAdmin):
            world.ledger.transact(
                world["owner1"].key,
                payloads.register_certifier(world["certifier1"].account_id, "x"),
            )

    def test_unknown_account_rejected(self, world):
        with pytest.raises(UnknownAccount):
            world.ledger.transact(
                world["admin"].key, payloads.register_certifier("ab" * 32, "x")
            )

    def test_revoke_then_revoke_again(self, accredited):
        world = accredited
        world.ledger.transact(
            world["admin"].key, payloads.revoke_certifier(world["certifier1"].account_id)
        )
        assert not world.ledger.state.data["certifiers"][world["certifier1"].account_id]["active"]
        with pytest.raises(NotActive):
            world.ledger.transact(
                world["admin"].key, payloads.revoke_certifier(world["certifier1"].account_id)
            )

    def test_reregistration_reactivates(self, accredited):
        world = accredited
        certifier = world["certifier1"].account_id
        world.ledger.transact(world["admin"].key, payloads.revoke_certifier(certifier))
        world.ledger.transact(
            world["admin"].key, payloads.register_certifier(certifier, "renewed")
        )
        entry = world.ledger.state.data["certifiers"][certifier]
        assert entry["active"] and entry["accreditation_tag"] == "renewed"


class TestCertify:
    def test_active_certifier_signs_verifiably(self, accredited):
        world = accredited
        record = make_record()
        cert = certify_record(
            world.ledger.state, world["certifier1"].key, record.to_bytes(), "aa" * 32, TS
        )
        assert verify_record(world.ledger.state, record.to_bytes(), cert) == VERDICT_VALID

    def test_revoked_certifier_cannot_sign(self, accredited):
        world = accredited
        world.ledger.transact(
            world["admin"].key, payloads.revoke_certifier(world["certifier1"].account_id)
        )
        with pytest.raises(NotActiveCertifier):
            certify_record(
                world.ledger.state, world["certifier1"].key, make_record().to_bytes(), "aa" * 32, TS
            )

    def test_unaccredited_expert_cannot_sign(self, world):
        with pytest.raises(NotActiveCertifier):
            certify_record(
                world.ledger.state, world["certifier1"].key, make_record().to_bytes(), "aa" * 32, TS
            )

    def test_truncated_record_rejected(self, accredited):
        world = accredited
        with pytest.raises(MalformedRecord):
            certify_record(
                world.ledger.state,
                world["certifier1"].key,
                make_record().to_bytes()[:-3],
                "aa" * 32,
                TS,
            )


class TestVerify:
    def test_flipped_payload_byte_invalidates(self, accredited):
        world = accredited
        record = make_record()
        cert = certify_record(
            world.ledger.state, world["certifier1"].key, record.to_bytes(), "aa" * 32, TS
        )
        raw = bytearray(record.to_bytes())
        raw[-1] ^= 0x01
        assert verify_record(world.ledger.state, bytes(raw), cert) == VERDICT_INVALID

    def test_certification_after_revocation_flagged(self, accredited):
        world = accredited
        record = make_record()
        cert = certify_record(
            world.ledger.state, world["certifier1"].key, record.to_bytes(), "aa" * 32, TS
        )
        world.ledger.transact(
            world["admin"].key, payloads.revoke_certifier(world["certifier1"].account_id)
        )
        assert (
            verify_record(world.ledger.state, record.to_bytes(), cert)
            == VERDICT_VALID_ISSUER_REVOKED
        )

    def test_signature_bound_to_asset_id(self, accredited):
        world = accredited
        record = make_record()
        cert = certify_record(
            world.ledger.state, world["certifier1"].key, record.to_bytes(), "aa" * 32, TS
        )
        replayed = Certification(
            record_content_hash=cert.record_content_hash,
            certifier=cert.certifier,
            timestamp=cert.timestamp,
            asset_id="bb" * 32,  # same bytes, different asset
            signature=cert.signature,
        )
        assert verify_record(world.ledger.state, record.to_bytes(), replayed) == VERDICT_INVALID

    def test_unknown_signer_is_invalid(self, world):
        record = make_record()
        cert = Certification(
            record_content_hash=record.content_hash(),
            certifier="cc" * 32,
            timestamp=TS,
            asset_id="aa" * 32,
            signature="ab" * 64,
        )
        assert verify_record(world.ledger.state, record.to_bytes(), cert) == VERDICT_INVALID

    def test_detached_file_round_trip(self, accredited):
        world = accredited
        record = make_record()
        cert = certify_record(
            world.ledger.state, world["certifier1"].key, record.to_bytes(), "aa" * 32, TS
        )
        assert Certification.from_bytes(cert.to_bytes()) == cert
