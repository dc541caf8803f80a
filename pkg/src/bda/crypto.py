"""Hashing and signature primitives: SHA-256 content hashes, Ed25519 signatures.

Algorithm identifiers are recorded in the genesis block so a chain is pinned
to one hash/signature pair for its whole life.
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass
from typing import Any

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric import ed25519

from bda.canonical import encode

HASH_ALGORITHM = "sha256"
SIGNATURE_SCHEME = "ed25519"

DIGEST_SIZE = 32
PUBLIC_KEY_SIZE = 32

# Reserved unsignable key: not a valid Ed25519 point, so no signature can ever
# verify against it. Used for system accounts that must never sign.
NULL_PUBLIC_KEY = b"\x00" * PUBLIC_KEY_SIZE


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def hash_value(value: Any) -> bytes:
    """SHA-256 over the canonical encoding of a value."""
    return sha256(encode(value))


def account_id_for_key(public_key: bytes) -> bytes:
    """An account id is the hash of its public key, recomputable by anyone."""
    return sha256(public_key)


@dataclass(frozen=True)
class KeyPair:
    """An Ed25519 keypair with its derived account id."""

    private_bytes: bytes
    public_bytes: bytes

    @classmethod
    def generate(cls) -> "KeyPair":
        return cls.from_seed(secrets.token_bytes(32))

    @classmethod
    def from_seed(cls, seed: bytes) -> "KeyPair":
        """Deterministic keypair from a 32-byte seed (scenario reproducibility)."""
        if len(seed) != 32:
            raise ValueError("seed must be exactly 32 bytes")
        private = ed25519.Ed25519PrivateKey.from_private_bytes(seed)
        return cls(private_bytes=seed, public_bytes=private.public_key().public_bytes_raw())

    @property
    def account_id(self) -> bytes:
        return account_id_for_key(self.public_bytes)

    def sign(self, message: bytes) -> bytes:
        private = ed25519.Ed25519PrivateKey.from_private_bytes(self.private_bytes)
        return private.sign(message)


def verify_signature(public_key: bytes, signature: bytes, message: bytes) -> bool:
    """True iff signature is a valid Ed25519 signature by public_key over message."""
    if public_key == NULL_PUBLIC_KEY:
        return False
    try:
        ed25519.Ed25519PublicKey.from_public_bytes(public_key).verify(signature, message)
        return True
    except (InvalidSignature, ValueError):
        return False
