"""The prescribed building-data record format.

Contractors deliver data in this one structured shape so records are
coherent at the source, searchable by metadata, and certifiable by hash.
Serialization is canonical: two logically identical records always produce
identical bytes, and the content hash is the hash of those bytes.

The payload is opaque to the ledger. For tabular/structured categories it
may itself be a canonical map (e.g. monthly utility series), which lets the
gateway serve field-filtered views without interpreting the data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from bda.canonical import CanonicalError, decode, encode
from bda.crypto import sha256
from bda.errors import MalformedRecord, UnknownQueryField
from bda.payloads import CATEGORIES

SCHEMA_VERSION = 1

_FIELDS = (
    "schema_version",
    "building_ref",
    "category",
    "jurisdiction",
    "quantity",
    "units",
    "created_at",
    "updated_at",
    "payload",
)


@dataclass(frozen=True)
class BuildingDataRecord:
    """One certified-format record: metadata fields plus an opaque payload."""

    building_ref: str
    category: str
    jurisdiction: str
    payload: bytes
    created_at: int
    updated_at: int
    quantity: int | None = None
    units: str | None = None
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "building_ref": self.building_ref,
            "category": self.category,
            "jurisdiction": self.jurisdiction,
            "quantity": self.quantity,
            "units": self.units,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "payload": self.payload,
        }

    def to_bytes(self) -> bytes:
        return encode(self.to_dict())

    def content_hash(self) -> str:
        return sha256(self.to_bytes()).hex()

    def structured_payload(self) -> dict[str, Any] | None:
        """The payload decoded as a canonical map, or None if it is opaque."""
        try:
            value = decode(self.payload)
        except CanonicalError:
            return None
        return value if isinstance(value, dict) else None

    def view(self, fields: list[str] | None) -> dict[str, Any]:
        """Select top-level fields; selectors may also name structured payload keys.

        With no selectors the full record is returned. Payload bytes are
        returned as-is; no server-side computation happens here.
        """
        if not fields:
            return self.to_dict()
        structured = self.structured_payload()
        out: dict[str, Any] = {}
        for field in fields:
            if field in _FIELDS:
                out[field] = getattr(self, field)
            elif structured is not None and field in structured:
                out[field] = structured[field]
            else:
                raise UnknownQueryField(field)
        return out


def parse_record(raw: bytes) -> BuildingDataRecord:
    """Parse and validate canonical record bytes; raises MalformedRecord."""
    try:
        data = decode(raw)
    except CanonicalError as exc:
        raise MalformedRecord(str(exc)) from exc
    if not isinstance(data, dict) or set(data) != set(_FIELDS):
        raise MalformedRecord("record fields do not match the prescribed format")
    if data["schema_version"] != SCHEMA_VERSION:
        raise MalformedRecord(f"unsupported schema version {data['schema_version']!r}")
    for field in ("building_ref", "jurisdiction"):
        if not isinstance(data[field], str):
            raise MalformedRecord(f"{field} must be a string")
    if data["category"] not in CATEGORIES:
        raise MalformedRecord(f"category must be one of {sorted(CATEGORIES)}")
    if data["quantity"] is not None and not isinstance(data["quantity"], int):
        raise MalformedRecord("quantity must be an integer or null")
    if data["units"] is not None and not isinstance(data["units"], str):
        raise MalformedRecord("units must be a string or null")
    for field in ("created_at", "updated_at"):
        if not isinstance(data[field], int) or isinstance(data[field], bool):
            raise MalformedRecord(f"{field} must be an integer timestamp")
    if not isinstance(data["payload"], bytes):
        raise MalformedRecord("payload must be bytes")
    record = BuildingDataRecord(
        building_ref=data["building_ref"],
        category=data["category"],
        jurisdiction=data["jurisdiction"],
        payload=data["payload"],
        created_at=data["created_at"],
        updated_at=data["updated_at"],
        quantity=data["quantity"],
        units=data["units"],
        schema_version=data["schema_version"],
    )
    if record.to_bytes() != raw:
        raise MalformedRecord("record bytes are not in canonical form")
    return record
