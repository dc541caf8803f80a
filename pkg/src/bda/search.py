"""Metadata-only search over the ledger's asset registry.

The index is rebuilt from sealed ledger state by a single sync task and
swapped in atomically; queries run against the immutable snapshot. Entries
carry metadata only, never payload bytes or payload-derived values, so the
index reveals nothing a consumer has not paid for. Matching is boolean with
exact-match priority: assets matching every term rank above partial matches,
ties resolved by ascending asset id.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from bda.canonical import encode
from bda.errors import LedgerUnavailable
from bda.ledger import Ledger
from bda.state import State


@dataclass(frozen=True)
class IndexEntry:
    """Searchable metadata for one listed asset."""

    asset_id: str
    category: str
    building_ref: str
    keywords: tuple[str, ...]
    jurisdiction: str
    audited: bool
    license_fee: int
    status: str

    def to_dict(self) -> dict:
        return {
            "asset_id": self.asset_id,
            "category": self.category,
            "building_ref": self.building_ref,
            "keywords": list(self.keywords),
            "jurisdiction": self.jurisdiction,
            "audited": self.audited,
            "license_fee": self.license_fee,
            "status": self.status,
        }

    def size_bytes(self) -> int:
        """Serialized entry size; independent of the asset's payload size."""
        return len(encode(self.to_dict()))

    def match_tokens(self) -> set[str]:
        tokens = {k.lower() for k in self.keywords}
        tokens.add(self.category.lower())
        tokens.add(self.building_ref.lower())
        tokens.add(self.jurisdiction.lower())
        return tokens


@dataclass(frozen=True)
class SearchHit:
    asset_id: str
    license_fee: int
    audited: bool


class SearchIndex:
    """Pull-based index over sealed ledger state."""

    def __init__(self, source: Ledger | Callable[[], State] | None):
        self._source = source
        self._entries: dict[str, IndexEntry] = {}
        self.synced_height: int | None = None

    def _sealed_state(self) -> State:
        if self._source is None:
            raise LedgerUnavailable("no ledger configured")
        try:
            if isinstance(self._source, Ledger):
                self.synced_height = self._source.height
                return self._source.state
            return self._source()
        except LedgerUnavailable:
            raise
        except Exception as exc:
            raise LedgerUnavailable(str(exc)) from exc

    def sync_from_ledger(self) -> int:
        """Rebuild the snapshot; returns how many entries changed."""
        state = self._sealed_state()
        fresh: dict[str, IndexEntry] = {}
        for asset_id, asset in state.iter_assets():
            if asset["status"] == "retired":
                continue
            md = asset["metadata"]
            fresh[asset_id] = IndexEntry(
                asset_id=asset_id,
                category=md["category"],
                building_ref=md["building_ref"],
                keywords=tuple(md["keywords"]),
                jurisdiction=md["jurisdiction"],
                audited=md["audited"],
                license_fee=asset["license_fee"],
                status=asset["status"],
            )
        changed = sum(
            1
            for asset_id in set(fresh) | set(self._entries)
            if fresh.get(asset_id) != self._entries.get(asset_id)
        )
        self._entries = fresh
        return changed

    def entries(self) -> dict[str, IndexEntry]:
        return dict(self._entries)

    def query(
        self,
        terms: list[str],
        category: str | None = None,
        audited_only: bool = False,
        jurisdiction: str | None = None,
    ) -> list[SearchHit]:
        """Deterministic ranked lookup.

        With terms, assets matching all of them come first, then partial
        matches by descending match count; ties always break by ascending
        asset id. Without terms, every entry passing the filters is listed.
        """
        wanted = [t.lower() for t in terms if t]
        scored: list[tuple[int, str, IndexEntry]] = []
        for asset_id in sorted(self._entries):
            entry = self._entries[asset_id]
            if category is not None and entry.category != category:
                continue
            if audited_only and not entry.audited:
                continue
            if jurisdiction is not None and entry.jurisdiction != jurisdiction:
                continue
            if not wanted:
                scored.append((0, asset_id, entry))
                continue
            tokens = entry.match_tokens()
            matched = sum(1 for t in wanted if t in tokens)
            if matched == 0:
                continue
            scored.append((-matched, asset_id, entry))
        scored.sort(key=lambda item: (item[0], item[1]))
        return [
            SearchHit(asset_id=entry.asset_id, license_fee=entry.license_fee, audited=entry.audited)
            for _, _, entry in scored
        ]
