"""HTTP surface for the search platform and the datastore gateway.

Thin adapters over the in-process services: queries hit the search index,
the handoff endpoint resolves an asset id to its contract address and fee,
and the data endpoints carry signed consumer requests to the gateway.
Record payload bytes travel hex-encoded.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, HTTPException, Query, Request

from bda.errors import LedgerError
from bda.gateway import DatastoreGateway
from bda.search import SearchIndex

_HTTP_STATUS = {
    "BadSignature": 401,
    "NoValidPayment": 402,
    "NotOwner": 403,
    "UnknownAsset": 404,
    "UnknownLicense": 404,
    "UnknownAccount": 404,
    "PayloadDeleted": 410,
    "AssetRetired": 410,
    "UnknownQueryField": 422,
    "MalformedRecord": 422,
}


def _view_to_json(view: dict[str, Any]) -> dict[str, Any]:
    return {
        key: value.hex() if isinstance(value, bytes) else value for key, value in view.items()
    }


def create_app(index: SearchIndex, gateway: DatastoreGateway) -> FastAPI:
    app = FastAPI(title="building-data-asset services")

    def _error(exc: LedgerError) -> HTTPException:
        name = type(exc).__name__
        return HTTPException(
            status_code=_HTTP_STATUS.get(name, 400),
            detail={"error": name, "message": str(exc)},
        )

    @app.get("/search")
    def search(
        q: str = "",
        category: str | None = None,
        audited: bool = False,
        jurisdiction: str | None = None,
    ) -> list[dict[str, Any]]:
        hits = index.query(
            q.split(), category=category, audited_only=audited, jurisdiction=jurisdiction
        )
        return [
            {"asset_id": h.asset_id, "license_fee": h.license_fee, "audited": h.audited}
            for h in hits
        ]

    @app.get("/search-handoff")
    def search_handoff(asset_id: str) -> dict[str, Any]:
        asset = gateway.ledger.state.asset(asset_id)
        if asset is None:
            raise HTTPException(status_code=404, detail={"error": "UnknownAsset"})
        return {
            "asset_id": asset_id,
            "license_fee": asset["license_fee"],
            "audited": asset["metadata"]["audited"],
            "status": asset["status"],
        }

    @app.post("/data/request")
    async def data_request(request: Request) -> dict[str, Any]:
        body = await request.json()
        try:
            view, receipt = gateway.request_data(
                consumer=body["consumer"],
                asset_id=body["asset_id"],
                payment_id=body["payment_id"],
                signature=body["signature"],
                query=body.get("query"),
            )
        except LedgerError as exc:
            raise _error(exc) from exc
        except KeyError as exc:
            raise HTTPException(status_code=422, detail=f"missing field {exc}") from exc
        return {"view": _view_to_json(view), "license": receipt.to_dict()}

    @app.get("/data/read")
    def data_read(
        consumer: str = Query(...), license_id: str = Query(...), signature: str = Query(...)
    ) -> dict[str, Any]:
        try:
            view = gateway.read_with_license(consumer, license_id, signature)
        except LedgerError as exc:
            raise _error(exc) from exc
        return {"view": _view_to_json(view)}

    return app
