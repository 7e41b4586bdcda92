"""REST endpoints over a KbService instance.

POST /documents            ingest a payload (raw text, HTML or CoNLL-U)
GET  /queue                articles with pending/decided counts
GET  /documents/{id}/pending
POST /triples/{key}/decision
GET  /entities?type=&initial=
GET  /graph/{iri}?depth=
POST /query
GET  /documents/{id}/mentions
"""

from __future__ import annotations

import datetime as dt
from urllib.parse import unquote

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import store
from .query import QuerySyntaxError, UnsupportedFeature
from .service import KbService, UnknownType, UnparseablePayload
from .store import term_to_json


class IngestRequest(BaseModel):
    payload: str
    sourceUrl: str = ""
    date: str | None = None
    kind: str = "auto"


class DecisionRequest(BaseModel):
    decision: str
    iri: str | None = None


class QueryRequest(BaseModel):
    query: str


def create_app(service: KbService) -> FastAPI:
    app = FastAPI(title="prodkb", version="0.1.0")

    @app.post("/documents")
    def ingest(req: IngestRequest):
        try:
            date = dt.date.fromisoformat(req.date) if req.date else None
            result = service.ingest(req.payload, req.sourceUrl, date, req.kind)
        except UnparseablePayload as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return result.to_json()

    @app.get("/queue")
    def queue():
        return [e.to_json() for e in service.pending_by_article()]

    @app.get("/documents/{doc_id}/pending")
    def pending(doc_id: str):
        try:
            return [item.to_json() for item in service.pending_triples(doc_id)]
        except store.NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.post("/triples/{key}/decision")
    def decide(key: str, req: DecisionRequest):
        try:
            entry = service.decide(key, req.decision, req.iri)
        except store.NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except store.AlreadyDecided as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return entry.to_json()

    @app.get("/entities")
    def entities(type: str, initial: str | None = None):
        try:
            return service.entity_index(type, initial)
        except UnknownType as exc:
            raise HTTPException(status_code=422, detail=f"unknown type {exc}")

    @app.get("/graph/{iri:path}")
    def graph(iri: str, depth: int = 1):
        # clients must percent-encode the IRI ("#" would otherwise be eaten
        # as a fragment); tolerate an extra encoding level
        if "%" in iri:
            iri = unquote(iri)
        try:
            return service.neighborhood(iri, depth).to_json()
        except store.NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.post("/query")
    def query(req: QueryRequest):
        try:
            projection, bindings = service.query(req.query)
        except UnsupportedFeature as exc:
            raise HTTPException(status_code=422, detail=f"unsupported feature: {exc}")
        except QuerySyntaxError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {
            "vars": projection,
            "rows": [{v: term_to_json(b[v]) for v in projection} for b in bindings],
        }

    @app.get("/documents/{doc_id}/mentions")
    def mentions(doc_id: str):
        try:
            return service.mentions_view(doc_id)
        except store.NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    return app
