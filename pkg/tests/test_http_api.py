import pytest
from fastapi.testclient import TestClient

from conftest import data_text
from prodkb.http_api import create_app
from prodkb.service import KbService


@pytest.fixture
def client():
    service = KbService.with_packaged_data()
    service.import_turtle(data_text("fixtures/demo_kb.ttl"), source_url="demo")
    service.add_snapshot("dbpedia-snapshot",
                         data_text("fixtures/dbpedia_snapshot.ttl"))
    return TestClient(create_app(service))


@pytest.fixture
def ingested(client):
    resp = client.post("/documents", json={
        "payload": data_text("fixtures/guerlain.conllu"),
        "sourceUrl": "http://blog.example/maquillage",
        "date": "2016-04-25",
    })
    assert resp.status_code == 200
    return client, resp.json()


class TestDocuments:
    def test_ingest_returns_counts(self, ingested):
        _, body = ingested
        assert body["documentId"].startswith("doc-")
        assert body["mentionCount"] == 2
        assert body["candidateCount"] == 2
        assert body["reducedPipeline"] is False

    def test_empty_payload_422(self, client):
        resp = client.post("/documents", json={"payload": "  "})
        assert resp.status_code == 422

    def test_mentions_view(self, ingested):
        client, body = ingested
        resp = client.get(f"/documents/{body['documentId']}/mentions")
        assert resp.status_code == 200
        view = resp.json()
        surfaces = {s["surface"] for s in view["spans"]}
        assert surfaces == {"Guerlain", "La petite robe noire"}
        colors = {s["color"] for s in view["spans"]}
        assert colors <= {"red", "green"}
        assert view["colors"]["Brand"] == "red"
        assert view["panel"]["Marque"] == [{"surface": "Guerlain", "count": 1}]

    def test_mentions_unknown_doc_404(self, client):
        assert client.get("/documents/doc-9999/mentions").status_code == 404


class TestQueueAndDecisions:
    def test_queue_counts(self, ingested):
        client, body = ingested
        queue = client.get("/queue").json()
        assert len(queue) == 1
        assert (queue[0]["decided"], queue[0]["total"]) == (0, 2)

    def test_pending_items_carry_context(self, ingested):
        client, body = ingested
        items = client.get(f"/documents/{body['documentId']}/pending").json()
        assert len(items) == 2
        prompts = {i["prompt"] for i in items}
        assert "Guerlain est de type Marque." in prompts
        for item in items:
            assert item["sentence"]
            assert set(item["options"]) >= {"accept", "reject"}

    def test_decision_flow(self, ingested):
        client, body = ingested
        items = client.get(f"/documents/{body['documentId']}/pending").json()
        key = next(i["tripleKey"] for i in items if "Guerlain" in i["prompt"])
        resp = client.post(f"/triples/{key}/decision", json={"decision": "accept"})
        assert resp.status_code == 200
        assert resp.json()["decided"] == 1
        # second decision on the same triple conflicts
        resp = client.post(f"/triples/{key}/decision", json={"decision": "reject"})
        assert resp.status_code == 409
        # the accepted typing is now queryable
        resp = client.post("/query", json={
            "query": "SELECT ?b WHERE { ?b rdf:type gr:Brand }"})
        values = {row["b"]["value"] for row in resp.json()["rows"]}
        assert "http://example.org#Guerlain" in values

    def test_unknown_key_404(self, client):
        resp = client.post("/triples/feedfeedfeedfeed/decision",
                           json={"decision": "accept"})
        assert resp.status_code == 404


class TestBrowse:
    def test_entities(self, client):
        resp = client.get("/entities", params={"type": "Marque", "initial": "L"})
        assert resp.status_code == 200
        assert {"Lancôme", "Lanvin", "La Roche-Posay"} <= set(resp.json()["L"])

    def test_entities_unknown_type(self, client):
        assert client.get("/entities", params={"type": "Nope"}).status_code == 422

    def test_graph(self, client):
        from urllib.parse import quote

        resp = client.get(f"/graph/{quote('http://example.org#La_Vie_est_Belle', safe='')}",
                          params={"depth": 1})
        assert resp.status_code == 200
        labels = {n["label"] for n in resp.json()["nodes"]}
        assert {"geraniol", "linalool"} <= labels

    def test_graph_unknown_404(self, client):
        from urllib.parse import quote

        resp = client.get(f"/graph/{quote('http://example.org#Missing', safe='')}")
        assert resp.status_code == 404

    def test_query_errors(self, client):
        assert client.post("/query", json={"query": "SELECT ?x WHERE { ?x ?y }"}
                           ).status_code == 400
        assert client.post("/query", json={
            "query": "SELECT ?x WHERE { ?x ?y ?z OPTIONAL { ?a ?b ?c } }"}
        ).status_code == 422
