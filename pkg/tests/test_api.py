import json

import pytest
import requests

from conftest import make_record
from evigraph import AppConfig, Engine
from evigraph.api import ApiServer
from evigraph.export import encode_edge_key


@pytest.fixture()
def server(engine: Engine):
    srv = ApiServer(engine, "127.0.0.1", 0)
    import threading

    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    yield srv
    srv.shutdown()
    srv.server_close()


def ingest(server, record):
    return requests.post(
        f"{server.url}/subjects/{record['subject_id']}/records", json=record, timeout=10
    )


def test_health(server):
    response = requests.get(f"{server.url}/health", timeout=10)
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok"
    assert body["schema_version"] == 1


def test_subjects_empty_then_sorted(server):
    assert requests.get(f"{server.url}/subjects", timeout=10).json()["subjects"] == []
    ingest(server, make_record("s2", 0).to_json())
    ingest(server, make_record("s1", 0, diagnoses=["sepsis"]).to_json())
    body = requests.get(f"{server.url}/subjects", timeout=10).json()
    assert body["subjects"] == [
        {"subject_id": "s1", "visits": 1},
        {"subject_id": "s2", "visits": 1},
    ]


def test_record_ingest_versions_and_conflicts(server):
    first = ingest(server, make_record("s1", 0, diagnoses=["hypertension"]).to_json())
    assert first.status_code == 200
    assert first.json()["version"] == 1
    second = ingest(server, make_record("s1", 1, diagnoses=["hypertension"]).to_json())
    assert second.json()["version"] == 2
    duplicate = ingest(server, make_record("s1", 2, record_id="s1-v0").to_json())
    assert duplicate.status_code == 409
    regression = ingest(server, make_record("s1", 1, record_id="s1-late").to_json())
    assert regression.status_code == 422


def test_graph_export_and_tau_validation(server):
    for v in range(3):
        ingest(server, make_record("s1", v, medications=["warfarin"]).to_json())
    ok = requests.get(f"{server.url}/subjects/s1/graph?variant=historical", timeout=10)
    assert ok.status_code == 200
    edges = ok.json()["edges"]
    assert edges and all("confidence" not in e for e in edges)

    filtered = requests.get(
        f"{server.url}/subjects/s1/graph?variant=filtered&tau=0.8", timeout=10
    )
    assert filtered.status_code == 200
    assert all(e["confidence"] >= 0.8 for e in filtered.json()["edges"])

    assert (
        requests.get(f"{server.url}/subjects/s1/graph?variant=filtered&tau=1.5", timeout=10).status_code
        == 400
    )
    assert (
        requests.get(f"{server.url}/subjects/s1/graph?variant=historical&tau=0.5", timeout=10).status_code
        == 400
    )
    assert (
        requests.get(f"{server.url}/subjects/s1/graph?variant=filtered", timeout=10).status_code
        == 400
    )
    assert (
        requests.get(f"{server.url}/subjects/ghost/graph?variant=latest", timeout=10).status_code
        == 404
    )


def test_export_stability(server):
    ingest(server, make_record("s1", 0, diagnoses=["sepsis"], medications=["warfarin"]).to_json())
    url = f"{server.url}/subjects/s1/graph?variant=confidence_aware"
    assert requests.get(url, timeout=10).content == requests.get(url, timeout=10).content


def test_color_mapping_totality(server):
    ingest(
        server,
        make_record(
            "s1", 0, diagnoses=["sepsis"], medications=["warfarin"], procedures=["dialysis"]
        ).to_json(),
    )
    nodes = requests.get(
        f"{server.url}/subjects/s1/graph?variant=historical", timeout=10
    ).json()["nodes"]
    roles = {n["entity_type"]: n["color_role"] for n in nodes}
    assert roles["Subject"] == "red"
    assert roles["Visit"] == "white"
    assert roles["Disease"] == "brown"
    assert roles["Medication"] == "pink"
    assert roles["Procedure"] == "green"
    assert all(n["color_role"] in {"red", "white", "brown", "green", "pink", "gray"} for n in nodes)


def test_rationale_endpoint(server):
    ingest(server, make_record("s1", 0, medications=["warfarin"]).to_json())
    key = encode_edge_key("s1:visit:0|prescribed|M_WARF")
    response = requests.get(f"{server.url}/subjects/s1/edges/{key}/rationale", timeout=10)
    assert response.status_code == 200
    payload = response.json()
    for field in ("confidence", "rationale", "supporting", "conflicting", "evidence"):
        assert field in payload
    assert payload["evidence"] == ["s1-v0"]
    graph = requests.get(
        f"{server.url}/subjects/s1/graph?variant=confidence_aware", timeout=10
    ).json()
    edge_keys = {e["key"] for e in graph["edges"]}
    for supporting_key in payload["supporting"]:
        assert supporting_key in edge_keys

    missing = encode_edge_key("a|prescribed|b")
    assert (
        requests.get(f"{server.url}/subjects/s1/edges/{missing}/rationale", timeout=10).status_code
        == 404
    )


def test_qa_endpoint_modes_and_compare(server):
    for v in range(4):
        ingest(server, make_record("s1", v, medications=["warfarin"]).to_json())
    single = requests.post(
        f"{server.url}/qa",
        json={"subject_id": "s1", "question": "warfarin?", "mode": "confidence_aware", "top_k": 3},
        timeout=10,
    )
    assert single.status_code == 200
    exchange = single.json()
    assert len(exchange["evidence"]) <= 3
    assert all("confidence" in e for e in exchange["evidence"])

    comparison = requests.post(
        f"{server.url}/qa",
        json={"subject_id": "s1", "question": "warfarin?", "compare": True, "tau": 0.8},
        timeout=10,
    )
    assert comparison.status_code == 200
    body = comparison.json()
    assert {"baseline", "confidence_aware", "evidence_diff"} <= set(body)

    repeated = requests.post(
        f"{server.url}/qa",
        json={"subject_id": "s1", "question": "warfarin?", "mode": "baseline"},
        timeout=10,
    )
    again = requests.post(
        f"{server.url}/qa",
        json={"subject_id": "s1", "question": "warfarin?", "mode": "baseline"},
        timeout=10,
    )
    assert repeated.json()["answer"] == again.json()["answer"]

    assert (
        requests.post(
            f"{server.url}/qa", json={"subject_id": "ghost", "question": "?"}, timeout=10
        ).status_code
        == 404
    )


def test_whatif_endpoint_uses_bundled_scenarios(server):
    response = requests.post(f"{server.url}/whatif/run", json={}, timeout=30)
    assert response.status_code == 200
    results = response.json()["results"]
    names = {r["name"] for r in results}
    assert "noisy medication" in names
    noisy = next(r for r in results if r["name"] == "noisy medication")
    assert any("mentioned" in k for k in noisy["evidence_diff"]["baseline_only"])


def test_eval_run_returns_report_id(server):
    for sid, sick in (("a-1", True), ("b-1", False)):
        for v in range(3):
            diagnoses = ["sepsis"] if sick else ["hypertension"]
            ingest(server, make_record(sid, v, diagnoses=diagnoses).to_json())
    response = requests.post(
        f"{server.url}/eval/run",
        json={
            "labels": {"a-1": 1, "b-1": 0},
            "risk_concepts": ["D_SEPSIS"],
            "taus": [0.0, 0.8],
        },
        timeout=30,
    )
    assert response.status_code == 200
    body = response.json()
    assert body["report_id"]
    assert len(body["rows"]) == 4  # baseline + confidence_aware + two taus


def test_read_endpoints_leave_versions_unchanged(server):
    ingest(server, make_record("s1", 0, medications=["warfarin"]).to_json())
    url = f"{server.url}/subjects/s1/graph?variant=historical"
    before = requests.get(url, timeout=10).json()["version"]
    for _ in range(3):
        requests.get(url, timeout=10)
        requests.get(f"{server.url}/subjects", timeout=10)
    assert requests.get(url, timeout=10).json()["version"] == before


def test_api_key_guard(engine: Engine):
    import threading

    from dataclasses import replace

    engine.config = replace(engine.config, api_key="secret")
    srv = ApiServer(engine, "127.0.0.1", 0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    try:
        assert requests.get(f"{srv.url}/subjects", timeout=10).status_code == 401
        assert requests.get(f"{srv.url}/health", timeout=10).status_code == 200
        ok = requests.get(f"{srv.url}/subjects", headers={"X-API-Key": "secret"}, timeout=10)
        assert ok.status_code == 200
    finally:
        srv.shutdown()
        srv.server_close()
