"""HTTP service tests: every endpoint, happy path and error mapping.

The client runs the app in process; no socket is opened.
"""

from __future__ import annotations

import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore", DeprecationWarning)
    from fastapi.testclient import TestClient

from ldc import __version__
from ldc.circuits import metrics, parse_netlist
from ldc.service import create_app
from ldc.stdlib import catalogue

LEN_OF = "(compose (len) (proj 1 1))"

INSTANCE = "KPT1 n=3 items=3 level=1\n5: 1 4\n6: 2\n7: 3 5\n"


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    reply = client.get("/health")
    assert reply.status_code == 200
    assert reply.json() == {"status": "ok", "version": __version__}


def test_stdlib_listing(client):
    entries = client.get("/stdlib").json()["entries"]
    assert [e["name"] for e in entries] == sorted(catalogue())
    by_name = {e["name"]: e for e in entries}
    assert by_name["add"]["arity"] == 2
    assert by_name["add"]["kind"] == "AC0"
    assert by_name["counter2"]["kind"] == "LD"
    assert by_name["counter2"]["level"] == 2


def test_eval_endpoint(client):
    reply = client.post("/eval", json={"term": LEN_OF, "args": [13]})
    assert reply.status_code == 200
    body = reply.json()
    assert body["value"] == 4
    assert body["records"] == []

    bad = client.post("/eval", json={"term": "(nonsense)", "args": []})
    assert bad.status_code == 422
    assert "nonsense" in bad.json()["detail"]

    wrong_arity = client.post("/eval", json={"term": LEN_OF, "args": [1, 2]})
    assert wrong_arity.status_code == 422


def test_compile_endpoint(client):
    reply = client.post("/compile", json={"term": LEN_OF, "lengths": [8, 16]})
    assert reply.status_code == 200
    circuits = reply.json()["circuits"]
    assert [c["n"] for c in circuits] == [8, 16]
    for c in circuits:
        parsed = parse_netlist(c["netlist"])
        m = metrics(parsed)
        assert (m.size, m.depth) == (c["size"], c["depth"])

    empty = client.post("/compile", json={"term": LEN_OF, "lengths": []})
    assert empty.status_code == 422


def test_analyze_endpoint(client):
    req = {
        "term": LEN_OF,
        "lengths": [8, 16, 32],
        "size_c": 16.0,
        "size_deg": 1,
    }
    reply = client.post("/analyze", json=req)
    assert reply.status_code == 200
    body = reply.json()
    assert body["kind"] == "AC0"
    assert body["passed"]
    depths = {r["depth"] for r in body["rows"]}
    assert len(depths) == 1

    tight = client.post("/analyze", json={**req, "size_c": 0.001}).json()
    assert not tight["passed"]
    assert any(r["why"] for r in tight["rows"])


def test_analyze_level_override(client):
    term = (catalogue()["counter2"].term, "counter2")
    from ldc.terms import emit_term

    reply = client.post(
        "/analyze",
        json={
            "term": emit_term(term[0]),
            "lengths": [16, 256],
            "level": 1,
            "depth_c": 2000.0,
            "depth_deg": 2,
            "size_c": 40.0,
            "size_deg": 1,
        },
    )
    body = reply.json()
    assert body["kind"] == "LD"
    assert body["level"] == 1


def test_difftest_endpoint(client):
    reply = client.post(
        "/difftest",
        json={"names": ["complement"], "lengths": [8], "trials": 10, "seed": 4},
    )
    assert reply.status_code == 200
    body = reply.json()
    assert body["passed"]
    modes = {r["mode"] for r in body["rows"]}
    assert modes == {"exhaustive", "random"}

    unknown = client.post("/difftest", json={"names": ["nope"], "lengths": [8]})
    assert unknown.status_code == 422


def test_fmt_endpoint(client):
    reply = client.post("/fmt", json={"text": "(compose(len)(proj 1 1))"})
    assert reply.status_code == 200
    assert reply.json() == {
        "kind": "term",
        "ok": True,
        "canonical": LEN_OF + "\n",
    }

    net = client.post("/compile", json={"term": LEN_OF, "lengths": [4]})
    netlist = net.json()["circuits"][0]["netlist"]
    reply = client.post("/fmt", json={"text": netlist})
    assert reply.json()["kind"] == "netlist"
    assert reply.json()["ok"]
    assert reply.json()["canonical"] == netlist

    garbage = client.post("/fmt", json={"text": "((("})
    assert garbage.status_code == 422


def test_game_run_endpoint(client):
    reply = client.post("/game/run", json={"instance": INSTANCE, "items": [5, 6]})
    assert reply.status_code == 200
    body = reply.json()
    assert body["accepted_round"] == 1
    assert body["witness"] == 4
    assert body["rounds"] == [{"round": 1, "candidate": 578, "counter": None}]

    lost = client.post(
        "/game/run",
        json={"instance": INSTANCE, "items": [5, 6], "strategy": "zero", "k": 2},
    ).json()
    assert lost["accepted_round"] is None
    assert lost["rounds"][0]["counter"] == 530

    bad_strategy = client.post(
        "/game/run",
        json={"instance": INSTANCE, "items": [5, 6], "strategy": "psychic"},
    )
    assert bad_strategy.status_code == 422

    bad_instance = client.post(
        "/game/run", json={"instance": "KPT9\n", "items": [5, 6]}
    )
    assert bad_instance.status_code == 422


def test_game_advice_and_verify(client):
    reply = client.post("/game/advice", json={"instance": INSTANCE, "l": 2})
    assert reply.status_code == 200
    body = reply.json()
    assert body["passed"]
    assert not body["degraded"]
    assert body["rows"][0]["size"] == 3
    assert body["pack"].startswith("PACK1 n=3 l=2 ")

    check = client.post(
        "/game/verify", json={"instance": INSTANCE, "pack": body["pack"]}
    ).json()
    assert check["passed"]
    assert [r["item"] for r in check["rows"]] == [5, 6, 7]
    assert all(r["ok"] for r in check["rows"])

    mangled = client.post(
        "/game/verify", json={"instance": INSTANCE, "pack": "PACK1 nope\n"}
    )
    assert mangled.status_code == 422
