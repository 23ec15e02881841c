"""HTTP session API: validation codes, hints, replay determinism."""

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from pressplan.domain import DEFAULT_PRICES
from pressplan.engine import decision_rows, fill_decisions
from pressplan.service import create_app
from pressplan.simulator import (
    DEFAULT_FLEET,
    ScenarioSpec,
    build_scenario,
    build_tables,
    reference_model,
    simulate_episode,
)

SCHEMA = json.loads((Path(__file__).parent.parent / "schemas" / "service.schema.json").read_text())


def check(payload, name):
    import jsonschema

    jsonschema.validate(payload, {"$ref": f"#/$defs/{name}", "$defs": SCHEMA["$defs"]})


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def new_session(client, scenario=None, mode="manual", seed=0):
    r = client.post("/sessions", json={"scenario": scenario or {}, "mode": mode, "seed": seed})
    assert r.status_code == 201, r.text
    body = r.json()
    check(body, "CreateSessionResponse")
    return body["session_id"], body["state"]


def rich_session(client, mode="manual", seed=3):
    """A session advanced into a busy stretch: several varieties, deep queue."""
    sid, state = new_session(client, {"intensity_scale": 1.5}, mode=mode, seed=seed)
    for _ in range(5):
        state = client.post(f"/sessions/{sid}/advance").json()
    assert sum(tr["load_remaining"] for tr in state["queue"]) >= 300
    assert len({tr["variety"] for tr in state["queue"]}) >= 2
    return sid, state


def post_move(client, sid, press_id, truck_id, tonnes):
    return client.post(
        f"/sessions/{sid}/assignments",
        json={"press_id": press_id, "truck_id": truck_id, "tonnes": tonnes},
    )


def first_truck(state, variety=None, min_load=5):
    for tr in state["queue"]:
        if variety is not None and tr["variety"] != variety:
            continue
        if tr["load_remaining"] >= min_load:
            return tr
    raise AssertionError("fixture queue lacks a suitable truck")


def test_fresh_session_starts_empty(client):
    sid, state = new_session(client, seed=1)
    assert state["interval"] == 0
    assert state["payoff"] == 0.0
    assert state["losses"]["total"] == 0.0
    assert all(p["load"] == 0 and not p["processing"] for p in state["presses"])
    assert state["cap_remaining"] == 75
    check(client.get(f"/sessions/{sid}/state").json(), "SessionState")


def test_invalid_scenario_is_rejected(client):
    r = client.post("/sessions", json={"scenario": {"variety_profile": "nope"}})
    assert r.status_code == 422
    body = r.json()
    check(body, "Error")
    assert body["code"] == "invalid-scenario"


def test_unknown_session_is_404(client):
    for method, path in (
        ("get", "/sessions/zz/state"),
        ("get", "/sessions/zz/hint"),
        ("get", "/sessions/zz/results"),
        ("post", "/sessions/zz/advance"),
    ):
        r = getattr(client, method)(path)
        assert r.status_code == 404
        assert r.json()["code"] == "unknown-session"
    r = post_move(client, "zz", 0, 1, 5)
    assert r.status_code == 404


def reject_and_verify_unchanged(client, sid, press_id, truck_id, tonnes, code):
    before = client.get(f"/sessions/{sid}/state").json()
    r = post_move(client, sid, press_id, truck_id, tonnes)
    assert r.status_code >= 400, f"expected rejection, got {r.status_code}"
    body = r.json()
    check(body, "Error")
    assert body["code"] == code, body
    after = client.get(f"/sessions/{sid}/state").json()
    assert after == before, "a rejected move must not change state"
    return body


def test_unknown_ids(client):
    sid, state = rich_session(client)
    tr = first_truck(state)
    reject_and_verify_unchanged(client, sid, 99, tr["truck_id"], 5, "unknown-press")
    reject_and_verify_unchanged(client, sid, 0, 10**6, 5, "unknown-truck")


def test_invalid_tonnage(client):
    sid, state = rich_session(client)
    tr = first_truck(state)
    reject_and_verify_unchanged(client, sid, 0, tr["truck_id"], 7, "invalid-tonnage")
    reject_and_verify_unchanged(client, sid, 0, tr["truck_id"], -5, "invalid-tonnage")


def test_variety_mismatch(client):
    sid, state = rich_session(client)
    varieties = sorted({tr["variety"] for tr in state["queue"]})
    a = first_truck(state, variety=varieties[0])
    b = first_truck(state, variety=varieties[1])
    assert post_move(client, sid, 0, a["truck_id"], 5).status_code == 201
    body = reject_and_verify_unchanged(client, sid, 0, b["truck_id"], 5, "variety-mismatch")
    assert "variety" in body["rule"]


def test_overfill_both_directions(client):
    sid, state = rich_session(client)
    v = first_truck(state, min_load=25)["variety"]
    donors = [tr for tr in state["queue"] if tr["variety"] == v]
    assert sum(tr["load_remaining"] for tr in donors) >= 30
    # press 0 is a 25 t press: leave 5 t of space, then offer 10 t
    filled = 0
    for tr in donors:
        take = min(tr["load_remaining"], 20 - filled)
        if take:
            assert post_move(client, sid, 0, tr["truck_id"], take).status_code == 201
            filled += take
        if filled == 20:
            break
    assert filled == 20
    spare_donor = next(
        tr for tr in client.get(f"/sessions/{sid}/state").json()["queue"]
        if tr["variety"] == v and tr["load_remaining"] >= 10
    )
    body = reject_and_verify_unchanged(client, sid, 0, spare_donor["truck_id"], 10, "overfill")
    assert "space" in body["message"]
    # truck-side: ask one truck for more than it carries
    small = min(
        (tr for tr in client.get(f"/sessions/{sid}/state").json()["queue"] if tr["variety"] != 0),
        key=lambda tr: tr["load_remaining"],
    )
    if small["load_remaining"] < 25:
        target = next(
            p["press_id"]
            for p in client.get(f"/sessions/{sid}/state").json()["presses"]
            if not p["processing"] and (p["load"] == 0 or p["variety"] == small["variety"])
            and p["spare"] > small["load_remaining"]
        )
        body = reject_and_verify_unchanged(
            client, sid, target, small["truck_id"], small["load_remaining"] + 5, "overfill"
        )
        assert "carries only" in body["message"]


def test_press_blocked(client):
    sid, state = rich_session(client)
    v = first_truck(state, min_load=25)["variety"]
    donors = [tr for tr in state["queue"] if tr["variety"] == v]
    filled = 0
    for tr in donors:
        take = min(tr["load_remaining"], 25 - filled)
        r = post_move(client, sid, 0, tr["truck_id"], take)
        assert r.status_code == 201
        filled += take
        if filled == 25:
            state = r.json()
            break
    press = state["presses"][0]
    assert press["processing"] and press["remaining_intervals"] == 4
    tr = first_truck(client.get(f"/sessions/{sid}/state").json(), variety=v)
    reject_and_verify_unchanged(client, sid, 0, tr["truck_id"], 5, "press-blocked")


def test_completing_a_press_pays_price_times_capacity(client):
    sid, state = rich_session(client)
    v = first_truck(state, min_load=25)["variety"]
    donors = [tr for tr in state["queue"] if tr["variety"] == v]
    payoff_before = state["payoff"]
    filled = 0
    for tr in donors:
        take = min(tr["load_remaining"], 25 - filled)
        state = post_move(client, sid, 0, tr["truck_id"], take).json()
        filled += take
        if filled == 25:
            break
    assert state["payoff"] == payoff_before + DEFAULT_PRICES[v - 1] * 25


def test_cap_exceeded(client):
    sid, state = rich_session(client)
    # move tonnage until exactly 75 t are committed this interval
    used = 0
    while used < 75:
        state = client.get(f"/sessions/{sid}/state").json()
        moved = False
        for press in state["presses"]:
            if press["processing"] or press["spare"] == 0:
                continue
            for tr in state["queue"]:
                if press["load"] and tr["variety"] != press["variety"]:
                    continue
                take = min(tr["load_remaining"], press["spare"], 75 - used)
                if take:
                    assert post_move(client, sid, press["press_id"], tr["truck_id"], take).status_code == 201
                    used += take
                    moved = True
                    break
            if moved:
                break
        assert moved, "fixture queue ran out before reaching the cap"
    state = client.get(f"/sessions/{sid}/state").json()
    assert state["cap_remaining"] == 0
    press = next(p for p in state["presses"] if not p["processing"] and p["spare"] >= 5)
    tr = next(
        t for t in state["queue"]
        if (press["load"] == 0 or t["variety"] == press["variety"]) and t["load_remaining"] >= 5
    )
    reject_and_verify_unchanged(client, sid, press["press_id"], tr["truck_id"], 5, "cap-exceeded")


def test_truck_expired(client):
    sid, state = new_session(client, {"intensity_scale": 1.5}, seed=3)
    while not state["queue"]:
        state = client.post(f"/sessions/{sid}/advance").json()
    truck_id = state["queue"][0]["truck_id"]
    for _ in range(8):
        state = client.post(f"/sessions/{sid}/advance").json()
    assert all(tr["truck_id"] != truck_id for tr in state["queue"])
    body = reject_and_verify_unchanged(client, sid, 0, truck_id, 5, "truck-expired")
    assert "no longer" in body["message"]


def test_hint_requires_assisted_mode(client):
    sid, _ = new_session(client, mode="manual", seed=2)
    r = client.get(f"/sessions/{sid}/hint")
    assert r.status_code == 403
    assert r.json()["code"] == "hints-disabled"


def test_hint_rows_are_always_accepted(client):
    sid, state = new_session(client, {"intensity_scale": 1.5}, mode="assisted", seed=8)
    for _ in range(12):
        hint = client.get(f"/sessions/{sid}/hint").json()
        check(hint, "Hint")
        for row in hint["assignments"]:
            r = post_move(client, sid, row["press_id"], row["truck_id"], row["tonnes"])
            assert r.status_code == 201, (row, r.json())
        state = client.post(f"/sessions/{sid}/advance").json()
    assert state["interval"] == 12


def test_hint_driven_day_matches_simulator():
    """Following every hint reproduces the deterministic planner episode."""
    app = create_app()
    client = TestClient(app)
    spec = ScenarioSpec(intensity_scale=0.5)
    model = build_scenario(spec, reference_model())
    tables = build_tables(model)

    def planner(presses, queue, t, rng):
        return decision_rows(queue, fill_decisions(presses, queue, t, tables)[0].controls)

    expected = simulate_episode(model, DEFAULT_FLEET, planner, tables, seed=17)

    sid, state = new_session(client, {"intensity_scale": 0.5}, mode="assisted", seed=17)
    while not state["finished"]:
        hint = client.get(f"/sessions/{sid}/hint").json()
        for row in hint["assignments"]:
            r = post_move(client, sid, row["press_id"], row["truck_id"], row["tonnes"])
            assert r.status_code == 201
        state = client.post(f"/sessions/{sid}/advance").json()
    results = client.get(f"/sessions/{sid}/results").json()
    check(results, "Results")
    assert results["payoff"] == expected.payoff
    assert results["losses"]["total"] == expected.losses.total
    assert results["tonnes_delivered"] == expected.tonnes_delivered
    assert results["tonnes_pressed"] == expected.tonnes_pressed


def test_idle_day_matches_simulator(client):
    sid, state = new_session(client, seed=6)
    while not state["finished"]:
        state = client.post(f"/sessions/{sid}/advance").json()
    results = client.get(f"/sessions/{sid}/results").json()
    noop = lambda presses, queue, t, rng: []
    expected = simulate_episode(reference_model(), DEFAULT_FLEET, noop, None, seed=6)
    assert results["payoff"] == 0.0
    assert results["losses"]["total"] == expected.losses.total
    assert results["tonnes_delivered"] == expected.tonnes_delivered
    assert results["tonnes_rejected"] == expected.tonnes_rejected
    assert results["tonnes_left"] == expected.tonnes_left


def test_results_locked_until_finished(client):
    sid, _ = new_session(client, seed=4)
    r = client.get(f"/sessions/{sid}/results")
    assert r.status_code == 409
    assert r.json()["code"] == "session-active"


def test_finished_session_refuses_moves(client):
    sid, state = new_session(client, seed=5)
    while not state["finished"]:
        state = client.post(f"/sessions/{sid}/advance").json()
    assert client.post(f"/sessions/{sid}/advance").json()["code"] == "session-finished"
    assert post_move(client, sid, 0, 1, 5).json()["code"] == "session-finished"


def test_replay_same_seed_reproduces_payoff(client):
    def drive(sid):
        state = client.get(f"/sessions/{sid}/state").json()
        trace = []
        while not state["finished"]:
            # deterministic scripted player: first fit, oldest truck
            moved = True
            while moved:
                moved = False
                for press in state["presses"]:
                    if press["processing"] or press["spare"] == 0:
                        continue
                    for tr in state["queue"]:
                        if press["load"] and tr["variety"] != press["variety"]:
                            continue
                        take = min(tr["load_remaining"], press["spare"], state["cap_remaining"])
                        if take:
                            r = post_move(client, sid, press["press_id"], tr["truck_id"], take)
                            assert r.status_code == 201
                            state = r.json()
                            trace.append((state["interval"], press["press_id"], tr["truck_id"], take))
                            moved = True
                            break
                    if moved:
                        break
            state = client.post(f"/sessions/{sid}/advance").json()
        results = client.get(f"/sessions/{sid}/results").json()
        return trace, results

    sid1, _ = new_session(client, {"intensity_scale": 1.5}, seed=13)
    sid2, _ = new_session(client, {"intensity_scale": 1.5}, seed=13)
    trace1, res1 = drive(sid1)
    trace2, res2 = drive(sid2)
    assert trace1 == trace2
    assert res1["payoff"] == res2["payoff"]
    assert res1["losses"] == res2["losses"]
    assert res1["payoff"] > 0


def test_event_log_appends_full_history(tmp_path):
    app = create_app(event_log_dir=tmp_path)
    client = TestClient(app)
    sid, state = new_session(client, {"intensity_scale": 1.5}, mode="assisted", seed=3)
    hint = client.get(f"/sessions/{sid}/hint").json()
    for row in hint["assignments"][:1]:
        post_move(client, sid, row["press_id"], row["truck_id"], row["tonnes"])
    client.post(f"/sessions/{sid}/advance")
    lines = [json.loads(l) for l in (tmp_path / f"{sid}.jsonl").read_text().splitlines()]
    events = [l["event"] for l in lines]
    assert events[0] == "created"
    assert "arrivals" in events
    assert events.count("advance") == 1
    if hint["assignments"]:
        assert "assignment" in events
