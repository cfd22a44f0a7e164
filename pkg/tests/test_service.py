import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from humotion import data_path, default_model
from humotion.kinematics import CANONICAL_JOINT_ORDER
from humotion.motions import (
    Keyframe,
    Motion,
    joint_order_hash,
    motion_to_dict,
    motion_to_json_bytes,
)
from humotion.service import create_app, etag_of


@pytest.fixture()
def client(tmp_path):
    app = create_app(tmp_path)
    with TestClient(app) as c:
        c.data_dir = tmp_path
        yield c


def two_frame_motion(duration=1.0) -> Motion:
    p0 = np.zeros(20)
    p1 = np.zeros(20)
    p1[2] = 0.6
    p1[11] = 1.1
    v1 = np.zeros(20)
    v1[2] = 0.2
    return Motion(
        name="two_frame",
        precondition="standing",
        keyframes=[
            Keyframe(duration=duration, positions=p0, velocities=np.zeros(20), efforts=np.full(20, 0.5)),
            Keyframe(duration=0.0, positions=p1, velocities=v1, efforts=np.full(20, 0.5)),
        ],
    )


# model -----------------------------------------------------------------


def test_model_endpoint_describes_the_robot(client):
    doc = client.get("/api/model").json()
    assert doc["apiVersion"] == 1
    assert doc["jointOrder"] == list(CANONICAL_JOINT_ORDER)
    assert doc["jointOrderHash"] == joint_order_hash()
    assert len(doc["joints"]) == 20
    assert doc["totalMass"] == pytest.approx(6.6)
    by_name = {j["name"]: j for j in doc["joints"]}
    assert by_name["lKneePitch"]["axis"] == [0.0, 1.0, 0.0]
    assert by_name["lHipYaw"]["axis"] == [0.0, 0.0, 1.0]
    assert by_name["lAnkleRoll"]["axis"] == [1.0, 0.0, 0.0]
    assert by_name["lKneePitch"]["limits"][0] == 0.0
    link_names = {l["name"] for l in doc["links"]}
    assert {"trunk", "lSole", "rSole"} <= link_names
    assert doc["dims"]["thighLength"] == pytest.approx(0.21)


# conversion ------------------------------------------------------------


def test_convert_identity_echoes_the_pose(client):
    positions = [0.01] * 20
    positions[4] = positions[7] = -0.01  # elbows fold backwards only
    r = client.post(
        "/api/convert",
        json={"from": "joint", "to": "joint", "pose": {"positions": positions}},
    )
    assert r.status_code == 200
    body = r.json()
    assert body["pose"]["positions"] == positions
    assert body["clamped"] is False

    # out-of-limit input comes back clamped and flagged, not echoed
    bent = dict(positions=[0.0] * 19 + [9.0])
    body = client.post(
        "/api/convert", json={"from": "joint", "to": "joint", "pose": bent}
    ).json()
    assert body["clamped"] is True
    assert body["pose"]["positions"][19] < 9.0


def test_convert_round_trip_through_abstract(client, rng):
    model = default_model()
    lo = np.array([j.limits[0] for j in model.joints])
    hi = np.array([j.limits[1] for j in model.joints])
    q = lo + (hi - lo) * rng.uniform(0.05, 0.95, 20)
    first = client.post(
        "/api/convert",
        json={"from": "joint", "to": "abstract", "pose": {"positions": list(map(float, q))}},
    ).json()
    second = client.post(
        "/api/convert", json={"from": "abstract", "to": "joint", "pose": first["pose"]}
    ).json()
    back = np.array(second["pose"]["positions"])
    assert np.max(np.abs(back - q)) < 1e-10


def test_convert_flags_unreachable_inverse_targets(client):
    halt = client.post(
        "/api/convert",
        json={"from": "joint", "to": "inverse", "pose": {"positions": [0.0] * 20}},
    ).json()
    pose = halt["pose"]
    assert halt["clamped"] is False
    pose["leftLeg"]["position"] = [0.0, 0.055, -2.0]
    r = client.post("/api/convert", json={"from": "inverse", "to": "joint", "pose": pose})
    assert r.status_code == 200
    assert r.json()["clamped"] is True


def test_convert_reports_missing_fields(client):
    r = client.post("/api/convert", json={"from": "joint", "to": "abstract", "pose": {}})
    assert r.status_code == 400
    assert "positions" in r.json()["detail"]

    r = client.post(
        "/api/convert",
        json={"from": "joint", "to": "abstract", "pose": {"positions": [0.0] * 19}},
    )
    assert r.status_code == 400

    r = client.post("/api/convert", json={"from": "sideways", "to": "joint", "pose": {}})
    assert r.status_code == 400

    r = client.post("/api/convert", json={"to": "joint", "pose": {}})
    assert r.status_code == 400
    fields = {e["field"] for e in r.json()["errors"]}
    assert any("from" in f for f in fields)


# interpolation ---------------------------------------------------------


def test_interpolate_two_keyframes_at_100hz(client):
    doc = motion_to_dict(two_frame_motion(1.0))
    r = client.post("/api/interpolate", json={"motion": doc, "rateHz": 100.0})
    assert r.status_code == 200
    body = r.json()
    assert len(body["samples"]) == 101
    assert body["duration"] == 1.0
    first, last = body["samples"][0], body["samples"][-1]
    assert first["t"] == 0.0 and last["t"] == 1.0
    assert first["positions"] == [0.0] * 20
    assert last["positions"][2] == 0.6
    assert last["velocities"][2] == 0.2
    assert len(first["links"]) == 23
    assert "position" in first["links"]["lSole"]
    assert len(first["links"]["lSole"]["orientation"]) == 4


def test_interpolate_rejects_bad_requests(client):
    doc = motion_to_dict(two_frame_motion())
    r = client.post("/api/interpolate", json={"motion": doc, "rateHz": 0.0})
    assert r.status_code == 400
    r = client.post("/api/interpolate", json={"motion": doc, "rateHz": 5000.0})
    assert r.status_code == 400
    bad = motion_to_dict(two_frame_motion())
    bad["frames"][0]["efforts"][0] = 2.0
    r = client.post("/api/interpolate", json={"motion": bad, "rateHz": 100.0})
    assert r.status_code == 400
    assert "frames[0]" in r.json()["detail"]


# motion library --------------------------------------------------------


def test_motion_list_includes_shipped_documents(client):
    body = client.get("/api/motions").json()
    names = {m["name"] for m in body["motions"]}
    assert {"getup_prone", "getup_supine", "kick", "wave"} <= names
    prone = next(m for m in body["motions"] if m["name"] == "getup_prone")
    assert prone["duration"] == pytest.approx(3.0)
    assert prone["precondition"] == "prone"
    assert len(prone["etag"]) == 64


def test_unknown_motion_is_404(client):
    assert client.get("/api/motions/moonwalk").status_code == 404


def test_put_get_round_trips_bytes_exactly(client):
    # deliberately non-canonical formatting must come back verbatim
    doc = motion_to_dict(two_frame_motion())
    raw = ("\n" + json.dumps(doc, indent=7) + "\n\n").encode()
    r = client.put("/api/motions/two_frame", content=raw)
    assert r.status_code == 200
    assert r.json()["etag"] == etag_of(raw)
    got = client.get("/api/motions/two_frame")
    assert got.content == raw
    assert got.headers["etag"].strip('"') == etag_of(raw)
    stored = client.data_dir / "motions" / "two_frame.json"
    assert stored.read_bytes() == raw


def test_put_validates_the_document(client):
    doc = motion_to_dict(two_frame_motion())
    doc["frames"][1]["efforts"][4] = 1.2
    r = client.put("/api/motions/two_frame", content=json.dumps(doc).encode())
    assert r.status_code == 400
    assert "frames[1]" in r.json()["detail"]

    ok = motion_to_dict(two_frame_motion())
    r = client.put("/api/motions/other_name", content=json.dumps(ok).encode())
    assert r.status_code == 400
    assert "two_frame" in r.json()["detail"]

    r = client.put("/api/motions/sp%20ace", content=json.dumps(ok).encode())
    assert r.status_code == 400

    r = client.put("/api/motions/two_frame", content=b"{nope")
    assert r.status_code == 400


def test_if_match_guards_overwrites(client):
    raw = motion_to_json_bytes(two_frame_motion())
    client.put("/api/motions/two_frame", content=raw)
    current = etag_of(raw)

    edited = motion_to_dict(two_frame_motion())
    edited["frames"][0]["duration"] = 2.0
    edited_raw = motion_to_json_bytes_from_dict(edited)

    r = client.put(
        "/api/motions/two_frame", content=edited_raw, headers={"If-Match": f'"{current}"'}
    )
    assert r.status_code == 200

    r = client.put(
        "/api/motions/two_frame", content=raw, headers={"If-Match": f'"{current}"'}
    )
    assert r.status_code == 412
    assert r.json()["currentEtag"] == etag_of(edited_raw)

    r = client.put("/api/motions/brand_new", content=raw, headers={"If-Match": '"x"'})
    assert r.status_code == 412


def motion_to_json_bytes_from_dict(doc: dict) -> bytes:
    return (json.dumps(doc, indent=2) + "\n").encode()


def test_saving_over_a_shipped_motion_shadows_it(client):
    with data_path("motions/wave.json") as p:
        original = p.read_bytes()
    doc = json.loads(original)
    doc["frames"][0]["duration"] = 0.5
    replacement = motion_to_json_bytes_from_dict(doc)
    client.put("/api/motions/wave", content=replacement)
    assert client.get("/api/motions/wave").content == replacement
    with data_path("motions/wave.json") as p:
        assert p.read_bytes() == original


# configuration ---------------------------------------------------------


def test_config_dump_and_single_key(client):
    body = client.get("/api/config").json()
    keys = {e["key"] for e in body["entries"]}
    assert "gait.frequency" in keys and "sim.timestep" in keys
    one = client.get("/api/config/gait.frequency").json()
    assert one["value"] == 1.6
    assert one["min"] == 0.2 and one["max"] == 3.0
    assert client.get("/api/config/gait.nope").status_code == 404


def test_config_put_validates_and_persists(client, tmp_path):
    r = client.put("/api/config/gait.frequency", json={"value": 2.0})
    assert r.status_code == 200
    assert r.json()["changed"] is True
    assert client.get("/api/config/gait.frequency").json()["value"] == 2.0

    r = client.put("/api/config/gait.frequency", json={"value": 2.0})
    assert r.json()["changed"] is False

    assert client.put("/api/config/gait.frequency", json={"value": 99.0}).status_code == 409
    assert client.put("/api/config/gait.frequency", json={"value": "fast"}).status_code == 400
    assert client.put("/api/config/gait.nope", json={"value": 1.0}).status_code == 404
    assert client.get("/api/config/gait.frequency").json()["value"] == 2.0

    # a fresh service over the same data directory sees the tuned value
    with TestClient(create_app(client.data_dir)) as second:
        assert second.get("/api/config/gait.frequency").json()["value"] == 2.0


# preview stream --------------------------------------------------------


def test_preview_loads_and_scrubs_deterministically(client):
    with client.websocket_connect("/ws/preview") as ws:
        ws.send_json({"cmd": "load", "name": "wave", "rateHz": 50.0})
        loaded = ws.receive_json()
        assert loaded["type"] == "loaded"
        assert loaded["duration"] == pytest.approx(2.4)
        frame0 = ws.receive_json()
        assert frame0["type"] == "frame"
        assert frame0["t"] == 0.0 and frame0["playing"] is False

        ws.send_json({"cmd": "scrub", "t": 1.0})
        a = ws.receive_json()
        ws.send_json({"cmd": "scrub", "t": 99.0})
        clamped = ws.receive_json()
        assert clamped["t"] == pytest.approx(2.4)
        ws.send_json({"cmd": "scrub", "t": 1.0})
        b = ws.receive_json()
        assert a["positions"] == b["positions"]
        assert a["links"] == b["links"]


def test_preview_plays_pauses_and_finishes(client):
    doc = motion_to_dict(two_frame_motion(0.1))
    with client.websocket_connect("/ws/preview") as ws:
        ws.send_json({"cmd": "load", "motion": doc, "rateHz": 50.0})
        assert ws.receive_json()["type"] == "loaded"
        ws.receive_json()

        ws.send_json({"cmd": "play"})
        start = ws.receive_json()
        assert start["playing"] is True
        times = [start["t"]]
        message = ws.receive_json()
        while message["type"] == "frame" and message["playing"]:
            times.append(message["t"])
            message = ws.receive_json()
        # the stream advanced monotonically to the end, then reported done
        if message["type"] == "frame":
            times.append(message["t"])
            message = ws.receive_json()
        assert message["type"] == "done"
        assert times == sorted(times)
        assert times[-1] == pytest.approx(0.1)

        ws.send_json({"cmd": "play"})
        restarted = ws.receive_json()
        assert restarted["t"] == 0.0
        ws.send_json({"cmd": "pause"})
        paused = ws.receive_json()
        while paused.get("playing", False) or paused["type"] != "frame":
            paused = ws.receive_json()
        assert paused["playing"] is False


def test_preview_rejects_bad_commands(client):
    with client.websocket_connect("/ws/preview") as ws:
        ws.send_json({"cmd": "scrub", "t": 0.5})
        assert ws.receive_json()["type"] == "error"
        ws.send_json({"cmd": "load", "name": "moonwalk"})
        assert "no such motion" in ws.receive_json()["detail"]
        ws.send_text("not json")
        assert ws.receive_json()["type"] == "error"
        ws.send_json({"cmd": "load", "name": "wave", "rateHz": 0.01})
        assert "rateHz" in ws.receive_json()["detail"]
        ws.send_json({"cmd": "teleport"})
        assert "load a motion first" in ws.receive_json()["detail"]


# editor statics ----------------------------------------------------------


def test_editor_static_mount_serves_files_behind_the_api(tmp_path):
    editor = tmp_path / "editor"
    editor.mkdir()
    (editor / "index.html").write_text("<!doctype html><title>editor</title>")
    app = create_app(tmp_path / "data", editor_dir=editor)
    c = TestClient(app)
    page = c.get("/")
    assert page.status_code == 200
    assert "editor" in page.text
    # API routes keep precedence over the static mount
    assert c.get("/api/model").status_code == 200

    with pytest.raises(ValueError):
        create_app(tmp_path / "data2", editor_dir=tmp_path / "missing")

    bare = TestClient(create_app(tmp_path / "data3"))
    assert bare.get("/").status_code == 404
