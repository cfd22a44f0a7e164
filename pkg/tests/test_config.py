import json
import threading

import pytest

from humotion.config import (
    ConfigError,
    ConfigRegistry,
    default_registry,
    gait_config_kwargs,
)
from humotion.gait import GaitConfig


def small_registry(path=None):
    reg = ConfigRegistry(path)
    reg.declare("walk.speed", 0.2, 0.0, 1.0, "test speed")
    reg.declare("walk.steps", 4, 1, 100)
    reg.declare("walk.enabled", True)
    reg.declare("walk.label", "default")
    return reg


def test_every_key_has_a_default_and_starts_there():
    reg = default_registry()
    assert len(reg.keys()) >= 15
    for key in reg.keys():
        entry = reg.describe(key)
        assert "default" in entry
        assert reg.get(key) == entry["default"]


def test_set_then_get_reads_your_write():
    reg = small_registry()
    assert reg.set("walk.speed", 0.5) is True
    assert reg.get("walk.speed") == 0.5
    assert reg.set("walk.label", "fast") is True
    assert reg.get("walk.label") == "fast"


def test_snapshot_is_a_consistent_copy():
    reg = small_registry()
    snap = reg.snapshot()
    reg.set("walk.speed", 0.9)
    assert snap["walk.speed"] == 0.2
    assert reg.snapshot()["walk.speed"] == 0.9


def test_bounds_are_enforced_and_value_survives():
    reg = small_registry()
    with pytest.raises(ConfigError):
        reg.set("walk.speed", 1.5)
    with pytest.raises(ConfigError):
        reg.set("walk.speed", -0.1)
    with pytest.raises(ConfigError):
        reg.set("walk.steps", 0)
    assert reg.get("walk.speed") == 0.2
    assert reg.get("walk.steps") == 4


def test_type_mismatches_are_type_errors():
    reg = small_registry()
    with pytest.raises(TypeError):
        reg.set("walk.speed", "fast")
    with pytest.raises(TypeError):
        reg.set("walk.steps", 2.5)
    with pytest.raises(TypeError):
        reg.set("walk.enabled", 1)
    with pytest.raises(TypeError):
        reg.set("walk.label", 3)
    # ints are fine where floats are declared
    assert reg.set("walk.speed", 1) is True
    assert reg.get("walk.speed") == 1.0
    assert isinstance(reg.get("walk.speed"), float)


def test_unknown_keys_raise_key_error():
    reg = small_registry()
    with pytest.raises(KeyError):
        reg.get("walk.nope")
    with pytest.raises(KeyError):
        reg.set("walk.nope", 1.0)
    with pytest.raises(KeyError):
        reg.describe("walk.nope")
    with pytest.raises(ConfigError):
        reg.declare("walk.speed", 0.3)


def test_declare_rejects_bad_defaults_and_bounds():
    reg = ConfigRegistry()
    with pytest.raises(TypeError):
        reg.declare("x.list", [1, 2])
    with pytest.raises(TypeError):
        reg.declare("x.flag", True, 0, 1)
    with pytest.raises(ConfigError):
        reg.declare("x.bad", 5.0, 0.0, 1.0)


def test_listeners_fire_exactly_once_per_accepted_change():
    reg = small_registry()
    calls = []
    reg.subscribe(lambda k, old, new: calls.append((k, old, new)))
    reg.set("walk.speed", 0.4)
    assert calls == [("walk.speed", 0.2, 0.4)]
    # same value again is accepted but is not a change
    reg.set("walk.speed", 0.4)
    assert len(calls) == 1
    # rejected writes never fire
    with pytest.raises(ConfigError):
        reg.set("walk.speed", 2.0)
    assert len(calls) == 1
    reg.set("walk.enabled", False)
    assert calls[-1] == ("walk.enabled", True, False)


def test_per_key_listener_and_unsubscribe():
    reg = small_registry()
    speed_calls = []
    all_calls = []
    handle = reg.subscribe(lambda k, o, n: speed_calls.append(n), key="walk.speed")
    reg.subscribe(lambda k, o, n: all_calls.append(k))
    reg.set("walk.speed", 0.3)
    reg.set("walk.steps", 7)
    assert speed_calls == [0.3]
    assert all_calls == ["walk.speed", "walk.steps"]
    reg.unsubscribe(handle)
    reg.set("walk.speed", 0.6)
    assert speed_calls == [0.3]
    with pytest.raises(KeyError):
        reg.subscribe(lambda k, o, n: None, key="walk.nope")


def test_listeners_fire_after_commit():
    reg = small_registry()
    seen = []
    reg.subscribe(lambda k, o, n: seen.append(reg.get(k)))
    reg.set("walk.speed", 0.7)
    assert seen == [0.7]


def test_save_and_load_round_trip(tmp_path):
    path = tmp_path / "config.json"
    reg = small_registry(path)
    reg.set("walk.speed", 0.8)
    reg.set("walk.label", "tuned")
    reg.save()
    assert path.exists()
    assert not list(tmp_path.glob("*.tmp"))

    fresh = small_registry(path)
    issues = fresh.load()
    assert issues == []
    assert fresh.get("walk.speed") == 0.8
    assert fresh.get("walk.label") == "tuned"


def test_load_skips_stale_entries_unless_strict(tmp_path):
    path = tmp_path / "config.json"
    doc = {
        "version": 1,
        "values": {"walk.speed": 0.6, "walk.gone": 1.0, "walk.steps": 9999},
    }
    path.write_text(json.dumps(doc))
    reg = small_registry(path)
    issues = reg.load()
    assert reg.get("walk.speed") == 0.6
    assert reg.get("walk.steps") == 4
    assert len(issues) == 2
    with pytest.raises(KeyError):
        small_registry(path).load(strict=True)


def test_load_rejects_other_versions(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"version": 99, "values": {}}))
    with pytest.raises(ConfigError):
        small_registry(path).load()


def test_save_without_path_is_an_error():
    with pytest.raises(ConfigError):
        small_registry().save()


def test_parse_text_respects_declared_types():
    reg = small_registry()
    assert reg.parse_text("walk.speed", "0.25") == 0.25
    assert reg.parse_text("walk.steps", "12") == 12
    assert reg.parse_text("walk.enabled", "false") is False
    assert reg.parse_text("walk.enabled", "ON") is True
    assert reg.parse_text("walk.label", "42") == "42"
    with pytest.raises(TypeError):
        reg.parse_text("walk.steps", "1.5")
    with pytest.raises(TypeError):
        reg.parse_text("walk.enabled", "maybe")
    with pytest.raises(TypeError):
        reg.parse_text("walk.speed", "quick")


def test_reset_returns_to_default():
    reg = small_registry()
    reg.set("walk.speed", 0.9)
    assert reg.reset("walk.speed") is True
    assert reg.get("walk.speed") == 0.2
    assert reg.reset("walk.speed") is False


def test_describe_carries_bounds_only_for_numbers():
    reg = small_registry()
    speed = reg.describe("walk.speed")
    assert speed["min"] == 0.0 and speed["max"] == 1.0
    assert speed["type"] == "float"
    flag = reg.describe("walk.enabled")
    assert "min" not in flag and "max" not in flag
    assert flag["type"] == "bool"
    assert reg.describe("walk.label")["type"] == "string"
    assert reg.describe("walk.steps")["type"] == "int"


def test_concurrent_writes_keep_exactly_once_listeners():
    reg = ConfigRegistry()
    counts = {}
    for i in range(4):
        key = f"worker{i}.value"
        reg.declare(key, 0.0, 0.0, 1000.0)
        counts[key] = 0
        reg.subscribe(lambda k, o, n: counts.__setitem__(k, counts[k] + 1), key=key)

    def churn(key):
        for step in range(200):
            reg.set(key, float(step + 1))

    threads = [threading.Thread(target=churn, args=(f"worker{i}.value",)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    # every write changed the value, so every write fired exactly once
    assert all(counts[k] == 200 for k in counts)
    assert all(reg.get(k) == 200.0 for k in counts)


def test_gait_kwargs_build_a_valid_config():
    reg = default_registry()
    reg.set("gait.frequency", 2.2)
    reg.set("gait.stepHeight", 0.06)
    cfg = GaitConfig(**gait_config_kwargs(reg))
    assert cfg.frequency == 2.2
    assert cfg.step_height == 0.06
    assert cfg.effort == reg.get("gait.effort")
