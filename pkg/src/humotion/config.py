"""Central registry for live-tunable software parameters.

Every parameter is declared up front with a dotted key, a typed default,
and optional numeric bounds, so any value a tool can read also has a
place to be edited, validated, and persisted. Change listeners let the
control side react to edits without polling.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

CONFIG_SCHEMA_VERSION = 1

TYPE_NAMES = {float: "float", int: "int", bool: "bool", str: "string"}


class ConfigError(ValueError):
    """A value was rejected by its declared bounds."""


@dataclass
class ConfigEntry:
    key: str
    value: Any
    default: Any
    type_name: str
    minimum: float | None = None
    maximum: float | None = None
    description: str = ""

    def describe(self) -> dict:
        out = {
            "key": self.key,
            "value": self.value,
            "default": self.default,
            "type": self.type_name,
            "description": self.description,
        }
        if self.minimum is not None:
            out["min"] = self.minimum
        if self.maximum is not None:
            out["max"] = self.maximum
        return out


Listener = Callable[[str, Any, Any], None]


class ConfigRegistry:
    """Dotted-key store of typed, bounded, observable parameters.

    Reads and writes are safe across threads. Listeners fire exactly once
    per accepted change, after the new value is committed, in subscription
    order. Setting a key to its current value is accepted but is not a
    change, so listeners stay quiet.
    """

    def __init__(self, path: str | Path | None = None):
        self._entries: dict[str, ConfigEntry] = {}
        self._listeners: list[tuple[object, str | None, Listener]] = []
        self._lock = threading.RLock()
        self.path = Path(path) if path is not None else None

    # declaration ----------------------------------------------------------

    def declare(
        self,
        key: str,
        default: Any,
        minimum: float | None = None,
        maximum: float | None = None,
        description: str = "",
    ) -> None:
        if type(default) not in TYPE_NAMES:
            raise TypeError(f"unsupported config type {type(default).__name__}")
        type_name = TYPE_NAMES[type(default)]
        if type_name in ("bool", "string") and (minimum is not None or maximum is not None):
            raise TypeError(f"{type_name} keys take no bounds")
        with self._lock:
            if key in self._entries:
                raise ConfigError(f"config key {key!r} already declared")
            entry = ConfigEntry(key, default, default, type_name, minimum, maximum, description)
            self._check_bounds(entry, default)
            self._entries[key] = entry

    # access ---------------------------------------------------------------

    def __contains__(self, key: str) -> bool:
        with self._lock:
            return key in self._entries

    def keys(self) -> list[str]:
        with self._lock:
            return sorted(self._entries)

    def get(self, key: str) -> Any:
        with self._lock:
            return self._entry(key).value

    def describe(self, key: str) -> dict:
        with self._lock:
            return self._entry(key).describe()

    def snapshot(self) -> dict[str, Any]:
        """One consistent view of every value."""
        with self._lock:
            return {k: e.value for k, e in self._entries.items()}

    def set(self, key: str, value: Any) -> bool:
        """Store a value; returns True when the stored value changed.

        Wrong type raises TypeError, out-of-bounds raises ConfigError,
        unknown key raises KeyError.
        """
        with self._lock:
            entry = self._entry(key)
            value = self._coerce(entry, value)
            self._check_bounds(entry, value)
            old = entry.value
            if value == old and type(value) is type(old):
                return False
            entry.value = value
            to_fire = [(cb, k) for _, k, cb in self._listeners if k is None or k == key]
        for cb, _ in to_fire:
            cb(key, old, value)
        return True

    def reset(self, key: str) -> bool:
        return self.set(key, self._entry(key).default)

    def parse_text(self, key: str, text: str) -> Any:
        """Interpret a string from a CLI or query parameter as this key's type."""
        type_name = self._entry(key).type_name
        if type_name == "string":
            return text
        if type_name == "bool":
            lowered = text.strip().lower()
            if lowered in ("true", "1", "yes", "on"):
                return True
            if lowered in ("false", "0", "no", "off"):
                return False
            raise TypeError(f"{key} expects a boolean, got {text!r}")
        try:
            return int(text) if type_name == "int" else float(text)
        except ValueError:
            raise TypeError(f"{key} expects {type_name}, got {text!r}") from None

    # listeners ------------------------------------------------------------

    def subscribe(self, listener: Listener, key: str | None = None) -> object:
        """Observe accepted changes, for one key or all of them.

        Returns a handle for unsubscribe.
        """
        if key is not None:
            self._entry(key)
        handle = object()
        with self._lock:
            self._listeners.append((handle, key, listener))
        return handle

    def unsubscribe(self, handle: object) -> None:
        with self._lock:
            self._listeners = [t for t in self._listeners if t[0] is not handle]

    # persistence ----------------------------------------------------------

    def save(self, path: str | Path | None = None) -> Path:
        """Write all values to disk atomically (temp file, then rename)."""
        target = Path(path) if path is not None else self.path
        if target is None:
            raise ConfigError("no persistence path configured")
        doc = {"version": CONFIG_SCHEMA_VERSION, "values": self.snapshot()}
        payload = (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode()
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=target.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(payload)
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return target

    def load(self, path: str | Path | None = None, strict: bool = False) -> list[str]:
        """Apply values from a saved file.

        Unknown keys and rejected values are skipped and reported unless
        strict is set, so a stale file can never prevent startup.
        """
        source = Path(path) if path is not None else self.path
        if source is None:
            raise ConfigError("no persistence path configured")
        doc = json.loads(source.read_text())
        if doc.get("version") != CONFIG_SCHEMA_VERSION:
            raise ConfigError(f"unsupported config file version {doc.get('version')!r}")
        issues = []
        for key, value in doc.get("values", {}).items():
            try:
                self.set(key, value)
            except (KeyError, TypeError, ConfigError) as e:
                if strict:
                    raise
                issues.append(f"{key}: {e}")
        return issues

    # internals ------------------------------------------------------------

    def _entry(self, key: str) -> ConfigEntry:
        try:
            return self._entries[key]
        except KeyError:
            raise KeyError(f"no config key {key!r}") from None

    @staticmethod
    def _coerce(entry: ConfigEntry, value: Any) -> Any:
        # bool is an int subclass, so check it first and never cross-assign
        if entry.type_name == "bool":
            if isinstance(value, bool):
                return value
        elif entry.type_name == "float":
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                return float(value)
        elif entry.type_name == "int":
            if isinstance(value, int) and not isinstance(value, bool):
                return value
        elif entry.type_name == "string":
            if isinstance(value, str):
                return value
        raise TypeError(
            f"{entry.key} expects {entry.type_name}, got {type(value).__name__}"
        )

    @staticmethod
    def _check_bounds(entry: ConfigEntry, value: Any) -> None:
        if entry.type_name not in ("float", "int"):
            return
        if entry.minimum is not None and value < entry.minimum:
            raise ConfigError(f"{entry.key}={value} below minimum {entry.minimum}")
        if entry.maximum is not None and value > entry.maximum:
            raise ConfigError(f"{entry.key}={value} above maximum {entry.maximum}")


def default_registry(path: str | Path | None = None) -> ConfigRegistry:
    """Registry pre-declared with every live-tunable parameter."""
    reg = ConfigRegistry(path)
    reg.declare("gait.frequency", 1.6, 0.2, 3.0, "gait cycles per second")
    reg.declare("gait.stepHeight", 0.04, 0.0, 0.12, "swing foot lift, m")
    reg.declare("gait.nominalExtension", 0.95, 0.5, 1.0, "standing leg extension")
    reg.declare("gait.swayAmplitude", 0.02, 0.0, 0.08, "lateral weight shift, m")
    reg.declare("gait.timingGain", 1.2, 0.0, 5.0, "step timing feedback gain")
    reg.declare("gait.virtualSlopeGain", 0.10, 0.0, 0.5, "sagittal foot lift per rad")
    reg.declare("gait.effort", 0.85, 0.0, 1.0, "servo effort while walking")
    reg.declare("gait.maxVx", 0.40, 0.0, 0.6, "forward speed limit, m/s")
    reg.declare("gait.maxVy", 0.20, 0.0, 0.4, "sideways speed limit, m/s")
    reg.declare("gait.maxWz", 0.90, 0.0, 2.0, "turn rate limit, rad/s")
    reg.declare("estimation.kp", 2.0, 0.0, 20.0, "attitude correction gain")
    reg.declare("estimation.ti", 2.5, 0.05, 60.0, "gyro bias integral time, s")
    reg.declare("estimation.fallLimit", 0.8, 0.2, 1.5, "tilt treated as a fall, rad")
    reg.declare("motion.fallProtection", True, description="disable torque when falling")
    reg.declare("motion.playbackRate", 100.0, 10.0, 500.0, "playback sampling rate, Hz")
    reg.declare("sim.timestep", 0.005, 0.0005, 0.005, "physics step, s")
    reg.declare("sim.groundCompliance", 1.0, 0.1, 10.0, "1 is firm ground, larger is softer")
    reg.declare("service.previewRate", 50.0, 1.0, 200.0, "preview stream rate, Hz")
    reg.declare("logging.directory", "logs", description="session log output directory")
    return reg


def gait_config_kwargs(reg: ConfigRegistry) -> dict[str, Any]:
    """Map registry keys onto walking engine constructor arguments."""
    pairs = {
        "gait.frequency": "frequency",
        "gait.stepHeight": "step_height",
        "gait.nominalExtension": "nominal_extension",
        "gait.swayAmplitude": "sway_amplitude",
        "gait.timingGain": "timing_gain",
        "gait.virtualSlopeGain": "virtual_slope_gain",
        "gait.effort": "effort",
        "gait.maxVx": "max_vx",
        "gait.maxVy": "max_vy",
        "gait.maxWz": "max_wz",
    }
    snap = reg.snapshot()
    return {arg: snap[key] for key, arg in pairs.items()}
