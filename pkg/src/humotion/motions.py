"""Keyframe motions: representation, interpolation, playback, get-up dispatch.

Positions and velocities are connected by per-joint cubic Hermite segments,
so every keyframe's position AND velocity are met exactly at the knots and
the played trajectory is C1 across them. Efforts and support coefficients
blend linearly; their smoothness carries no contract.

Motion files are versioned JSON documents. The serializer is canonical
(fixed key order, fixed float formatting), so a library file survives a
parse/serialize cycle byte for byte.
"""

from __future__ import annotations

import json
import hashlib
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from .dynamics import JointCommand, SupportCoefficients
from .estimation import FallState, FusedAngles, GetupDirection, fall_detect
from .kinematics.model import CANONICAL_JOINT_ORDER

MOTION_SCHEMA_VERSION = 1
DEFAULT_RATE = 100.0  # control loop rate, Hz

PRECONDITIONS = ("standing", "prone", "supine", "leftSide", "rightSide")
POSE_SPACES = ("joint", "abstract", "inverse")

N_JOINTS = len(CANONICAL_JOINT_ORDER)


class MotionError(ValueError):
    """Raised when a motion document violates the format contract."""


def joint_order_hash() -> str:
    """Fingerprint of the canonical joint ordering, embedded in motion files."""
    joined = ":".join(CANONICAL_JOINT_ORDER)
    return hashlib.sha256(joined.encode()).hexdigest()[:16]


@dataclass
class Keyframe:
    duration: float  # seconds to the next frame; ignored on the last frame
    positions: np.ndarray
    velocities: np.ndarray
    efforts: np.ndarray
    support: SupportCoefficients = field(default_factory=SupportCoefficients)
    pose_space: str | None = None

    def __post_init__(self):
        for name in ("positions", "velocities", "efforts"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (N_JOINTS,):
                raise MotionError(f"{name} must have {N_JOINTS} entries, got {arr.shape}")
            setattr(self, name, arr)
        if np.any(self.efforts < 0.0) or np.any(self.efforts > 1.0):
            raise MotionError("efforts must be in [0, 1]")
        if self.pose_space is not None and self.pose_space not in POSE_SPACES:
            raise MotionError(f"unknown pose space {self.pose_space!r}")


@dataclass
class Motion:
    name: str
    precondition: str
    keyframes: list[Keyframe]

    def __post_init__(self):
        if not self.name:
            raise MotionError("motion needs a name")
        if self.precondition not in PRECONDITIONS:
            raise MotionError(f"unknown precondition {self.precondition!r}")
        if len(self.keyframes) < 2:
            raise MotionError("a motion needs at least two keyframes")
        for frame in self.keyframes[:-1]:
            if not frame.duration > 0.0:
                raise MotionError("keyframe durations must be positive")

    @property
    def knot_times(self) -> np.ndarray:
        durs = [f.duration for f in self.keyframes[:-1]]
        return np.concatenate([[0.0], np.cumsum(durs)])


def total_duration(motion: Motion) -> float:
    return float(sum(f.duration for f in motion.keyframes[:-1]))


# interpolation ------------------------------------------------------------


def _blend_support(a: SupportCoefficients, b: SupportCoefficients, u: float) -> SupportCoefficients:
    def mix(x, y):
        return min(1.0, max(0.0, (1.0 - u) * x + u * y))

    return SupportCoefficients(
        left_leg=mix(a.left_leg, b.left_leg),
        right_leg=mix(a.right_leg, b.right_leg),
        left_arm=mix(a.left_arm, b.left_arm),
        right_arm=mix(a.right_arm, b.right_arm),
    )


def _endpoint_command(frame: Keyframe, keep_velocity: bool) -> JointCommand:
    vel = frame.velocities.copy() if keep_velocity else np.zeros(N_JOINTS)
    return JointCommand(
        position=frame.positions.copy(),
        velocity=vel,
        acceleration=np.zeros(N_JOINTS),
        feed_forward_torque=np.zeros(N_JOINTS),
        effort=frame.efforts.copy(),
        support=frame.support,
    )


def interpolate(motion: Motion, t: float) -> JointCommand:
    """Sample the motion at time t.

    Out-of-range times clamp to the nearest endpoint and report zero
    velocity; the endpoints themselves reproduce their keyframes exactly.
    """
    if not math.isfinite(t):
        raise MotionError("sample time must be finite")
    total = total_duration(motion)
    if t <= 0.0:
        return _endpoint_command(motion.keyframes[0], keep_velocity=t == 0.0)
    if t >= total:
        return _endpoint_command(motion.keyframes[-1], keep_velocity=t == total)

    knots = motion.knot_times
    seg = int(np.searchsorted(knots, t, side="right")) - 1
    seg = min(seg, len(motion.keyframes) - 2)
    a = motion.keyframes[seg]
    b = motion.keyframes[seg + 1]
    duration = a.duration
    u = (t - float(knots[seg])) / duration

    h00 = (2.0 * u - 3.0) * u * u + 1.0
    h10 = ((u - 2.0) * u + 1.0) * u
    h01 = (3.0 - 2.0 * u) * u * u
    h11 = (u - 1.0) * u * u
    pos = h00 * a.positions + h10 * duration * a.velocities + h01 * b.positions + h11 * duration * b.velocities

    d00 = 6.0 * u * (u - 1.0)
    d10 = (3.0 * u - 4.0) * u + 1.0
    d01 = -d00
    d11 = (3.0 * u - 2.0) * u
    vel = (d00 * a.positions + d01 * b.positions) / duration + d10 * a.velocities + d11 * b.velocities

    dd00 = 12.0 * u - 6.0
    dd10 = 6.0 * u - 4.0
    dd01 = -dd00
    dd11 = 6.0 * u - 2.0
    acc = (dd00 * a.positions + dd01 * b.positions) / duration**2 + (dd10 * a.velocities + dd11 * b.velocities) / duration

    return JointCommand(
        position=pos,
        velocity=vel,
        acceleration=acc,
        feed_forward_torque=np.zeros(N_JOINTS),
        effort=(1.0 - u) * a.efforts + u * b.efforts,
        support=_blend_support(a.support, b.support, u),
    )


# playback -------------------------------------------------------------------


@dataclass
class PlaybackFrame:
    t: float
    command: JointCommand
    interrupt: str | None = None


class FallAction(str, Enum):
    NONE = "none"
    DISABLE_TORQUE = "disableTorque"


def fall_protection(attitude: FusedAngles, limit: float | None = None) -> FallAction:
    kwargs = {} if limit is None else {"limit": limit}
    if fall_detect(attitude, **kwargs) is FallState.FALLING:
        return FallAction.DISABLE_TORQUE
    return FallAction.NONE


def _disable_torque_frame(t: float, held: JointCommand) -> PlaybackFrame:
    limp = JointCommand(
        position=held.position.copy(),
        velocity=np.zeros(N_JOINTS),
        acceleration=np.zeros(N_JOINTS),
        feed_forward_torque=np.zeros(N_JOINTS),
        effort=np.zeros(N_JOINTS),
        support=SupportCoefficients(),
    )
    return PlaybackFrame(t=t, command=limp, interrupt="fallProtection")


def play(
    motion: Motion,
    rate: float = DEFAULT_RATE,
    attitude_source: Callable[[], FusedAngles] | None = None,
    fall_limit: float | None = None,
) -> Iterator[PlaybackFrame]:
    """Stream interpolated frames on a fixed time grid.

    The grid is k/rate for bitwise-reproducible sampling, with a final
    frame at exactly the total duration. When an attitude source is given
    and reports a fall, the stream ends early with a single torque-disable
    frame carrying the interrupt reason.
    """
    if not rate > 0.0:
        raise MotionError("playback rate must be positive")
    total = total_duration(motion)
    n = int(math.floor(total * rate + 1e-9))
    times = [k / rate for k in range(n + 1)]
    if times[-1] != total:
        times.append(total)
    for t in times:
        command = interpolate(motion, t)
        if attitude_source is not None:
            if fall_protection(attitude_source(), fall_limit) is FallAction.DISABLE_TORQUE:
                yield _disable_torque_frame(t, command)
                return
        yield PlaybackFrame(t=t, command=command)


# get-up dispatch ------------------------------------------------------------

_GETUP_TAG = {
    GetupDirection.PRONE: "prone",
    GetupDirection.SUPINE: "supine",
    GetupDirection.LEFT_SIDE: "leftSide",
    GetupDirection.RIGHT_SIDE: "rightSide",
}


def dispatch_getup(direction: GetupDirection, library: "MotionLibrary", prefer: str = "prone") -> Motion:
    """Pick the get-up motion whose precondition matches the lying direction.

    Side falls have two variants (roll toward prone or supine); `prefer`
    breaks the tie by substring match on the motion name.
    """
    tag = _GETUP_TAG[direction]
    candidates = sorted(
        (m for m in library.motions() if m.precondition == tag), key=lambda m: m.name
    )
    if not candidates:
        raise MotionError(f"library has no get-up motion with precondition {tag!r}")
    for m in candidates:
        if prefer in m.name:
            return m
    return candidates[0]


# serialization ---------------------------------------------------------------


def _format_float(x: float) -> float:
    # round-trip-safe canonical float: json repr of Python floats is already
    # shortest-round-trip; normalize negative zero for byte stability
    return 0.0 if x == 0.0 else float(x)


def motion_to_dict(motion: Motion) -> dict:
    frames = []
    for f in motion.keyframes:
        entry = {
            "duration": _format_float(float(f.duration)),
            "positions": [_format_float(v) for v in f.positions],
            "velocities": [_format_float(v) for v in f.velocities],
            "efforts": [_format_float(v) for v in f.efforts],
            "support": {
                "ll": _format_float(f.support.left_leg),
                "rl": _format_float(f.support.right_leg),
                "la": _format_float(f.support.left_arm),
                "ra": _format_float(f.support.right_arm),
            },
        }
        if f.pose_space is not None:
            entry["poseSpace"] = f.pose_space
        frames.append(entry)
    frames[-1]["duration"] = 0.0
    return {
        "version": MOTION_SCHEMA_VERSION,
        "name": motion.name,
        "precondition": motion.precondition,
        "jointOrderHash": joint_order_hash(),
        "frames": frames,
    }


def motion_from_dict(doc: dict) -> Motion:
    if doc.get("version") != MOTION_SCHEMA_VERSION:
        raise MotionError(f"unsupported motion version {doc.get('version')!r}")
    if doc.get("jointOrderHash") != joint_order_hash():
        raise MotionError("motion was authored against a different joint ordering")
    raw_frames = doc.get("frames", [])
    frames = []
    for idx, entry in enumerate(raw_frames):
        support = entry.get("support", {})
        try:
            sc = SupportCoefficients(
                left_leg=float(support.get("ll", 0.0)),
                right_leg=float(support.get("rl", 0.0)),
                left_arm=float(support.get("la", 0.0)),
                right_arm=float(support.get("ra", 0.0)),
            )
            frames.append(
                Keyframe(
                    duration=float(entry["duration"]),
                    positions=entry["positions"],
                    velocities=entry["velocities"],
                    efforts=entry["efforts"],
                    support=sc,
                    pose_space=entry.get("poseSpace"),
                )
            )
        except (ValueError, KeyError, TypeError) as e:
            # error reports name the offending frame so tooling can point at it
            detail = f"missing key {e}" if isinstance(e, KeyError) else e
            raise MotionError(f"frames[{idx}]: {detail}") from None
    return Motion(name=doc.get("name", ""), precondition=doc.get("precondition", ""), keyframes=frames)


def motion_to_json_bytes(motion: Motion) -> bytes:
    return (json.dumps(motion_to_dict(motion), indent=2) + "\n").encode()


def motion_from_json_bytes(data: bytes) -> Motion:
    try:
        doc = json.loads(data.decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise MotionError(f"not a motion document: {e}") from None
    return motion_from_dict(doc)


def load_motion(path: str | Path) -> Motion:
    return motion_from_json_bytes(Path(path).read_bytes())


def save_motion(motion: Motion, path: str | Path) -> None:
    Path(path).write_bytes(motion_to_json_bytes(motion))


class MotionLibrary:
    """Named motion store keeping the exact serialized bytes per motion."""

    def __init__(self):
        self._entries: dict[str, tuple[Motion, bytes]] = {}

    def add(self, motion: Motion, raw: bytes | None = None, replace: bool = False) -> None:
        if motion.name in self._entries and not replace:
            raise MotionError(f"motion {motion.name!r} already in library")
        self._entries[motion.name] = (motion, raw if raw is not None else motion_to_json_bytes(motion))

    def get(self, name: str) -> Motion:
        try:
            return self._entries[name][0]
        except KeyError:
            raise MotionError(f"no motion named {name!r}") from None

    def raw(self, name: str) -> bytes:
        try:
            return self._entries[name][1]
        except KeyError:
            raise MotionError(f"no motion named {name!r}") from None

    def names(self) -> list[str]:
        return sorted(self._entries)

    def motions(self) -> list[Motion]:
        return [self._entries[n][0] for n in self.names()]

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    @classmethod
    def load_dir(cls, directory: str | Path) -> "MotionLibrary":
        lib = cls()
        for path in sorted(Path(directory).glob("*.json")):
            raw = path.read_bytes()
            lib.add(motion_from_json_bytes(raw), raw=raw)
        return lib


def default_library() -> MotionLibrary:
    from importlib.resources import as_file, files

    with as_file(files("humotion.data") / "motions") as path:
        return MotionLibrary.load_dir(path)
