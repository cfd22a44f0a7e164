"""JSON wire forms for poses and sampled trajectories.

Shared by the HTTP service and the command line so a pose document means
the same thing everywhere. Field names mirror the camelCase style of the
packaged data files.
"""

from __future__ import annotations

import numpy as np

from ..kinematics import (
    AbstractArmPose,
    AbstractLegPose,
    AbstractPose,
    InverseLegPose,
    InversePose,
    PoseDomainError,
    RobotModel,
    abstract_to_joint,
    inverse_to_joint,
    joint_to_abstract,
    joint_to_inverse,
)
from ..math3d import quat_from_rot
from ..motions import N_JOINTS, POSE_SPACES, Motion, interpolate, play

_ABSTRACT_LEG_FIELDS = {
    "extension": "extension",
    "footAngleX": "foot_angle_x",
    "footAngleY": "foot_angle_y",
    "legAngleX": "leg_angle_x",
    "legAngleY": "leg_angle_y",
    "legAngleZ": "leg_angle_z",
}
_ABSTRACT_ARM_FIELDS = {
    "extension": "extension",
    "armAngleX": "arm_angle_x",
    "armAngleY": "arm_angle_y",
}


class WireError(ValueError):
    """A pose document does not match its declared space."""


def _require(doc: dict, key: str, context: str):
    if not isinstance(doc, dict) or key not in doc:
        raise WireError(f"{context}: missing field {key!r}")
    return doc[key]


def _floats(value, n: int, context: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise WireError(f"{context}: expected {n} numbers") from None
    if arr.shape != (n,) or not np.all(np.isfinite(arr)):
        raise WireError(f"{context}: expected {n} finite numbers")
    return arr


def _number(value, context: str) -> float:
    if isinstance(value, (int, float)) and not isinstance(value, bool) and np.isfinite(value):
        return float(value)
    raise WireError(f"{context}: expected a finite number")


def _leg_from_dict(doc: dict, context: str) -> AbstractLegPose:
    pose = AbstractLegPose()
    for wire_name, attr in _ABSTRACT_LEG_FIELDS.items():
        setattr(pose, attr, _number(_require(doc, wire_name, context), f"{context}.{wire_name}"))
    return pose


def _arm_from_dict(doc: dict, context: str) -> AbstractArmPose:
    pose = AbstractArmPose()
    for wire_name, attr in _ABSTRACT_ARM_FIELDS.items():
        setattr(pose, attr, _number(_require(doc, wire_name, context), f"{context}.{wire_name}"))
    return pose


def _leg_to_dict(pose: AbstractLegPose) -> dict:
    return {w: float(getattr(pose, a)) for w, a in _ABSTRACT_LEG_FIELDS.items()}


def _arm_to_dict(pose: AbstractArmPose) -> dict:
    return {w: float(getattr(pose, a)) for w, a in _ABSTRACT_ARM_FIELDS.items()}


def pose_from_dict(space: str, doc: dict):
    """Parse a pose document in the given space.

    Returns the joint vector for "joint", AbstractPose for "abstract",
    InversePose for "inverse".
    """
    if space == "joint":
        return _floats(_require(doc, "positions", "pose"), N_JOINTS, "pose.positions")
    if space == "abstract":
        return AbstractPose(
            left_leg=_leg_from_dict(_require(doc, "leftLeg", "pose"), "pose.leftLeg"),
            right_leg=_leg_from_dict(_require(doc, "rightLeg", "pose"), "pose.rightLeg"),
            left_arm=_arm_from_dict(_require(doc, "leftArm", "pose"), "pose.leftArm"),
            right_arm=_arm_from_dict(_require(doc, "rightArm", "pose"), "pose.rightArm"),
            head_yaw=float(doc.get("headYaw", 0.0)),
            head_pitch=float(doc.get("headPitch", 0.0)),
        )
    if space == "inverse":
        def leg(key):
            sub = _require(doc, key, "pose")
            return InverseLegPose(
                position=_floats(_require(sub, "position", f"pose.{key}"), 3, f"pose.{key}.position"),
                orientation=_floats(_require(sub, "orientation", f"pose.{key}"), 4, f"pose.{key}.orientation"),
            )

        return InversePose(
            left_leg=leg("leftLeg"),
            right_leg=leg("rightLeg"),
            left_arm=_arm_from_dict(_require(doc, "leftArm", "pose"), "pose.leftArm"),
            right_arm=_arm_from_dict(_require(doc, "rightArm", "pose"), "pose.rightArm"),
            head_yaw=float(doc.get("headYaw", 0.0)),
            head_pitch=float(doc.get("headPitch", 0.0)),
        )
    raise WireError(f"pose space must be one of {POSE_SPACES}, got {space!r}")


def pose_to_dict(space: str, pose) -> dict:
    if space == "joint":
        return {"positions": [float(x) for x in pose]}
    if space == "abstract":
        return {
            "leftLeg": _leg_to_dict(pose.left_leg),
            "rightLeg": _leg_to_dict(pose.right_leg),
            "leftArm": _arm_to_dict(pose.left_arm),
            "rightArm": _arm_to_dict(pose.right_arm),
            "headYaw": float(pose.head_yaw),
            "headPitch": float(pose.head_pitch),
        }
    if space == "inverse":
        def leg(p: InverseLegPose) -> dict:
            return {
                "position": [float(x) for x in p.position],
                "orientation": [float(x) for x in p.orientation],
            }

        return {
            "leftLeg": leg(pose.left_leg),
            "rightLeg": leg(pose.right_leg),
            "leftArm": _arm_to_dict(pose.left_arm),
            "rightArm": _arm_to_dict(pose.right_arm),
            "headYaw": float(pose.head_yaw),
            "headPitch": float(pose.head_pitch),
        }
    raise WireError(f"pose space must be one of {POSE_SPACES}, got {space!r}")


def convert_pose(model: RobotModel, src: str, dst: str, doc: dict) -> tuple[dict, bool]:
    """Convert a pose document between spaces through the joint vector.

    Returns the converted document and a flag marking that some target
    had to be clamped to stay reachable.
    """
    parsed = pose_from_dict(src, doc)
    clamped = False
    if src == "joint":
        q = parsed
    elif src == "abstract":
        q = abstract_to_joint(model, parsed)
    else:
        q, clamped = inverse_to_joint(model, parsed)
    q, limit_hit = model.clamp_to_limits(q)
    clamped = clamped or limit_hit

    if dst == "joint":
        out = q
    elif dst == "abstract":
        out = joint_to_abstract(model, q)
    elif dst == "inverse":
        out = joint_to_inverse(model, q)
    else:
        raise WireError(f"pose space must be one of {POSE_SPACES}, got {dst!r}")
    return pose_to_dict(dst, out), clamped


def link_transforms_dict(model: RobotModel, q: np.ndarray) -> dict:
    """Every link frame as position plus unit quaternion, for 3D preview."""
    out = {}
    for name, tf in model.forward_kinematics(q).items():
        out[name] = {
            "position": [float(x) for x in tf[:3, 3]],
            "orientation": [float(x) for x in quat_from_rot(tf[:3, :3])],
        }
    return out


def sample_frame(model: RobotModel, motion: Motion, t: float) -> dict:
    """One interpolated playback frame with link transforms."""
    cmd = interpolate(motion, t)
    return {
        "t": float(t),
        "positions": [float(x) for x in cmd.position],
        "velocities": [float(x) for x in cmd.velocity],
        "efforts": [float(x) for x in cmd.effort],
        "support": cmd.support.as_dict(),
        "links": link_transforms_dict(model, cmd.position),
    }


def sample_motion(model: RobotModel, motion: Motion, rate: float) -> list[dict]:
    """Uniform-grid samples over the whole motion, endpoints exact."""
    return [sample_frame(model, motion, frame.t) for frame in play(motion, rate)]


__all__ = [
    "WireError",
    "convert_pose",
    "link_transforms_dict",
    "pose_from_dict",
    "pose_to_dict",
    "sample_frame",
    "sample_motion",
]
