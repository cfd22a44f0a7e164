"""The three whole-body pose spaces and conversions between them.

* joint space: canonical 20-vector of joint angles
* abstract space: per-limb extension / foot angles / limb-line angles
* inverse space: Cartesian foot targets + foot orientation (legs only;
  arms stay abstract, there is no hand IK)

Leg conventions (trunk frame: x forward, y left, z up):
  extension    (d - d_min) / (d_max - d_min) of the hip-ankle distance d,
               d_max = thigh + shank (straight knee), d_min = |thigh - shank|
  legAngle*    ZXY Euler angles of the line from hip centre to ankle centre
  footAngle*   summed roll chain (hipRoll + ankleRoll) and pitch chain
               (hipPitch + kneePitch + anklePitch)

The knee-forward branch (knee angle >= 0) is canonical everywhere; the
knee-induced pitch between thigh and the hip-ankle line is compensated at
the hip on the way down and at the ankle implicitly through the summed
foot pitch, which makes joint -> abstract -> joint exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..math3d import (
    euler_zxy_from_rot,
    quat_from_rot,
    rot_from_quat,
    rot_x,
    rot_y,
)
from .model import RobotModel

# canonical joint vector slices
HEAD = slice(0, 2)
L_ARM = slice(2, 5)
R_ARM = slice(5, 8)
L_LEG = slice(8, 14)
R_LEG = slice(14, 20)

# within-limb indices
HIP_YAW, HIP_ROLL, HIP_PITCH, KNEE_PITCH, ANKLE_ROLL, ANKLE_PITCH = range(6)
SHOULDER_PITCH, SHOULDER_ROLL, ELBOW_PITCH = range(3)

ZERO_POSE = np.zeros(20)


class PoseDomainError(ValueError):
    """Raised for pose parameters outside their legal domain."""


@dataclass
class AbstractLegPose:
    extension: float = 1.0
    foot_angle_x: float = 0.0
    foot_angle_y: float = 0.0
    leg_angle_x: float = 0.0
    leg_angle_y: float = 0.0
    leg_angle_z: float = 0.0

    def copy(self) -> "AbstractLegPose":
        return AbstractLegPose(**vars(self))


@dataclass
class AbstractArmPose:
    extension: float = 1.0
    arm_angle_x: float = 0.0
    arm_angle_y: float = 0.0

    def copy(self) -> "AbstractArmPose":
        return AbstractArmPose(**vars(self))


@dataclass
class InverseLegPose:
    """Foot sole frame relative to the trunk: position (m) + unit quaternion."""

    position: np.ndarray
    orientation: np.ndarray  # (w, x, y, z)

    def copy(self) -> "InverseLegPose":
        return InverseLegPose(self.position.copy(), self.orientation.copy())


@dataclass
class AbstractPose:
    left_leg: AbstractLegPose = field(default_factory=AbstractLegPose)
    right_leg: AbstractLegPose = field(default_factory=AbstractLegPose)
    left_arm: AbstractArmPose = field(default_factory=AbstractArmPose)
    right_arm: AbstractArmPose = field(default_factory=AbstractArmPose)
    head_yaw: float = 0.0
    head_pitch: float = 0.0

    def copy(self) -> "AbstractPose":
        return AbstractPose(
            self.left_leg.copy(),
            self.right_leg.copy(),
            self.left_arm.copy(),
            self.right_arm.copy(),
            self.head_yaw,
            self.head_pitch,
        )


@dataclass
class InversePose:
    left_leg: InverseLegPose
    right_leg: InverseLegPose
    left_arm: AbstractArmPose = field(default_factory=AbstractArmPose)
    right_arm: AbstractArmPose = field(default_factory=AbstractArmPose)
    head_yaw: float = 0.0
    head_pitch: float = 0.0


# leg geometry helpers ---------------------------------------------------


def _leg_lengths(model: RobotModel) -> tuple[float, float, float, float]:
    lth = model.dims["thighLength"]
    lsh = model.dims["shankLength"]
    return lth, lsh, abs(lth - lsh), lth + lsh


def _extension_from_bend(lengths: tuple[float, float, float, float], bend: float) -> float:
    """Extension of a two-segment limb from its (non-negative) bend angle.

    Written in half-angle form so the value keeps full relative precision
    against both workspace boundaries, where a law-of-cosines acos would
    lose square-root-of-epsilon digits.
    """
    la, lb, d_min, d_max = lengths
    half = 0.5 * bend
    g_out = 4.0 * la * lb * math.sin(half) ** 2  # (d_max - d) * (d_max + d)
    g_in = 4.0 * la * lb * math.cos(half) ** 2  # (d - d_min) * (d + d_min)
    d = math.sqrt(d_min * d_min + g_in)
    span = d_max - d_min
    if half <= 0.25 * math.pi:
        return 1.0 - g_out / ((d_max + d) * span)
    return g_in / ((d + d_min) * span)


def _bend_from_extension(lengths: tuple[float, float, float, float], extension: float) -> float:
    if not 0.0 <= extension <= 1.0:
        raise PoseDomainError(f"extension must be in [0, 1], got {extension}")
    la, lb, d_min, d_max = lengths
    span = d_max - d_min
    to_min = extension * span  # d - d_min
    to_max = (1.0 - extension) * span  # d_max - d
    s2 = to_max * (2.0 * d_max - to_max)  # (d_max - d)(d_max + d)
    c2 = to_min * (2.0 * d_min + to_min)  # (d - d_min)(d + d_min)
    return 2.0 * math.atan2(math.sqrt(max(0.0, s2)), math.sqrt(max(0.0, c2)))


def _bend_from_distance(lengths: tuple[float, float, float, float], d: float) -> float:
    _, _, d_min, d_max = lengths
    s2 = (d_max - d) * (d_max + d)
    c2 = (d - d_min) * (d + d_min)
    return 2.0 * math.atan2(math.sqrt(max(0.0, s2)), math.sqrt(max(0.0, c2)))


def hip_ankle_distance(model: RobotModel, knee: float) -> float:
    lth, lsh, d_min, _ = _leg_lengths(model)
    g_in = 4.0 * lth * lsh * math.cos(0.5 * knee) ** 2
    return math.sqrt(d_min * d_min + g_in)


def extension_from_knee(model: RobotModel, knee: float) -> float:
    return _extension_from_bend(_leg_lengths(model), knee)


def knee_from_extension(model: RobotModel, extension: float) -> float:
    return _bend_from_extension(_leg_lengths(model), extension)


def _centre_line_pitch(lth: float, lsh: float, knee: float) -> float:
    """Pitch of the hip-ankle line relative to the thigh axis."""
    return math.atan2(lsh * math.sin(knee), lth + lsh * math.cos(knee))


# leg conversions --------------------------------------------------------


def leg_joint_to_abstract(model: RobotModel, leg_q: np.ndarray) -> AbstractLegPose:
    lth, lsh, _, _ = _leg_lengths(model)
    knee = float(leg_q[KNEE_PITCH])
    eta = _centre_line_pitch(lth, lsh, knee)
    return AbstractLegPose(
        extension=extension_from_knee(model, knee),
        foot_angle_x=float(leg_q[HIP_ROLL] + leg_q[ANKLE_ROLL]),
        foot_angle_y=float(leg_q[HIP_PITCH] + knee + leg_q[ANKLE_PITCH]),
        leg_angle_x=float(leg_q[HIP_ROLL]),
        leg_angle_y=float(leg_q[HIP_PITCH] + eta),
        leg_angle_z=float(leg_q[HIP_YAW]),
    )


def leg_abstract_to_joint(model: RobotModel, pose: AbstractLegPose) -> np.ndarray:
    lth, lsh, _, _ = _leg_lengths(model)
    knee = knee_from_extension(model, pose.extension)
    eta = _centre_line_pitch(lth, lsh, knee)
    hip_pitch = pose.leg_angle_y - eta
    out = np.empty(6)
    out[HIP_YAW] = pose.leg_angle_z
    out[HIP_ROLL] = pose.leg_angle_x
    out[HIP_PITCH] = hip_pitch
    out[KNEE_PITCH] = knee
    out[ANKLE_ROLL] = pose.foot_angle_x - pose.leg_angle_x
    out[ANKLE_PITCH] = pose.foot_angle_y - hip_pitch - knee
    return out


# arm conversions --------------------------------------------------------


def _arm_lengths(model: RobotModel) -> tuple[float, float, float, float]:
    u = model.dims["upperArmLength"]
    w = model.dims["lowerArmLength"]
    return u, w, abs(u - w), u + w


def arm_joint_to_abstract(model: RobotModel, arm_q: np.ndarray) -> AbstractArmPose:
    u, w, _, _ = _arm_lengths(model)
    elbow = float(arm_q[ELBOW_PITCH])
    eta = math.atan2(w * math.sin(elbow), u + w * math.cos(elbow))
    return AbstractArmPose(
        extension=_extension_from_bend(_arm_lengths(model), abs(elbow)),
        arm_angle_x=float(arm_q[SHOULDER_ROLL]),
        arm_angle_y=float(arm_q[SHOULDER_PITCH] + eta),
    )


def arm_abstract_to_joint(model: RobotModel, pose: AbstractArmPose) -> np.ndarray:
    u, w, _, _ = _arm_lengths(model)
    elbow = -_bend_from_extension(_arm_lengths(model), pose.extension)  # elbows bend forward
    eta = math.atan2(w * math.sin(elbow), u + w * math.cos(elbow))
    out = np.empty(3)
    out[SHOULDER_PITCH] = pose.arm_angle_y - eta
    out[SHOULDER_ROLL] = pose.arm_angle_x
    out[ELBOW_PITCH] = elbow
    return out


# whole body -------------------------------------------------------------


def joint_to_abstract(model: RobotModel, q: np.ndarray) -> AbstractPose:
    q = np.asarray(q, dtype=float)
    return AbstractPose(
        left_leg=leg_joint_to_abstract(model, q[L_LEG]),
        right_leg=leg_joint_to_abstract(model, q[R_LEG]),
        left_arm=arm_joint_to_abstract(model, q[L_ARM]),
        right_arm=arm_joint_to_abstract(model, q[R_ARM]),
        head_yaw=float(q[0]),
        head_pitch=float(q[1]),
    )


def abstract_to_joint(model: RobotModel, pose: AbstractPose) -> np.ndarray:
    q = np.zeros(20)
    q[HEAD] = (pose.head_yaw, pose.head_pitch)
    q[L_ARM] = arm_abstract_to_joint(model, pose.left_arm)
    q[R_ARM] = arm_abstract_to_joint(model, pose.right_arm)
    q[L_LEG] = leg_abstract_to_joint(model, pose.left_leg)
    q[R_LEG] = leg_abstract_to_joint(model, pose.right_leg)
    return q


# inverse space ----------------------------------------------------------


def _hip_origin(model: RobotModel, side: str) -> np.ndarray:
    sign = 1.0 if side == "left" else -1.0
    return np.array([0.0, sign * model.dims["hipOffsetY"], 0.0])


def leg_joint_to_inverse(model: RobotModel, q: np.ndarray, side: str) -> InverseLegPose:
    transforms = model.forward_kinematics(q)
    sole = transforms[("l" if side == "left" else "r") + "Sole"]
    return InverseLegPose(position=sole[:3, 3].copy(), orientation=quat_from_rot(sole[:3, :3]))


def joint_to_inverse(model: RobotModel, q: np.ndarray) -> InversePose:
    q = np.asarray(q, dtype=float)
    return InversePose(
        left_leg=leg_joint_to_inverse(model, q, "left"),
        right_leg=leg_joint_to_inverse(model, q, "right"),
        left_arm=arm_joint_to_abstract(model, q[L_ARM]),
        right_arm=arm_joint_to_abstract(model, q[R_ARM]),
        head_yaw=float(q[0]),
        head_pitch=float(q[1]),
    )


def leg_inverse_kinematics(
    model: RobotModel, pose: InverseLegPose, side: str
) -> tuple[np.ndarray, bool]:
    """Analytic 6-DOF leg IK for the foot sole target.

    Targets outside the reachable shell are pulled to the boundary along
    the hip-target direction; the second return value flags any clamping.
    """
    lth, lsh, d_min, d_max = _leg_lengths(model)
    rot_f = rot_from_quat(np.asarray(pose.orientation, dtype=float))
    p_sole = np.asarray(pose.position, dtype=float)
    clamped = False

    # ankle sits footHeight above the sole along the foot z axis
    ankle = p_sole + rot_f @ np.array([0.0, 0.0, model.dims["footHeight"]])
    hip = _hip_origin(model, side)
    v = ankle - hip
    d_raw = float(np.linalg.norm(v))
    d = min(max(d_raw, d_min), d_max)
    if d != d_raw:
        clamped = True
    if d_raw < 1e-12:
        v = np.array([0.0, 0.0, -1.0])  # degenerate: aim straight down
        d_raw = 1.0

    knee = _bend_from_distance((lth, lsh, d_min, d_max), d)

    # ankle->hip expressed in foot coordinates, rescaled onto the shell
    u = rot_f.T @ (-v) * (d / d_raw)
    s_x = -lth * math.sin(knee)
    s_z = lth * math.cos(knee) + lsh

    if s_z < 1e-12:
        ankle_roll = 0.0  # fully folded: ankle orientation is arbitrary
    else:
        arg = u[1] / s_z
        if abs(arg) > 1.0:
            arg = max(-1.0, min(1.0, arg))
            clamped = True
        ankle_roll = math.asin(arg)

    a, b = s_x, s_z * math.cos(ankle_roll)
    if abs(a) < 1e-15 and abs(b) < 1e-15:
        ankle_pitch = 0.0
    else:
        ankle_pitch = math.atan2(a * u[2] - b * u[0], a * u[0] + b * u[2])

    rot_hip = rot_f @ rot_y(-ankle_pitch) @ rot_x(-ankle_roll) @ rot_y(-knee)
    hip_yaw, hip_roll, hip_pitch = euler_zxy_from_rot(rot_hip)

    out = np.empty(6)
    out[HIP_YAW] = hip_yaw
    out[HIP_ROLL] = hip_roll
    out[HIP_PITCH] = hip_pitch
    out[KNEE_PITCH] = knee
    out[ANKLE_ROLL] = ankle_roll
    out[ANKLE_PITCH] = ankle_pitch
    return out, clamped


def inverse_to_joint(model: RobotModel, pose: InversePose) -> tuple[np.ndarray, bool]:
    q = np.zeros(20)
    q[HEAD] = (pose.head_yaw, pose.head_pitch)
    q[L_ARM] = arm_abstract_to_joint(model, pose.left_arm)
    q[R_ARM] = arm_abstract_to_joint(model, pose.right_arm)
    q[L_LEG], cl = leg_inverse_kinematics(model, pose.left_leg, "left")
    q[R_LEG], cr = leg_inverse_kinematics(model, pose.right_leg, "right")
    return q, cl or cr


def sole_transform(model: RobotModel, q: np.ndarray, side: str) -> np.ndarray:
    name = ("l" if side == "left" else "r") + "Sole"
    return model.forward_kinematics(q)[name]


def default_halt_pose() -> AbstractPose:
    """Relaxed stance used when the gait is disabled."""
    pose = AbstractPose()
    for leg in (pose.left_leg, pose.right_leg):
        leg.extension = 0.95
    pose.left_arm.extension = 0.92
    pose.right_arm.extension = 0.92
    pose.left_arm.arm_angle_x = 0.12
    pose.right_arm.arm_angle_x = -0.12
    return pose
