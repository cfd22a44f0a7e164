"""Trunk attitude estimation and fall handling.

Orientation is carried as a unit quaternion (trunk relative to world) and
reported as fused angles (yaw, pitch, roll, hemisphere): pitch and roll
are the independent sagittal/lateral tilt components, yaw the heading,
and the hemisphere flag distinguishes tilts past horizontal. Positive
fused pitch tips the robot forward, positive fused roll tips it onto its
right side.

The filter is a passive nonlinear complementary filter: the quaternion is
propagated with the (bias-corrected) gyro and pulled toward the direction
the normalized accelerometer reports as up, plus optionally toward the
magnetometer's heading reference (world +x). The correction feeds a bias
integrator with time constant ti and an orientation term scaled by kp.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .math3d import (
    quat_from_rot,
    quat_from_rotvec,
    quat_multiply,
    quat_normalize,
    rot_from_quat,
    wrap_angle,
)

DEFAULT_KP = 2.0
DEFAULT_TI = 2.5
DEFAULT_FALL_LIMIT = 0.8  # rad of trunk tilt past which recovery is hopeless
GRAVITY = 9.81

# anti-windup: bias integration pauses while the correction is this large,
# so large reorientation transients cannot charge the integrator
BIAS_GATE = 0.3
# upper bound on the total correction vector norm (rad-scale)
CORRECTION_CLAMP = 2.0

MAG_REFERENCE = np.array([1.0, 0.0, 0.0])  # world heading the magnetometer reports


class FallState(Enum):
    UPRIGHT = "upright"
    FALLING = "falling"


class GetupDirection(Enum):
    PRONE = "prone"
    SUPINE = "supine"
    LEFT_SIDE = "leftSide"
    RIGHT_SIDE = "rightSide"


@dataclass(frozen=True)
class FusedAngles:
    yaw: float = 0.0
    pitch: float = 0.0
    roll: float = 0.0
    hemisphere: int = 1


@dataclass(frozen=True)
class ImuSample:
    gyro: np.ndarray  # rad/s, body frame
    accel: np.ndarray  # m/s^2, body frame (reads +g z when upright at rest)
    timestamp: float = 0.0
    mag: np.ndarray | None = None


@dataclass(frozen=True)
class AttitudeState:
    orientation: np.ndarray  # unit quaternion (w, x, y, z), trunk -> world
    bias: np.ndarray  # gyro bias estimate, rad/s
    kp: float = DEFAULT_KP
    ti: float = DEFAULT_TI


def initial_state(
    kp: float = DEFAULT_KP, ti: float = DEFAULT_TI, orientation: np.ndarray | None = None
) -> AttitudeState:
    q = np.array([1.0, 0.0, 0.0, 0.0]) if orientation is None else quat_normalize(orientation)
    return AttitudeState(orientation=q, bias=np.zeros(3), kp=kp, ti=ti)


# fused angles <-> rotation ----------------------------------------------


def fused_from_rotation(rot: np.ndarray) -> FusedAngles:
    pitch = math.asin(max(-1.0, min(1.0, -rot[2, 0])))
    roll = math.asin(max(-1.0, min(1.0, rot[2, 1])))
    hemisphere = -1 if rot[2, 2] < 0.0 else 1
    # fused yaw is the z-rotation left over once the tilt is removed;
    # for the tilt defined below it reduces to twice the quaternion z angle
    yaw = fused_yaw_of_quat(quat_from_rot(rot))
    return FusedAngles(yaw=yaw, pitch=pitch, roll=roll, hemisphere=hemisphere)


def fused_yaw_of_quat(q: np.ndarray) -> float:
    return wrap_angle(2.0 * math.atan2(q[3], q[0]))


def fused_from_quat(q: np.ndarray) -> FusedAngles:
    return fused_from_rotation(rot_from_quat(q))


def quat_from_fused(f: FusedAngles) -> np.ndarray:
    sth, sph = math.sin(f.pitch), math.sin(f.roll)
    crit = sth * sth + sph * sph
    if crit >= 1.0:
        # on the tilt boundary the vertical component vanishes
        vz = 0.0
        scale = 1.0 / math.sqrt(crit)
        sth *= scale
        sph *= scale
    else:
        vz = math.copysign(math.sqrt(1.0 - crit), f.hemisphere)
    # v: where the world up axis lands in trunk coordinates for pure tilt;
    # the tilt rotation is the shortest arc taking v back to +z, built in
    # axis-angle form (atan2 keeps it exact for tilts near 0 and pi alike)
    sin_tilt = math.hypot(sth, sph)
    tilt = math.atan2(sin_tilt, vz)
    half_t = 0.5 * tilt
    if sin_tilt < 1e-150:
        q_tilt = (
            np.array([1.0, 0.0, 0.0, 0.0])
            if vz >= 0.0
            else np.array([0.0, 1.0, 0.0, 0.0])  # flat upside down: roll about x
        )
    else:
        s = math.sin(half_t) / sin_tilt
        q_tilt = np.array([math.cos(half_t), sph * s, sth * s, 0.0])
    half = 0.5 * f.yaw
    q_yaw = np.array([math.cos(half), 0.0, 0.0, math.sin(half)])
    return quat_multiply(q_yaw, q_tilt)


def rotation_from_fused(f: FusedAngles) -> np.ndarray:
    return rot_from_quat(quat_from_fused(f))


# complementary filter ----------------------------------------------------


def integrate_gyro(q: np.ndarray, omega: np.ndarray, dt: float) -> np.ndarray:
    """One explicit step of quaternion kinematics with body rates omega."""
    return quat_normalize(quat_multiply(q, quat_from_rotvec(omega * dt)))


def _reference_correction(measured: np.ndarray, predicted: np.ndarray) -> np.ndarray:
    """Rotation error vector pulling predicted onto measured.

    Tangent-of-half-angle form: behaves like the plain cross product for
    small errors but keeps growing toward 180 degrees, so near-antipodal
    estimates escape in bounded time instead of stalling.
    """
    cross = np.cross(measured, predicted)
    denom = max(1.0 + float(np.dot(measured, predicted)), 1e-3)
    return 2.0 * cross / denom


def filter_update(state: AttitudeState, sample: ImuSample, dt: float) -> AttitudeState:
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    rot = rot_from_quat(state.orientation)

    correction = np.zeros(3)
    have_reference = False
    accel_norm = float(np.linalg.norm(sample.accel))
    if accel_norm > 1e-9:
        up_predicted = rot.T @ np.array([0.0, 0.0, 1.0])
        correction += _reference_correction(sample.accel / accel_norm, up_predicted)
        have_reference = True
    if sample.mag is not None:
        mag_norm = float(np.linalg.norm(sample.mag))
        if mag_norm > 1e-9:
            north_predicted = rot.T @ MAG_REFERENCE
            correction += _reference_correction(sample.mag / mag_norm, north_predicted)
            have_reference = True
    total = float(np.linalg.norm(correction))
    if total > CORRECTION_CLAMP:
        correction *= CORRECTION_CLAMP / total

    bias = state.bias
    omega = sample.gyro - bias
    if state.kp != 0.0 and have_reference:
        if float(np.linalg.norm(correction)) <= BIAS_GATE:
            bias = bias - (state.kp / state.ti) * correction * dt
        omega = omega + state.kp * correction
    q = integrate_gyro(state.orientation, omega, dt)
    return replace(state, orientation=q, bias=bias)


def replay(samples: list[ImuSample], state: AttitudeState) -> list[AttitudeState]:
    """Run the filter over a timestamped sample stream."""
    out = []
    last_t = None
    for s in samples:
        if last_t is not None:
            dt = s.timestamp - last_t
            if dt <= 0.0:
                raise ValueError("sample timestamps must be strictly increasing")
            state = filter_update(state, s, dt)
        last_t = s.timestamp
        out.append(state)
    return out


def load_imu_log(path: str | Path) -> list[ImuSample]:
    """Read an IMU stream: CSV columns t,gx,gy,gz,ax,ay,az[,mx,my,mz]."""
    samples: list[ImuSample] = []
    last_t = None
    with open(path, newline="") as f:
        for row in csv.reader(f):
            if not row or not _is_number(row[0]):
                continue  # header or blank line
            vals = [float(x) for x in row]
            if len(vals) not in (7, 10):
                raise ValueError(f"IMU row needs 7 or 10 columns, got {len(vals)}")
            t = vals[0]
            if last_t is not None and t <= last_t:
                raise ValueError(f"timestamps must be strictly increasing at t={t}")
            last_t = t
            mag = np.array(vals[7:10]) if len(vals) == 10 else None
            samples.append(
                ImuSample(gyro=np.array(vals[1:4]), accel=np.array(vals[4:7]), timestamp=t, mag=mag)
            )
    return samples


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


# fall handling ------------------------------------------------------------


def tilt_deviation(f: FusedAngles) -> float:
    """Angle between the trunk z-axis and world vertical implied by f."""
    dev = math.acos(max(-1.0, min(1.0, math.cos(f.pitch) * math.cos(f.roll))))
    if f.hemisphere < 0:
        dev = math.pi - dev
    return dev


def fall_detect(f: FusedAngles, limit: float = DEFAULT_FALL_LIMIT) -> FallState:
    return FallState.FALLING if tilt_deviation(f) > limit else FallState.UPRIGHT


def getup_direction(f: FusedAngles, limit: float = DEFAULT_FALL_LIMIT) -> GetupDirection:
    """Which way the robot is lying, for get-up motion dispatch.

    Pitch-dominant falls map to prone/supine, roll-dominant falls to the
    sides; exact ties count as pitch-dominant.
    """
    if fall_detect(f, limit) is FallState.UPRIGHT:
        raise ValueError("getup_direction called while upright")
    if abs(f.pitch) >= abs(f.roll):
        return GetupDirection.PRONE if f.pitch > 0.0 else GetupDirection.SUPINE
    return GetupDirection.RIGHT_SIDE if f.roll > 0.0 else GetupDirection.LEFT_SIDE
