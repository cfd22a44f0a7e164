"""Small 3D math toolbox: rotation matrices, quaternions, rigid transforms.

Conventions used throughout the package:
  * world/trunk axes: x forward, y left, z up (right-handed)
  * rotation matrices map local coordinates to parent coordinates
  * quaternions are (w, x, y, z), unit norm
  * angles in radians
"""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    r = math.fmod(a + math.pi, TWO_PI)
    if r <= 0.0:
        r += TWO_PI
    return r - math.pi


def rot_x(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_axis(axis: np.ndarray, a: float) -> np.ndarray:
    """Rodrigues rotation about a unit axis."""
    kx, ky, kz = axis
    c, s = math.cos(a), math.sin(a)
    v = 1.0 - c
    return np.array(
        [
            [kx * kx * v + c, kx * ky * v - kz * s, kx * kz * v + ky * s],
            [kx * ky * v + kz * s, ky * ky * v + c, ky * kz * v - kx * s],
            [kx * kz * v - ky * s, ky * kz * v + kx * s, kz * kz * v + c],
        ]
    )


def euler_zxy(z: float, x: float, y: float) -> np.ndarray:
    """Compose R = Rz(z) @ Rx(x) @ Ry(y)."""
    return rot_z(z) @ rot_x(x) @ rot_y(y)


def euler_zxy_from_rot(rot: np.ndarray) -> tuple[float, float, float]:
    """Decompose R = Rz(z) @ Rx(x) @ Ry(y); x is taken in [-pi/2, pi/2]."""
    sx = max(-1.0, min(1.0, rot[2, 1]))
    x = math.asin(sx)
    y = math.atan2(-rot[2, 0], rot[2, 2])
    z = math.atan2(-rot[0, 1], rot[1, 1])
    return z, x, y


# quaternions -----------------------------------------------------------

QUAT_IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])


def quat_normalize(q: np.ndarray) -> np.ndarray:
    return q / np.linalg.norm(q)


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def quat_from_axis_angle(axis: np.ndarray, a: float) -> np.ndarray:
    half = 0.5 * a
    return np.array([math.cos(half), *(math.sin(half) * np.asarray(axis, dtype=float))])


def quat_from_rotvec(v: np.ndarray) -> np.ndarray:
    """Exponential map: rotation vector (axis * angle) to quaternion."""
    angle = float(np.linalg.norm(v))
    if angle < 1e-12:
        # second order series keeps the map smooth through zero
        half = 0.5 * np.asarray(v, dtype=float)
        return quat_normalize(np.array([1.0, half[0], half[1], half[2]]))
    axis = np.asarray(v, dtype=float) / angle
    return quat_from_axis_angle(axis, angle)


def rotvec_from_quat(q: np.ndarray) -> np.ndarray:
    """Logarithmic map: quaternion to rotation vector (axis * angle)."""
    w, x, y, z = q
    s = math.sqrt(x * x + y * y + z * z)
    if s < 1e-12:
        # small rotations: v ~ 2 * vector part, matching the series above
        sign = 1.0 if w >= 0.0 else -1.0
        return 2.0 * sign * np.array([x, y, z])
    angle = 2.0 * math.atan2(s, w)
    if angle > math.pi:
        angle -= 2.0 * math.pi  # take the short way around
    return (angle / s) * np.array([x, y, z])


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate vector v by quaternion q (same effect as rot_from_quat(q) @ v)."""
    w, x, y, z = q
    u = np.array([x, y, z])
    return v + 2.0 * np.cross(u, np.cross(u, v) + w * np.asarray(v, dtype=float))


def rot_from_quat(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def quat_from_rot(rot: np.ndarray) -> np.ndarray:
    """Shepperd's method; returns unit quaternion with w >= 0."""
    m = rot
    t = np.trace(m)
    if t > 0.0:
        s = math.sqrt(t + 1.0) * 2.0
        q = np.array(
            [0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s]
        )
    elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
        s = math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
        q = np.array(
            [(m[2, 1] - m[1, 2]) / s, 0.25 * s, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s]
        )
    elif m[1, 1] > m[2, 2]:
        s = math.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2.0
        q = np.array(
            [(m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, 0.25 * s, (m[1, 2] + m[2, 1]) / s]
        )
    else:
        s = math.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2.0
        q = np.array(
            [(m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, 0.25 * s]
        )
    if q[0] < 0.0:
        q = -q
    return quat_normalize(q)


def quat_angle_between(qa: np.ndarray, qb: np.ndarray) -> float:
    """Geodesic angle between two unit quaternions, in [0, pi]."""
    rel = quat_multiply(quat_conjugate(qa), qb)
    # atan2 form stays accurate near 0 and pi, unlike acos of the dot product
    return 2.0 * math.atan2(float(np.linalg.norm(rel[1:])), abs(float(rel[0])))


# rigid transforms (4x4 homogeneous) ------------------------------------


def make_transform(rot: np.ndarray, pos: np.ndarray) -> np.ndarray:
    t = np.eye(4)
    t[:3, :3] = rot
    t[:3, 3] = pos
    return t


def transform_inverse(t: np.ndarray) -> np.ndarray:
    rot = t[:3, :3]
    out = np.eye(4)
    out[:3, :3] = rot.T
    out[:3, 3] = -rot.T @ t[:3, 3]
    return out


def transform_point(t: np.ndarray, p: np.ndarray) -> np.ndarray:
    return t[:3, :3] @ np.asarray(p, dtype=float) + t[:3, 3]
