import math

import numpy as np
import pytest

from humotion import math3d as m3
from tests.conftest import random_rotations


def test_wrap_angle_range():
    assert m3.wrap_angle(0.0) == 0.0
    assert m3.wrap_angle(math.pi) == pytest.approx(math.pi)
    assert m3.wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert m3.wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert m3.wrap_angle(-3 * math.pi / 2) == pytest.approx(math.pi / 2)
    for a in np.linspace(-20, 20, 401):
        w = m3.wrap_angle(a)
        assert -math.pi < w <= math.pi
        assert math.isclose(math.sin(w), math.sin(a), abs_tol=1e-12)
        assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-12)


def test_elementary_rotations():
    # right-handed: rot_z(+90 deg) takes x to y
    assert np.allclose(m3.rot_z(math.pi / 2) @ [1, 0, 0], [0, 1, 0], atol=1e-15)
    assert np.allclose(m3.rot_x(math.pi / 2) @ [0, 1, 0], [0, 0, 1], atol=1e-15)
    assert np.allclose(m3.rot_y(math.pi / 2) @ [0, 0, 1], [1, 0, 0], atol=1e-15)
    for a in (-1.3, 0.0, 0.4, 2.9):
        assert np.allclose(m3.rot_x(a), m3.rot_axis(np.array([1.0, 0, 0]), a), atol=1e-15)
        assert np.allclose(m3.rot_y(a), m3.rot_axis(np.array([0, 1.0, 0]), a), atol=1e-15)
        assert np.allclose(m3.rot_z(a), m3.rot_axis(np.array([0, 0, 1.0]), a), atol=1e-15)


def test_rot_axis_orthonormal(rng):
    for _ in range(200):
        axis = rng.standard_normal(3)
        axis /= np.linalg.norm(axis)
        r = m3.rot_axis(axis, rng.uniform(-math.pi, math.pi))
        assert np.allclose(r @ r.T, np.eye(3), atol=1e-14)
        assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-13)


def test_euler_zxy_compose_decompose(rng):
    for _ in range(2000):
        z = rng.uniform(-math.pi, math.pi)
        x = rng.uniform(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3)
        y = rng.uniform(-math.pi, math.pi)
        rot = m3.euler_zxy(z, x, y)
        assert np.allclose(rot, m3.rot_z(z) @ m3.rot_x(x) @ m3.rot_y(y), atol=1e-14)
        z2, x2, y2 = m3.euler_zxy_from_rot(rot)
        assert np.allclose([z2, x2, y2], [z, x, y], atol=1e-12)


def test_quat_rot_round_trip_large_sweep(rng):
    # composition oracle: quaternion <-> matrix over 10^5 random rotations
    quats = rng.standard_normal((100_000, 4))
    quats /= np.linalg.norm(quats, axis=1, keepdims=True)
    worst = 0.0
    for q in quats:
        rot = m3.rot_from_quat(q)
        q2 = m3.quat_from_rot(rot)
        rot2 = m3.rot_from_quat(q2)
        worst = max(worst, float(np.abs(rot2 - rot).max()))
    assert worst < 1e-12


def test_quat_multiply_matches_matrix_product(rng):
    for _ in range(500):
        qa = m3.quat_normalize(rng.standard_normal(4))
        qb = m3.quat_normalize(rng.standard_normal(4))
        lhs = m3.rot_from_quat(m3.quat_multiply(qa, qb))
        rhs = m3.rot_from_quat(qa) @ m3.rot_from_quat(qb)
        assert np.allclose(lhs, rhs, atol=1e-13)


def test_quat_rotate_matches_matrix(rng):
    for _ in range(500):
        q = m3.quat_normalize(rng.standard_normal(4))
        v = rng.standard_normal(3)
        assert np.allclose(m3.quat_rotate(q, v), m3.rot_from_quat(q) @ v, atol=1e-12)


def test_quat_from_rotvec_matches_axis_angle(rng):
    for _ in range(500):
        axis = rng.standard_normal(3)
        axis /= np.linalg.norm(axis)
        a = rng.uniform(-3, 3)
        assert np.allclose(
            m3.quat_from_rotvec(axis * a), m3.quat_from_axis_angle(axis, a), atol=1e-14
        )
    # tiny rotations stay unit and first-order accurate
    v = np.array([1e-14, -2e-14, 3e-15])
    q = m3.quat_from_rotvec(v)
    assert np.linalg.norm(q) == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(q[1:], v / 2, atol=1e-20)


def test_rotvec_quat_round_trip(rng):
    for _ in range(300):
        v = rng.standard_normal(3) * rng.uniform(0.0, 3.0)
        if np.linalg.norm(v) > math.pi:
            v *= rng.uniform(0.0, math.pi) / np.linalg.norm(v)
        back = m3.rotvec_from_quat(m3.quat_from_rotvec(v))
        assert np.allclose(back, v, atol=1e-12)
    # tiny rotations stay smooth through the series branch
    for scale in (1e-14, 1e-10, 1e-6):
        v = np.array([scale, -0.5 * scale, 0.25 * scale])
        back = m3.rotvec_from_quat(m3.quat_from_rotvec(v))
        assert np.allclose(back, v, atol=1e-15 + scale * 1e-6)
    assert np.array_equal(m3.rotvec_from_quat(np.array([1.0, 0, 0, 0])), np.zeros(3))
    # a negated quaternion is the same rotation
    q = m3.quat_from_rotvec(np.array([0.4, -0.2, 0.9]))
    assert np.allclose(m3.rotvec_from_quat(-q), m3.rotvec_from_quat(q), atol=1e-12)


def test_quat_conjugate_inverts(rng):
    for _ in range(200):
        q = m3.quat_normalize(rng.standard_normal(4))
        ident = m3.quat_multiply(q, m3.quat_conjugate(q))
        assert np.allclose(ident, [1, 0, 0, 0], atol=1e-14)


def test_quat_angle_between():
    qa = m3.quat_from_axis_angle(np.array([0, 0, 1.0]), 0.3)
    qb = m3.quat_from_axis_angle(np.array([0, 0, 1.0]), -0.4)
    assert m3.quat_angle_between(qa, qb) == pytest.approx(0.7, abs=1e-12)
    # sign flip of the quaternion is the same rotation
    assert m3.quat_angle_between(qa, -qa) == pytest.approx(0.0, abs=1e-12)


def test_transforms(rng):
    for rot in random_rotations(rng, 100):
        pos = rng.standard_normal(3)
        t = m3.make_transform(rot, pos)
        assert np.allclose(t @ m3.transform_inverse(t), np.eye(4), atol=1e-13)
        p = rng.standard_normal(3)
        assert np.allclose(m3.transform_point(t, p), rot @ p + pos, atol=1e-13)
