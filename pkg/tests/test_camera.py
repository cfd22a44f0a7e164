"""Camera model tests: distortion formula, Newton undistortion, projection."""

import json
import math

import numpy as np
import pytest

from humotion.camera import (
    FOV_LIMIT,
    CameraError,
    CameraModel,
    Ray,
    camera_from_dict,
    camera_to_dict,
    default_camera,
    distort,
    load_camera,
    normalized_to_pixel,
    pixel_to_normalized,
    pixel_to_world_ray,
    ray_to_ground,
    undistort,
    validate_invertible,
)
from humotion.math3d import quat_from_rotvec


def pinhole(**kwargs) -> CameraModel:
    defaults = dict(fx=180.0, fy=180.0, cx=319.5, cy=239.5)
    defaults.update(kwargs)
    return CameraModel(**defaults)


def fov_grid(n=100) -> np.ndarray:
    axis = np.linspace(-FOV_LIMIT, FOV_LIMIT, n)
    return np.array([(x, y) for x in axis for y in axis])


# --- distortion formula -----------------------------------------------------


def test_distort_zero_coefficients_identity():
    cam = pinhole()
    for p in [(0.0, 0.0), (0.5, -0.3), (2.0, 1.5), (-3.7, 3.7)]:
        assert np.array_equal(distort(cam, np.array(p)), np.array(p))


def test_distort_center_fixed_point():
    cam = pinhole(distortion=np.array([0.3, -0.1, 0.05, 0.2, 0.01, -0.02, 0.001, -0.003]))
    assert np.array_equal(distort(cam, np.zeros(2)), np.zeros(2))


def test_distort_single_radial_coefficient():
    cam = pinhole(distortion=np.array([-0.2, 0, 0, 0, 0, 0, 0, 0]))
    out = distort(cam, np.array([0.5, 0.0]))
    assert out[0] == pytest.approx(0.5 * (1.0 - 0.2 * 0.25), abs=1e-15)
    assert out[1] == 0.0


def test_distort_tangential_terms():
    cam = pinhole(distortion=np.array([0, 0, 0, 0, 0, 0, 0.0003, -0.0002]))
    x, y = 0.4, -0.7
    t = x * x + y * y
    out = distort(cam, np.array([x, y]))
    assert out[0] == pytest.approx(x + 2 * 0.0003 * x * y + -0.0002 * (t + 2 * x * x), abs=1e-15)
    assert out[1] == pytest.approx(y + 0.0003 * (t + 2 * y * y) + 2 * -0.0002 * x * y, abs=1e-15)


# --- undistortion -----------------------------------------------------------


def test_undistort_zero_coefficients_identity():
    cam = pinhole()
    for p in [(0.7, -1.2), (2.5, 2.5), (-0.1, 0.05)]:
        res = undistort(cam, np.array(p))
        assert res.converged
        assert res.point == pytest.approx(np.array(p), abs=1e-12)


def test_undistort_center_single_iteration():
    cam = default_camera()
    res = undistort(cam, np.zeros(2))
    assert res.converged
    assert res.iterations == 1
    assert np.array_equal(res.point, np.zeros(2))


def test_round_trip_over_fov_grid():
    cam = default_camera()
    worst = 0.0
    iteration_counts = []
    for p in fov_grid(100):
        d = distort(cam, p)
        res = undistort(cam, d)
        assert res.converged
        iteration_counts.append(res.iterations)
        worst = max(worst, float(np.max(np.abs(res.point - p))))
    assert worst < 1e-9
    # the damped Newton solve is fast over nearly the whole field of view
    fast = sum(1 for n in iteration_counts if n <= 10)
    assert fast >= 0.99 * len(iteration_counts)


def test_round_trip_from_distorted_side():
    cam = default_camera()
    w, h = cam.image_size
    for u in np.linspace(0, w, 25):
        for v in np.linspace(0, h, 19):
            d = pixel_to_normalized(cam, np.array([u, v]))
            res = undistort(cam, d)
            assert res.converged
            back = distort(cam, res.point)
            assert np.max(np.abs(back - d)) < 1e-9


def test_undistort_reports_nonconvergence():
    # an exhausted iteration budget is flagged, with the best iterate kept
    cam = default_camera()
    d = distort(cam, np.array([FOV_LIMIT, FOV_LIMIT]))
    res = undistort(cam, d, max_iterations=2)
    assert not res.converged
    assert res.iterations == 2
    assert np.all(np.isfinite(res.point))
    # the same point converges once the budget allows it
    assert undistort(cam, d).converged


# --- invertibility validation -----------------------------------------------


def test_monotone_validation_accepts_shipped_set():
    validate_invertible(default_camera())


def test_monotone_validation_rejects_folding_set():
    cam = pinhole(distortion=np.array([-0.2, 0, 0, 0, 0, 0, 0, 0]))
    with pytest.raises(CameraError):
        validate_invertible(cam)


def test_load_rejects_folding_calibration(tmp_path):
    data = camera_to_dict(default_camera())
    data["distortion"] = [-0.2, 0, 0, 0, 0, 0, 0, 0]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    with pytest.raises(CameraError):
        load_camera(path)


def test_model_validation():
    with pytest.raises(CameraError):
        pinhole(fx=0.0)
    with pytest.raises(CameraError):
        pinhole(image_size=(640, 0))
    with pytest.raises(CameraError):
        pinhole(distortion=np.zeros(5))
    with pytest.raises(CameraError):
        camera_from_dict({"version": 99})


# --- calibration file -------------------------------------------------------


def test_camera_file_round_trip():
    cam = default_camera()
    clone = camera_from_dict(camera_to_dict(cam))
    assert clone.fx == cam.fx
    assert clone.image_size == cam.image_size
    assert np.array_equal(clone.distortion, cam.distortion)
    assert np.allclose(clone.mount_rotation, cam.mount_rotation, atol=1e-15)
    assert np.array_equal(clone.mount_translation, cam.mount_translation)


def test_shipped_calibration_covers_wide_fov():
    # the image edge maps close to the 75 degree half-angle by design
    cam = default_camera()
    edge = pixel_to_normalized(cam, np.array([cam.image_size[0], cam.cy]))
    res = undistort(cam, edge)
    assert res.converged
    angle = math.degrees(math.atan(res.point[0]))
    assert 70.0 < angle < 80.0


# --- projection -------------------------------------------------------------


def test_pixel_conversions_inverse():
    cam = default_camera()
    for px in [(0, 0), (319.5, 239.5), (640, 480), (123.4, 456.7)]:
        p = np.array(px, dtype=float)
        assert normalized_to_pixel(cam, pixel_to_normalized(cam, p)) == pytest.approx(p)


def test_principal_ray_points_forward():
    cam = default_camera()
    ray = pixel_to_world_ray(cam, np.array([cam.cx, cam.cy]))
    assert ray.direction == pytest.approx(np.array([1.0, 0.0, 0.0]), abs=1e-12)
    assert np.array_equal(ray.origin, cam.mount_translation)
    assert np.linalg.norm(ray.direction) == pytest.approx(1.0, abs=1e-12)


def test_down_looking_camera_hits_point_beneath():
    down = np.array([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]])
    cam = pinhole(mount_rotation=down)
    ray = pixel_to_world_ray(cam, np.array([cam.cx, cam.cy]))
    hit = ray_to_ground(ray, np.array([2.0, 3.0, 1.4]), np.array([1.0, 0.0, 0.0, 0.0]))
    assert hit == pytest.approx(np.array([2.0, 3.0]), abs=1e-12)


def test_horizon_ray_reports_above_horizon():
    cam = default_camera()  # looks straight ahead
    ray = pixel_to_world_ray(cam, np.array([cam.cx, cam.cy]))
    assert ray_to_ground(ray, np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0, 0.0])) is None
    # upward ray from a pixel above the principal point
    up = pixel_to_world_ray(cam, np.array([cam.cx, 0.0]))
    assert ray_to_ground(up, np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0, 0.0])) is None


def test_pinhole_forty_five_degrees_down():
    c, s = math.cos(math.pi / 4), math.sin(math.pi / 4)
    pitch_down = np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
    forward = np.array([[0.0, 0.0, 1.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]])
    cam = pinhole(mount_rotation=pitch_down @ forward)
    ray = pixel_to_world_ray(cam, np.array([cam.cx, cam.cy]))
    hit = ray_to_ground(ray, np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0, 0.0]))
    assert hit == pytest.approx(np.array([1.0, 0.0]), abs=1e-12)


def test_trunk_attitude_rotates_rays():
    # a forward camera on a trunk pitched 45 degrees forward sees the ground
    cam = default_camera()
    ray = Ray(origin=np.zeros(3), direction=np.array([1.0, 0.0, 0.0]))
    quat = quat_from_rotvec(np.array([0.0, math.pi / 4, 0.0]))
    hit = ray_to_ground(ray, np.array([0.0, 0.0, 1.0]), quat)
    assert hit == pytest.approx(np.array([1.0, 0.0]), abs=1e-12)
