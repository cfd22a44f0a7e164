"""Wide-angle camera model: lens distortion, undistortion, ground projection.

Normalized image coordinates are (x, y) = ((u - cx)/fx, (v - cy)/fy) in the
camera frame, which follows the usual optical convention: x right, y down,
z along the optical axis. Distortion maps undistorted normalized points to
distorted ones through a rational radial factor and two tangential terms;
undistortion inverts that map numerically with a damped Newton iteration.

The mount transform places the camera in the trunk frame (x forward, y left,
z up), so projected rays can be chained with the trunk's world pose.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .math3d import rot_from_quat

# modeled usable field of view; invertibility is validated out to the
# diagonal of the square of this half-angle in normalized coordinates
FOV_HALF_ANGLE_DEG = 75.0
FOV_LIMIT = math.tan(math.radians(FOV_HALF_ANGLE_DEG))

UNDISTORT_TOLERANCE = 1e-12
UNDISTORT_MAX_ITERATIONS = 50

CAMERA_SCHEMA_VERSION = 1


class CameraError(ValueError):
    """Raised for invalid camera parameters or calibration files."""


def _forward_mount_rotation() -> np.ndarray:
    # optical axis to trunk x, image right to trunk -y, image down to trunk -z
    return np.array([[0.0, 0.0, 1.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]])


@dataclass(frozen=True)
class CameraModel:
    """Intrinsics, distortion coefficients, and camera-to-trunk mount."""

    fx: float
    fy: float
    cx: float
    cy: float
    distortion: np.ndarray = field(default_factory=lambda: np.zeros(8))
    image_size: tuple[int, int] = (640, 480)
    mount_rotation: np.ndarray = field(default_factory=_forward_mount_rotation)
    mount_translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "distortion", np.asarray(self.distortion, dtype=float))
        object.__setattr__(self, "mount_rotation", np.asarray(self.mount_rotation, dtype=float))
        object.__setattr__(
            self, "mount_translation", np.asarray(self.mount_translation, dtype=float)
        )
        if not (self.fx > 0.0 and self.fy > 0.0):
            raise CameraError("focal lengths must be positive")
        if self.image_size[0] <= 0 or self.image_size[1] <= 0:
            raise CameraError("image size must be positive")
        if self.distortion.shape != (8,):
            raise CameraError("distortion must hold k1..k6, p1, p2")
        if self.mount_rotation.shape != (3, 3) or self.mount_translation.shape != (3,):
            raise CameraError("mount transform must be a 3x3 rotation and a 3-vector")
        if abs(np.linalg.det(self.mount_rotation) - 1.0) > 1e-6:
            raise CameraError("mount rotation must be a proper rotation matrix")

    @property
    def radial(self) -> np.ndarray:
        return self.distortion[:6]

    @property
    def tangential(self) -> np.ndarray:
        return self.distortion[6:]


def _radial_factor(radial: np.ndarray, t: float) -> float:
    k1, k2, k3, k4, k5, k6 = radial
    return (1.0 + t * (k1 + t * (k2 + t * k3))) / (1.0 + t * (k4 + t * (k5 + t * k6)))


def validate_invertible(model: CameraModel) -> None:
    """Reject coefficient sets whose radial map is not strictly increasing.

    A non-monotone radial profile folds the image plane onto itself, which
    makes undistortion ambiguous. Checked over the modeled field of view out
    to the corner of the square FOV grid. Runs when a calibration file is
    loaded; directly constructed models are left unchecked so partial or
    deliberately extreme coefficient sets can still be evaluated.
    """
    radii = np.linspace(0.0, FOV_LIMIT * math.sqrt(2.0), 513)
    mapped = [r * _radial_factor(model.radial, r * r) for r in radii]
    diffs = np.diff(mapped)
    if np.any(diffs <= 0.0):
        raise CameraError("radial distortion is not monotone over the field of view")


def distort(model: CameraModel, point: np.ndarray) -> np.ndarray:
    """Map an undistorted normalized point to its distorted position."""
    x, y = float(point[0]), float(point[1])
    t = x * x + y * y
    s = _radial_factor(model.radial, t)
    p1, p2 = model.tangential
    return np.array(
        [
            x * s + 2.0 * p1 * x * y + p2 * (t + 2.0 * x * x),
            y * s + p1 * (t + 2.0 * y * y) + 2.0 * p2 * x * y,
        ]
    )


def _distort_jacobian(model: CameraModel, x: float, y: float) -> np.ndarray:
    k1, k2, k3, k4, k5, k6 = model.radial
    p1, p2 = model.tangential
    t = x * x + y * y
    num = 1.0 + t * (k1 + t * (k2 + t * k3))
    den = 1.0 + t * (k4 + t * (k5 + t * k6))
    dnum = k1 + t * (2.0 * k2 + t * 3.0 * k3)
    dden = k4 + t * (2.0 * k5 + t * 3.0 * k6)
    s = num / den
    ds = (dnum * den - num * dden) / (den * den)  # d s / d t
    return np.array(
        [
            [
                s + 2.0 * x * x * ds + 2.0 * p1 * y + 6.0 * p2 * x,
                2.0 * x * y * ds + 2.0 * p1 * x + 2.0 * p2 * y,
            ],
            [
                2.0 * x * y * ds + 2.0 * p1 * x + 2.0 * p2 * y,
                s + 2.0 * y * y * ds + 6.0 * p1 * y + 2.0 * p2 * x,
            ],
        ]
    )


@dataclass(frozen=True)
class UndistortResult:
    point: np.ndarray
    converged: bool
    iterations: int


def undistort(
    model: CameraModel,
    point: np.ndarray,
    tolerance: float = UNDISTORT_TOLERANCE,
    max_iterations: int = UNDISTORT_MAX_ITERATIONS,
) -> UndistortResult:
    """Invert the distortion at one point with a damped Newton iteration.

    Starts from the distorted point itself and halves the step whenever the
    residual would grow. Returns the best iterate with a convergence flag;
    a False flag means the residual never dropped below the tolerance within
    the iteration budget.
    """
    d = np.asarray(point, dtype=float)
    u = d.copy()
    residual = distort(model, u) - d
    norm = float(np.hypot(residual[0], residual[1]))
    for iteration in range(1, max_iterations + 1):
        if norm < tolerance:
            return UndistortResult(point=u, converged=True, iterations=iteration)
        jac = _distort_jacobian(model, u[0], u[1])
        det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
        if det == 0.0:
            return UndistortResult(point=u, converged=False, iterations=iteration)
        step = (
            np.array(
                [
                    jac[1, 1] * residual[0] - jac[0, 1] * residual[1],
                    jac[0, 0] * residual[1] - jac[1, 0] * residual[0],
                ]
            )
            / det
        )
        scale = 1.0
        while True:
            candidate = u - scale * step
            cand_residual = distort(model, candidate) - d
            cand_norm = float(np.hypot(cand_residual[0], cand_residual[1]))
            if cand_norm < norm or scale < 1.0 / 1024.0:
                break
            scale /= 2.0
        u, residual, norm = candidate, cand_residual, cand_norm
    return UndistortResult(point=u, converged=norm < tolerance, iterations=max_iterations)


def pixel_to_normalized(model: CameraModel, pixel: np.ndarray) -> np.ndarray:
    return np.array(
        [
            (float(pixel[0]) - model.cx) / model.fx,
            (float(pixel[1]) - model.cy) / model.fy,
        ]
    )


def normalized_to_pixel(model: CameraModel, point: np.ndarray) -> np.ndarray:
    return np.array(
        [
            float(point[0]) * model.fx + model.cx,
            float(point[1]) * model.fy + model.cy,
        ]
    )


@dataclass(frozen=True)
class Ray:
    """Half-line in the trunk frame: origin in meters, unit direction."""

    origin: np.ndarray
    direction: np.ndarray


def pixel_to_world_ray(model: CameraModel, pixel: np.ndarray) -> Ray:
    """Back-project a pixel to a viewing ray expressed in the trunk frame.

    Uses the undistortion best iterate; with a model that passed the
    load-time invertibility check, in-image pixels converge.
    """
    normalized = pixel_to_normalized(model, pixel)
    result = undistort(model, normalized)
    dir_cam = np.array([result.point[0], result.point[1], 1.0])
    dir_cam /= np.linalg.norm(dir_cam)
    return Ray(
        origin=model.mount_translation.copy(),
        direction=model.mount_rotation @ dir_cam,
    )


def ray_to_ground(
    ray: Ray, trunk_position: np.ndarray, trunk_quat: np.ndarray
) -> np.ndarray | None:
    """Intersect a trunk-frame ray with the world ground plane z = 0.

    Returns the 2D ground point, or None when the ray points at or above
    the horizon and never reaches the ground.
    """
    rot = rot_from_quat(np.asarray(trunk_quat, dtype=float))
    origin = np.asarray(trunk_position, dtype=float) + rot @ ray.origin
    direction = rot @ ray.direction
    if direction[2] >= -1e-12:
        return None
    span = -origin[2] / direction[2]
    if span <= 0.0:
        return None
    return origin[:2] + span * direction[:2]


def camera_to_dict(model: CameraModel) -> dict:
    from .math3d import quat_from_rot

    return {
        "version": CAMERA_SCHEMA_VERSION,
        "imageSize": [int(model.image_size[0]), int(model.image_size[1])],
        "intrinsics": {"fx": model.fx, "fy": model.fy, "cx": model.cx, "cy": model.cy},
        "distortion": [float(v) for v in model.distortion],
        "mount": {
            "rotation": [float(v) for v in quat_from_rot(model.mount_rotation)],
            "translation": [float(v) for v in model.mount_translation],
        },
    }


def camera_from_dict(data: dict) -> CameraModel:
    if data.get("version") != CAMERA_SCHEMA_VERSION:
        raise CameraError(f"unsupported camera file version {data.get('version')!r}")
    try:
        intr = data["intrinsics"]
        distortion = data["distortion"]
        mount = data["mount"]
        size = data["imageSize"]
    except KeyError as exc:
        raise CameraError(f"camera file missing key {exc}") from exc
    if len(distortion) != 8:
        raise CameraError("distortion must hold exactly 8 coefficients")
    model = CameraModel(
        fx=float(intr["fx"]),
        fy=float(intr["fy"]),
        cx=float(intr["cx"]),
        cy=float(intr["cy"]),
        distortion=np.asarray(distortion, dtype=float),
        image_size=(int(size[0]), int(size[1])),
        mount_rotation=rot_from_quat(np.asarray(mount["rotation"], dtype=float)),
        mount_translation=np.asarray(mount["translation"], dtype=float),
    )
    validate_invertible(model)
    return model


def load_camera(path: str | Path) -> CameraModel:
    with open(path, encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise CameraError(f"camera file is not valid JSON: {exc}") from exc
    return camera_from_dict(data)


def default_camera() -> CameraModel:
    from importlib import resources

    path = resources.files("humotion.data").joinpath("camera_wide.json")
    with resources.as_file(path) as p:
        return load_camera(p)
