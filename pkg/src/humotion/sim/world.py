"""Reduced-order physics world for closed-loop testing.

The robot is one rigid body carrying massless kinematic limbs: the body
holds the whole robot's mass, its center of mass follows the current joint
configuration, and its inertia is frozen from the starting configuration.
Joints track commands through a first-order servo with backlash and load
droop; foot sole corners generate spring-damper ground contacts that push
the body around. Deliberately not a high-fidelity robot model: it exists so
the full sense-estimate-act loop runs fast and reproducibly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from ..dynamics import (
    _cross3,
    DEFAULT_GAIN_RANGE,
    JointCommand,
    SupportCoefficients,
    gravity_compensation,
)
from ..estimation import ImuSample, integrate_gyro
from ..kinematics.model import RobotModel
from ..math3d import quat_conjugate, quat_multiply, rot_from_quat, rotvec_from_quat

MAX_TIMESTEP = 0.005
CONTACT_SUBSTEPS = 4

CONTACT_STIFFNESS = 4000.0  # N/m per sole corner
CONTACT_DAMPING = 120.0  # N*s/m per sole corner
FRICTION_COEFF = 0.9
# per-corner viscous coefficient; total*dt/mass stays below 1 so the
# explicit integration of sliding cannot ring at the step frequency
FRICTION_DAMPING = 80.0  # N*s/m, capped by the Coulomb limit
SERVO_DAMPING = 7.0  # N*m*s/rad: gain/damping sets the position-loop bandwidth
DEFAULT_BACKLASH = 0.004  # rad, symmetric dead zone

STANDARD_GRAVITY_VECTOR = np.array([0.0, 0.0, -9.81])


class SimulationFault(RuntimeError):
    """Raised when the state stops being finite. Carries a diagnostic dump."""

    def __init__(self, message: str, dump: dict[str, Any]):
        super().__init__(message)
        self.dump = dump


@dataclass
class JointState:
    position: np.ndarray
    velocity: np.ndarray


def _sole_corners(model: RobotModel) -> np.ndarray:
    dims = model.dims
    toe, heel, half = dims["footToeX"], dims["footHeelX"], dims["footHalfWidth"]
    return np.array(
        [
            [toe, half, 0.0],
            [toe, -half, 0.0],
            [-heel, half, 0.0],
            [-heel, -half, 0.0],
        ]
    )


class SimWorld:
    """Trunk rigid-body state plus kinematic joints and ground contact."""

    def __init__(
        self,
        model: RobotModel,
        joint_positions: np.ndarray | None = None,
        position: np.ndarray | None = None,
        orientation: np.ndarray | None = None,
        seed: int = 0,
        timestep: float = 0.005,
        gravity: np.ndarray = STANDARD_GRAVITY_VECTOR,
        ground_compliance: float = 1.0,
        gyro_noise: float = 0.002,
        accel_noise: float = 0.02,
        gyro_bias_sigma: float = 0.003,
        backlash: float = DEFAULT_BACKLASH,
        gain_range: tuple[float, float] = DEFAULT_GAIN_RANGE,
        fixed_base: bool = False,
    ):
        if not 0.0 < timestep <= MAX_TIMESTEP:
            raise ValueError(f"timestep must be in (0, {MAX_TIMESTEP}]")
        if not 0.0 < ground_compliance <= 1.0:
            raise ValueError("ground compliance must be in (0, 1]")
        self.model = model
        self.timestep = timestep
        self.gravity = np.asarray(gravity, dtype=float)
        self.ground_compliance = float(ground_compliance)
        self.gyro_noise = float(gyro_noise)
        self.accel_noise = float(accel_noise)
        self.backlash = float(backlash)
        self.gain_range = gain_range
        self.fixed_base = bool(fixed_base)
        self.rng = np.random.default_rng(seed)
        self.gyro_bias = self.rng.normal(0.0, gyro_bias_sigma, 3)

        n = len(model.joints)
        self.joint_positions = (
            np.zeros(n) if joint_positions is None else np.asarray(joint_positions, dtype=float).copy()
        )
        self.joint_velocities = np.zeros(n)
        self.orientation = (
            np.array([1.0, 0.0, 0.0, 0.0])
            if orientation is None
            else np.asarray(orientation, dtype=float).copy()
        )
        self.mass = model.total_mass
        self._corners = _sole_corners(model)

        fk = model.forward_kinematics(self.joint_positions)
        com_body = self._com_body(fk)
        if position is None:
            # start with the lowest sole corner exactly on the ground
            lowest = min(
                float((fk[name] @ np.append(c, 1.0))[2])
                for name in ("lSole", "rSole")
                for c in self._corners
            )
            position = np.array([0.0, 0.0, -lowest])
        self.position = np.asarray(position, dtype=float).copy()  # trunk frame origin
        rot = rot_from_quat(self.orientation)
        self.com_position = self.position + rot @ com_body
        self.linear_velocity = np.zeros(3)  # of the center of mass, world frame
        self.angular_velocity = np.zeros(3)  # trunk frame
        self.inertia = self._frozen_inertia(fk, com_body)
        self._inertia_inv = np.linalg.inv(self.inertia)
        self.time = 0.0
        # contact force split from the previous step, for the servo load model
        self._support = SupportCoefficients()
        self._pending_impulse = np.zeros(3)
        # previous body-frame positions of the 8 sole corners: the contact
        # damper needs the joint-driven part of each corner's velocity,
        # which the rigid-body formula cannot see
        self._corner_prev_body: np.ndarray | None = None

    # --- body geometry helpers -------------------------------------------

    def _com_body(self, fk: dict[str, np.ndarray]) -> np.ndarray:
        total = np.zeros(3)
        for link in self.model.links:
            t = fk[link.name]
            total += link.mass * (t[:3, :3] @ link.com + t[:3, 3])
        return total / self.mass

    def _frozen_inertia(self, fk: dict[str, np.ndarray], com_body: np.ndarray) -> np.ndarray:
        inertia = np.zeros((3, 3))
        for link in self.model.links:
            t = fk[link.name]
            rot = t[:3, :3]
            c = rot @ link.com + t[:3, 3] - com_body
            inertia += rot @ link.inertia @ rot.T
            inertia += link.mass * (float(c @ c) * np.eye(3) - np.outer(c, c))
        return inertia

    def kinetic_energy(self) -> float:
        w = self.angular_velocity
        return 0.5 * self.mass * float(self.linear_velocity @ self.linear_velocity) + 0.5 * float(
            w @ self.inertia @ w
        )

    def apply_impulse(self, impulse: np.ndarray) -> None:
        """Queue a world-frame impulse (N*s) on the trunk for the next step."""
        self._pending_impulse = self._pending_impulse + np.asarray(impulse, dtype=float)

    # --- stepping ----------------------------------------------------------

    def step(self, command: JointCommand, dt: float | None = None) -> tuple[ImuSample, JointState]:
        """Advance the world by one timestep under the given joint command."""
        if dt is None:
            dt = self.timestep
        if not 0.0 < dt <= MAX_TIMESTEP:
            raise ValueError(f"timestep must be in (0, {MAX_TIMESTEP}]")

        rot = rot_from_quat(self.orientation)

        # servo: position loop with backlash dead zone, plus the torque
        # balance between feed-forward and gravity load leaking through
        lo, hi = self.gain_range
        gains = lo + np.clip(command.effort, 0.0, 1.0) * (hi - lo)
        err = command.position - self.joint_positions
        half = self.backlash / 2.0
        effective = np.sign(err) * np.maximum(0.0, np.abs(err) - half)
        load = gravity_compensation(
            self.model, self.joint_positions, self._support, gravity=rot.T @ self.gravity
        )
        qdot = (gains * effective + command.feed_forward_torque - load) / SERVO_DAMPING
        self.joint_positions = self.joint_positions + qdot * dt
        if not np.all(np.isfinite(self.joint_positions)):
            raise SimulationFault(
                f"non-finite joint state at t={self.time:.4f}", dump=self.state_dump()
            )
        self.joint_positions, _ = self.model.clamp_to_limits(self.joint_positions)
        self.joint_velocities = qdot

        fk = self.model.forward_kinematics(self.joint_positions)
        com_body = self._com_body(fk)
        if self.fixed_base:
            self.com_position = self.position + rot @ com_body
        else:
            # the center of mass is the integrated state; limb motion shifts
            # the trunk around it, which keeps momentum out of the servo loop
            self.position = self.com_position - rot @ com_body

        corner_body = np.empty((8, 3))
        idx = 0
        for name in ("lSole", "rSole"):
            sole = fk[name]
            for corner in self._corners:
                corner_body[idx] = sole[:3, :3] @ corner + sole[:3, 3]
                idx += 1
        # joint-driven part of each corner's velocity; the rigid-body
        # formula below cannot see it, and a damper blind to it pumps
        # energy into the springs
        if self._corner_prev_body is None:
            v_joint = np.zeros((8, 3))
        else:
            v_joint = (corner_body - self._corner_prev_body) / dt
        self._corner_prev_body = corner_body

        # impulses arrive as instantaneous velocity changes
        if np.any(self._pending_impulse != 0.0):
            self.linear_velocity = self.linear_velocity + self._pending_impulse / self.mass
            self._pending_impulse = np.zeros(3)

        # contact and rigid-body integration run on a finer inner grid:
        # friction acts at the feet, a long lever below the center of mass,
        # and an explicit update of that rocking mode needs the smaller step
        orientation_before = self.orientation
        k_contact = CONTACT_STIFFNESS * self.ground_compliance
        d_contact = CONTACT_DAMPING * np.sqrt(self.ground_compliance)
        dt_inner = dt / CONTACT_SUBSTEPS
        first_accel = np.zeros(3)
        normal_sums = np.zeros(2)
        for sub in range(CONTACT_SUBSTEPS):
            rot_cur = rot_from_quat(self.orientation)
            origin = self.com_position - rot_cur @ com_body
            omega_world = rot_cur @ self.angular_velocity
            force = self.mass * self.gravity
            torque = np.zeros(3)  # about the CoM, world frame
            for idx in range(8):
                r_world = origin + rot_cur @ corner_body[idx]
                penetration = -r_world[2]
                if penetration <= 0.0:
                    continue
                arm = r_world - self.com_position
                v_point = (
                    self.linear_velocity
                    + _cross3(omega_world, arm)
                    + rot_cur @ v_joint[idx]
                )
                normal = k_contact * penetration - d_contact * v_point[2]
                if normal <= 0.0:
                    continue
                tangential = -FRICTION_DAMPING * v_point[:2]
                t_norm = float(np.hypot(tangential[0], tangential[1]))
                limit = FRICTION_COEFF * normal
                if t_norm > limit:
                    tangential *= limit / t_norm
                f = np.array([tangential[0], tangential[1], normal])
                force += f
                torque += _cross3(arm, f)
                normal_sums[0 if idx < 4 else 1] += normal
            accel_world = force / self.mass
            if sub == 0:
                first_accel = accel_world
            if self.fixed_base:
                break
            omega = self.angular_velocity
            alpha_body = self._inertia_inv @ (
                rot_cur.T @ torque - _cross3(omega, self.inertia @ omega)
            )
            self.linear_velocity = self.linear_velocity + accel_world * dt_inner
            self.angular_velocity = omega + alpha_body * dt_inner
            self.com_position = self.com_position + self.linear_velocity * dt_inner
            self.orientation = integrate_gyro(self.orientation, self.angular_velocity, dt_inner)
        if not self.fixed_base:
            self.position = self.com_position - rot_from_quat(self.orientation) @ com_body

        total_normal = normal_sums[0] + normal_sums[1]
        if total_normal > 0.0:
            self._support = SupportCoefficients(
                left_leg=normal_sums[0] / total_normal,
                right_leg=normal_sums[1] / total_normal,
            )
        else:
            self._support = SupportCoefficients()

        # IMU: specific force sampled at the start of the step; the gyro
        # reports the mean body rate that carries the old orientation to the
        # new one, the way a rate gyro averages over its sampling interval
        true_accel = np.zeros(3) if self.fixed_base else first_accel
        accel_body = rot.T @ (true_accel - self.gravity)
        spin = quat_multiply(quat_conjugate(orientation_before), self.orientation)
        gyro = rotvec_from_quat(spin) / dt + self.gyro_bias + self.rng.normal(
            0.0, self.gyro_noise, 3
        )
        accel = accel_body + self.rng.normal(0.0, self.accel_noise, 3)
        self.time += dt

        state_values = np.concatenate(
            [
                self.position,
                self.com_position,
                self.linear_velocity,
                self.angular_velocity,
                self.orientation,
                self.joint_positions,
            ]
        )
        if not np.all(np.isfinite(state_values)):
            raise SimulationFault(
                f"non-finite simulation state at t={self.time:.4f}",
                dump=self.state_dump(),
            )

        sample = ImuSample(gyro=gyro, accel=accel, timestamp=self.time)
        return sample, JointState(
            position=self.joint_positions.copy(), velocity=self.joint_velocities.copy()
        )

    def state_dump(self) -> dict[str, Any]:
        return {
            "time": self.time,
            "position": self.position.tolist(),
            "com_position": self.com_position.tolist(),
            "linear_velocity": self.linear_velocity.tolist(),
            "angular_velocity": self.angular_velocity.tolist(),
            "orientation": self.orientation.tolist(),
            "joint_positions": self.joint_positions.tolist(),
            "joint_velocities": self.joint_velocities.tolist(),
            "support": self._support.as_dict(),
        }
