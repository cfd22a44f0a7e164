"""Closed-loop walking engine.

Composes the open-loop pattern, the attitude feedback pipeline, and the
pose blending into a single step() call that turns (command, measured
attitude, dt) into a full joint-space command. The engine owns all walking
state; stepping it with the same inputs from the same state is
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dynamics import JointCommand, gravity_compensation, support_profile
from ..estimation import FusedAngles
from ..kinematics import (
    RobotModel,
    abstract_to_joint,
    default_halt_pose,
    inverse_to_joint,
    joint_to_inverse,
)
from .config import GaitCommand, GaitConfig
from .cpg import blend_pose, expected_attitude, limb_cycle, open_loop_pose, phase_step
from .feedback import (
    FeedbackState,
    apply_feedback,
    deviation_feedback,
    timing_feedback,
    virtual_slope,
)


@dataclass
class GaitState:
    """Mutable walking state carried between controller steps."""

    phase: float = 0.0
    blend: float = 0.0
    vx: float = 0.0
    vy: float = 0.0
    wz: float = 0.0
    feedback: FeedbackState | None = None
    prev_q: np.ndarray | None = None


@dataclass
class GaitStepResult:
    command: JointCommand
    phase: float
    blend: float
    feedback: object
    limits_clamped: bool


def _extension_span(model: RobotModel) -> float:
    thigh = model.dims["thighLength"]
    shank = model.dims["shankLength"]
    return (thigh + shank) - abs(thigh - shank)


class GaitEngine:
    """Stateful walking controller for one robot model."""

    def __init__(self, model: RobotModel, cfg: GaitConfig | None = None):
        self.model = model
        self.cfg = cfg if cfg is not None else GaitConfig()
        # extension is dimensionless; scale step height by the reachable
        # hip-to-ankle span so the lift is a true height in meters
        self.cfg.leg_span_m = _extension_span(model)
        self.state = GaitState(feedback=FeedbackState.from_config(self.cfg))
        halt = default_halt_pose()
        for leg in (halt.left_leg, halt.right_leg):
            leg.extension = self.cfg.nominal_extension
        self._halt_pose = halt
        self._halt_q = abstract_to_joint(model, halt)

    def reset(self) -> None:
        self.state = GaitState(feedback=FeedbackState.from_config(self.cfg))

    @property
    def halt_position(self) -> np.ndarray:
        return self._halt_q.copy()

    def step(self, cmd: GaitCommand, attitude: FusedAngles, dt: float) -> GaitStepResult:
        if not dt > 0.0:
            raise ValueError("dt must be positive")
        cfg = self.cfg
        state = self.state
        cmd = cfg.clamp_command(cmd)

        # slew the tracked command; disabled walking pulls it back to zero
        target = (cmd.vx, cmd.vy, cmd.wz) if cmd.walk else (0.0, 0.0, 0.0)
        limits = (cfg.max_vx, cfg.max_vy, cfg.max_wz)
        current = (state.vx, state.vy, state.wz)
        slewed = []
        for value, goal, limit in zip(current, target, limits):
            max_step = (limit / cfg.command_slew_time) * dt
            delta = min(max_step, max(-max_step, goal - value))
            slewed.append(value + delta)
        accel = ((slewed[0] - state.vx) / dt, (slewed[1] - state.vy) / dt)
        state.vx, state.vy, state.wz = slewed
        smoothed = GaitCommand(vx=state.vx, vy=state.vy, wz=state.wz, walk=cmd.walk)

        # attitude feedback against the phase-expected trunk motion
        expected = expected_attitude(state.phase, cfg)
        fb = deviation_feedback(attitude, expected, state.feedback, cfg, dt)
        tf = timing_feedback(attitude.roll - expected[1], state.phase, cfg)

        state.phase = phase_step(state.phase, cfg, tf, dt)
        phase = state.phase

        pose, com_shift = open_loop_pose(phase, smoothed, cfg, accel)

        cycle_left = limb_cycle(phase, cfg.double_support_length)
        cycle_right = limb_cycle(phase + np.pi, cfg.double_support_length)
        offsets = apply_feedback(fb, cfg, cycle_left, cycle_right)
        for leg, foot_off, leg_off in (
            (pose.left_leg, offsets.foot_left, offsets.leg_left),
            (pose.right_leg, offsets.foot_right, offsets.leg_right),
        ):
            leg.foot_angle_x += foot_off[0]
            leg.foot_angle_y += foot_off[1]
            leg.leg_angle_x += leg_off[0] + offsets.hip[0]
            leg.leg_angle_y += leg_off[1] + offsets.hip[1]
        for arm in (pose.left_arm, pose.right_arm):
            arm.arm_angle_x += offsets.arm[0]
            arm.arm_angle_y += offsets.arm[1]

        # fade the walking pose in and out around the halt pose
        blend_target = 1.0 if cmd.walk else 0.0
        max_blend_step = dt / cfg.blend_time
        delta = min(max_blend_step, max(-max_blend_step, blend_target - state.blend))
        state.blend = min(1.0, max(0.0, state.blend + delta))
        blended = blend_pose(pose, self._halt_pose, state.blend)
        q = abstract_to_joint(self.model, blended)

        # CoM shift and extra swing clearance act in inverse space, scaled
        # by the same smoothstep weight the pose blend uses
        b = state.blend
        w = b * b * (3.0 - 2.0 * b)
        com_total = w * (com_shift[:2] + offsets.com)
        slope_left = w * virtual_slope(fb.p_pitch, cycle_left[0], smoothed, cfg)
        slope_right = w * virtual_slope(fb.p_pitch, cycle_right[0], smoothed, cfg)
        ik_clamped = False
        if np.any(com_total != 0.0) or slope_left != 0.0 or slope_right != 0.0:
            inv = joint_to_inverse(self.model, q)
            for leg, slope in ((inv.left_leg, slope_left), (inv.right_leg, slope_right)):
                leg.position = leg.position + np.array(
                    [-com_total[0], -com_total[1], slope]
                )
            q, ik_clamped = inverse_to_joint(self.model, inv)

        q, limit_clamped = self.model.clamp_to_limits(q)
        velocity = np.zeros_like(q) if state.prev_q is None else (q - state.prev_q) / dt
        state.prev_q = q

        support = support_profile(phase, cfg.double_support_length)
        command = JointCommand(
            position=q,
            velocity=velocity,
            acceleration=np.zeros_like(q),
            feed_forward_torque=gravity_compensation(self.model, q, support),
            effort=np.full_like(q, cfg.effort),
            support=support,
        )
        return GaitStepResult(
            command=command,
            phase=phase,
            blend=state.blend,
            feedback=fb,
            limits_clamped=bool(limit_clamped or ik_clamped),
        )
