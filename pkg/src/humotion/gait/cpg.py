"""Open-loop walking pattern: phase clock, limb cycle, and pose generation.

Each leg runs the same cyclic profile half a period apart. A limb's cycle
variable mu lives on the wrapped interval [-pi, pi): the window around 0 is
stance (foot on the ground moving backward relative to the trunk), the window
around +-pi is swing (foot lifted, moving forward). Double support is the
overlap where both feet are down, controlled by the configured phase width.
"""

from __future__ import annotations

import math

import numpy as np

from ..kinematics.poses import AbstractPose, default_halt_pose
from ..math3d import wrap_angle
from .config import GaitCommand, GaitConfig


def phase_step(phase: float, cfg: GaitConfig, timing_feedback: float, dt: float) -> float:
    """Advance the gait phase by one controller step.

    The phase rate is the nominal angular frequency plus the timing feedback
    term, which lets the stabilizer stretch or compress a step while the
    clock keeps moving forward.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    return wrap_angle(phase + (2.0 * math.pi * cfg.frequency + timing_feedback) * dt)


def limb_cycle(mu: float, double_support: float) -> tuple[float, float, float]:
    """Evaluate one limb's cycle at wrapped phase mu.

    Returns (lift, pos, support_activation) where lift in [0, 1] rises during
    swing, pos in [-1, 1] sweeps the limb from its front extreme (+1, just
    after touchdown) to its back extreme (-1, at liftoff) while grounded and
    back again while swinging, and support_activation in [0, 1] is the
    fraction of weight the limb should carry.
    """
    half = double_support / 2.0
    mu = wrap_angle(mu)
    if half <= mu <= math.pi - half:
        # swing: retract, travel forward, extend
        s = (mu - half) / (math.pi - double_support)
        lift = 0.5 * (1.0 - math.cos(2.0 * math.pi * s))
        pos = math.cos(math.pi * s)
        return lift, -pos, 0.0
    # stance, including both double-support ramps
    if mu > math.pi - half:
        r = (mu - (math.pi - half)) / (math.pi + double_support)
    else:
        r = (mu + math.pi + half) / (math.pi + double_support)
    pos = 1.0 - 2.0 * r
    activation = math.sin(math.pi * r)
    return 0.0, pos, activation


def expected_attitude(phase: float, cfg: GaitConfig) -> tuple[float, float]:
    """Model attitude (pitch, roll) the trunk should show at this phase."""
    ap, pp, cp = cfg.expected_pitch
    ar, pr, cr = cfg.expected_roll
    return (
        ap * math.sin(phase + pp) + cp,
        ar * math.sin(phase + pr) + cr,
    )


def open_loop_pose(
    phase: float,
    cmd: GaitCommand,
    cfg: GaitConfig,
    accel: tuple[float, float] = (0.0, 0.0),
) -> tuple[AbstractPose, np.ndarray]:
    """Generate the feedforward walking pose for one controller step.

    Returns the abstract pose and a CoM shift vector (meters, trunk frame)
    to be applied in inverse space. The shift carries the velocity-based
    lean and the lateral sway; the acceleration-based lean goes directly
    into the leg angles.
    """
    mu_left = wrap_angle(phase)
    mu_right = wrap_angle(phase + math.pi)

    pose = default_halt_pose()
    for leg in (pose.left_leg, pose.right_leg):
        leg.extension = cfg.nominal_extension
    amp_sag = cfg.sagittal_swing_gain * cmd.vx
    amp_lat = cfg.lateral_swing_gain * cmd.vy
    amp_yaw = cfg.yaw_swing_gain * cmd.wz
    lean_y = cfg.lean_acceleration_gain * accel[0]
    lean_x = -cfg.lean_acceleration_gain * accel[1]

    for mu, leg, arm in (
        (mu_left, pose.left_leg, pose.left_arm),
        (mu_right, pose.right_leg, pose.right_arm),
    ):
        lift, pos, _ = limb_cycle(mu, cfg.double_support_length)
        leg.extension = cfg.nominal_extension - (cfg.step_height / cfg.leg_span_m) * lift
        # pos=+1 right after touchdown: the foot is in front, i.e. the leg
        # angle is negative (forward) when walking forward with vx > 0.
        leg.leg_angle_y = -amp_sag * pos + cfg.sagittal_lift_trim * lift + lean_y
        leg.leg_angle_x = amp_lat * pos + lean_x
        leg.leg_angle_z = amp_yaw * pos
        arm.arm_angle_y = cfg.arm_swing_gain * amp_sag * pos

    com_shift = np.array(
        [
            cfg.hip_velocity_gain * cmd.vx,
            -cfg.sway_amplitude * math.sin(phase),
            0.0,
        ]
    )
    return pose, com_shift


def blend_pose(gait_pose: AbstractPose, halt_pose: AbstractPose, factor: float) -> AbstractPose:
    """Interpolate between the halt pose (factor 0) and the gait pose (factor 1).

    The factor is shaped by a smoothstep so blend-in and blend-out start and
    end with zero rate. Endpoints return exact copies of their input pose.
    """
    f = min(1.0, max(0.0, factor))
    w = f * f * (3.0 - 2.0 * f)
    if w == 0.0:
        return halt_pose.copy()
    if w == 1.0:
        return gait_pose.copy()

    out = halt_pose.copy()
    for name in ("left_leg", "right_leg"):
        a = getattr(halt_pose, name)
        b = getattr(gait_pose, name)
        o = getattr(out, name)
        for field in (
            "extension",
            "foot_angle_x",
            "foot_angle_y",
            "leg_angle_x",
            "leg_angle_y",
            "leg_angle_z",
        ):
            setattr(o, field, getattr(a, field) + w * (getattr(b, field) - getattr(a, field)))
    for name in ("left_arm", "right_arm"):
        a = getattr(halt_pose, name)
        b = getattr(gait_pose, name)
        o = getattr(out, name)
        for field in ("extension", "arm_angle_x", "arm_angle_y"):
            setattr(o, field, getattr(a, field) + w * (getattr(b, field) - getattr(a, field)))
    out.head_yaw = halt_pose.head_yaw + w * (gait_pose.head_yaw - halt_pose.head_yaw)
    out.head_pitch = halt_pose.head_pitch + w * (gait_pose.head_pitch - halt_pose.head_pitch)
    return out
