"""Attitude-deviation feedback for the walking engine.

All corrective action derives from the fused pitch and roll deviations
between the measured trunk attitude and the phase-dependent expectation.
Each axis runs a mean filter (P), a decaying integrator (I), and a weighted
line-of-best-fit slope (D); a gain matrix maps the resulting PID vector to
corrective offsets on the feet, legs, hips, arms, and CoM.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..estimation import FusedAngles
from .config import FeedbackVector, GaitCommand, GaitConfig
from .filters import EwIntegrator, MeanFilter, WlbfFilter, soft_deadband


@dataclass
class FeedbackState:
    """Filter bank for one walking session. Reset when walking (re)starts."""

    mean_pitch: MeanFilter
    mean_roll: MeanFilter
    integ_pitch: EwIntegrator
    integ_roll: EwIntegrator
    slope_pitch: WlbfFilter
    slope_roll: WlbfFilter

    @classmethod
    def from_config(cls, cfg: GaitConfig) -> "FeedbackState":
        return cls(
            mean_pitch=MeanFilter(cfg.mean_window),
            mean_roll=MeanFilter(cfg.mean_window),
            integ_pitch=EwIntegrator(cfg.integrator_half_life),
            integ_roll=EwIntegrator(cfg.integrator_half_life),
            slope_pitch=WlbfFilter(cfg.wlbf_window),
            slope_roll=WlbfFilter(cfg.wlbf_window),
        )

    def reset(self) -> None:
        self.mean_pitch.reset()
        self.mean_roll.reset()
        self.integ_pitch.reset()
        self.integ_roll.reset()
        self.slope_pitch.reset()
        self.slope_roll.reset()


def deviation_feedback(
    measured: FusedAngles,
    expected: tuple[float, float],
    state: FeedbackState,
    cfg: GaitConfig,
    dt: float,
) -> FeedbackVector:
    """Update the filter bank with one attitude sample and emit PID terms."""
    dev_pitch = measured.pitch - expected[0]
    dev_roll = measured.roll - expected[1]
    return FeedbackVector(
        p_pitch=soft_deadband(state.mean_pitch.update(dev_pitch), cfg.deadband_pitch),
        i_pitch=state.integ_pitch.update(dev_pitch, dt),
        d_pitch=state.slope_pitch.update(dev_pitch, dt),
        p_roll=soft_deadband(state.mean_roll.update(dev_roll), cfg.deadband_roll),
        i_roll=state.integ_roll.update(dev_roll, dt),
        d_roll=state.slope_roll.update(dev_roll, dt),
    )


def timing_feedback(roll_deviation: float, phase: float, cfg: GaitConfig) -> float:
    """Phase-rate adjustment that retimes touchdown from the lateral lean.

    Positive roll means the right side is down. During left support
    (sin(phase) < 0), leaning outward over the support foot (negative
    deviation) slows the step so the swing foot stays airborne until the
    weight rocks back; leaning toward the swing side (positive deviation)
    speeds the step up so the next foot catches the fall. Right support
    mirrors both rules.
    """
    s = math.sin(phase)
    if s == 0.0:
        return 0.0
    lean = soft_deadband(roll_deviation, cfg.timing_deadband)
    return -cfg.timing_gain * math.copysign(1.0, s) * lean


def virtual_slope(
    pitch_deviation: float,
    swing_state: float,
    cmd: GaitCommand,
    cfg: GaitConfig,
) -> float:
    """Extra swing-foot ground clearance (meters) when tipping into the walk.

    Only a deviation in the direction of travel counts: walking forward and
    pitching forward lifts the swing foot as if climbing a slope, while
    pitching backward leaves the trajectory untouched. Scales with how far
    the limb is into its swing.
    """
    direction = 0.0 if cmd.vx == 0.0 else math.copysign(1.0, cmd.vx)
    uphill = max(0.0, pitch_deviation * direction)
    return cfg.virtual_slope_gain * uphill * swing_state


@dataclass
class FeedbackOffsets:
    """Corrective offsets in abstract-pose units, plus a CoM shift in meters.

    Angle pairs are ordered (x, y): roll-axis component first, pitch-axis
    component second. The CoM shift is (x, y) in the trunk frame.
    """

    foot_left: np.ndarray = field(default_factory=lambda: np.zeros(2))
    foot_right: np.ndarray = field(default_factory=lambda: np.zeros(2))
    leg_left: np.ndarray = field(default_factory=lambda: np.zeros(2))
    leg_right: np.ndarray = field(default_factory=lambda: np.zeros(2))
    hip: np.ndarray = field(default_factory=lambda: np.zeros(2))
    arm: np.ndarray = field(default_factory=lambda: np.zeros(2))
    com: np.ndarray = field(default_factory=lambda: np.zeros(2))


def apply_feedback(
    fb: FeedbackVector,
    cfg: GaitConfig,
    cycle_left: tuple[float, float, float],
    cycle_right: tuple[float, float, float],
) -> FeedbackOffsets:
    """Map PID terms through the gain matrix onto per-channel offsets.

    Foot corrections act on the grounded side (scaled by its support
    activation) and tilt the sole against the deviation: tipping forward
    presses the toes down. Leg corrections move the swing leg (scaled by
    its lift) to adjust the upcoming foothold. Hip and arm corrections act
    on both sides at all times; arms swing backward when tipping forward.
    The CoM channel is a translation: x from pitch, y from roll.
    """
    pitch_out = cfg.gains @ fb.pitch_terms()
    roll_out = cfg.gains @ fb.roll_terms()

    lift_left, _, act_left = cycle_left
    lift_right, _, act_right = cycle_right

    return FeedbackOffsets(
        foot_left=np.array([roll_out[0], pitch_out[0]]) * act_left,
        foot_right=np.array([roll_out[0], pitch_out[0]]) * act_right,
        leg_left=np.array([-roll_out[1], -pitch_out[1]]) * lift_left,
        leg_right=np.array([-roll_out[1], -pitch_out[1]]) * lift_right,
        hip=np.array([-roll_out[2], -pitch_out[2]]),
        arm=np.array([roll_out[3], pitch_out[3]]),
        com=np.array([-pitch_out[4], -roll_out[4]]),
    )
