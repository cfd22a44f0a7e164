"""Walking configuration and command types."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

# feedback output channels, in gain-matrix row order
FEEDBACK_CHANNELS = ("foot", "leg", "hip", "arm", "com")


def _default_gain_matrix() -> np.ndarray:
    # rows: foot, leg, hip, arm, com; columns: P, I, D
    return np.array(
        [
            [0.50, 0.10, 0.05],
            [0.20, 0.05, 0.02],
            [0.10, 0.02, 0.01],
            [0.40, 0.00, 0.05],
            [0.04, 0.01, 0.00],
        ]
    )


@dataclass
class GaitCommand:
    vx: float = 0.0  # m/s, forward
    vy: float = 0.0  # m/s, leftward
    wz: float = 0.0  # rad/s, counterclockwise
    walk: bool = False


@dataclass
class GaitConfig:
    frequency: float = 1.6  # full gait cycles per second
    double_support_length: float = 0.35  # phase window, rad
    nominal_extension: float = 0.95
    step_height: float = 0.04  # m
    leg_span_m: float = 0.42  # extension-to-length scale; engine sets from model
    sagittal_lift_trim: float = 0.03  # rad, added to the swing leg angle
    sway_amplitude: float = 0.02  # m, lateral CoM sway
    sagittal_swing_gain: float = 0.35  # rad per m/s of vx
    lateral_swing_gain: float = 0.45  # rad per m/s of vy
    yaw_swing_gain: float = 0.50  # rad per rad/s of wz
    arm_swing_gain: float = 0.70  # arm counter-swing ratio
    hip_velocity_gain: float = 0.02  # m of CoM shift per m/s (velocity-based leaning)
    lean_acceleration_gain: float = 0.08  # rad per m/s^2 (acceleration-based leaning)
    gains: np.ndarray = field(default_factory=_default_gain_matrix)
    deadband_pitch: float = 0.04  # rad
    deadband_roll: float = 0.04  # rad
    mean_window: int = 5
    integrator_half_life: float = 0.5  # s
    wlbf_window: int = 5
    timing_gain: float = 1.2
    timing_deadband: float = 0.06  # rad
    virtual_slope_gain: float = 0.10  # m of foot lift per rad of deviation
    expected_pitch: tuple[float, float, float] = (0.0, 0.0, 0.0)  # amplitude, phase, offset
    expected_roll: tuple[float, float, float] = (0.0, 0.0, 0.0)
    max_vx: float = 0.40  # m/s
    max_vy: float = 0.20  # m/s
    max_wz: float = 0.90  # rad/s
    command_slew_time: float = 0.4  # s from zero to full command
    blend_time: float = 0.8  # s for walk enable/disable pose blending
    effort: float = 0.85

    def __post_init__(self):
        self.gains = np.asarray(self.gains, dtype=float)
        if self.gains.shape != (len(FEEDBACK_CHANNELS), 3):
            raise ValueError(f"gain matrix must be {len(FEEDBACK_CHANNELS)}x3")
        if not self.frequency > 0.0:
            raise ValueError("frequency must be positive")
        if not 0.0 <= self.double_support_length < math.pi / 2:
            raise ValueError("double support length must be in [0, pi/2)")
        if self.mean_window < 1 or self.wlbf_window < 2:
            raise ValueError("filter windows are too small")
        if not self.leg_span_m > 0.0:
            raise ValueError("leg span must be positive")
        for name in ("integrator_half_life", "blend_time", "command_slew_time"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")

    def clamp_command(self, cmd: GaitCommand) -> GaitCommand:
        return GaitCommand(
            vx=min(self.max_vx, max(-self.max_vx, cmd.vx)),
            vy=min(self.max_vy, max(-self.max_vy, cmd.vy)),
            wz=min(self.max_wz, max(-self.max_wz, cmd.wz)),
            walk=cmd.walk,
        )


@dataclass
class FeedbackVector:
    p_pitch: float = 0.0
    i_pitch: float = 0.0
    d_pitch: float = 0.0
    p_roll: float = 0.0
    i_roll: float = 0.0
    d_roll: float = 0.0

    def pitch_terms(self) -> np.ndarray:
        return np.array([self.p_pitch, self.i_pitch, self.d_pitch])

    def roll_terms(self) -> np.ndarray:
        return np.array([self.p_roll, self.i_roll, self.d_roll])

    def scaled(self, factor: float) -> "FeedbackVector":
        return FeedbackVector(**{f.name: getattr(self, f.name) * factor for f in fields(self)})
