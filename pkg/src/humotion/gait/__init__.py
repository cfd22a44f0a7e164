"""Closed-loop omnidirectional walking."""

from .config import FEEDBACK_CHANNELS, FeedbackVector, GaitCommand, GaitConfig
from .cpg import blend_pose, expected_attitude, limb_cycle, open_loop_pose, phase_step
from .engine import GaitEngine, GaitState, GaitStepResult
from .feedback import (
    FeedbackOffsets,
    FeedbackState,
    apply_feedback,
    deviation_feedback,
    timing_feedback,
    virtual_slope,
)
from .filters import EwIntegrator, MeanFilter, WlbfFilter, soft_deadband

__all__ = [
    "FEEDBACK_CHANNELS",
    "FeedbackVector",
    "GaitCommand",
    "GaitConfig",
    "blend_pose",
    "expected_attitude",
    "limb_cycle",
    "open_loop_pose",
    "phase_step",
    "GaitEngine",
    "GaitState",
    "GaitStepResult",
    "FeedbackOffsets",
    "FeedbackState",
    "apply_feedback",
    "deviation_feedback",
    "timing_feedback",
    "virtual_slope",
    "EwIntegrator",
    "MeanFilter",
    "WlbfFilter",
    "soft_deadband",
]
