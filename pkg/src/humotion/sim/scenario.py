"""Closed-loop scenario runner: estimation, gait, and physics in one loop.

A scenario file scripts velocity commands and push disturbances over a
fixed duration. The runner wires the simulated IMU into the attitude
filter, the filtered attitude into the walking engine, and the engine's
joint commands back into the simulation, then reports whether the robot
stayed up and how far it travelled.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .. import default_model
from ..estimation import (
    FallState,
    fall_detect,
    filter_update,
    fused_from_quat,
    initial_state,
)
from ..gait import GaitCommand, GaitConfig, GaitEngine, expected_attitude
from ..kinematics.model import RobotModel
from .world import MAX_TIMESTEP, SimWorld

SCENARIO_SCHEMA_VERSION = 1
CONTROL_RATE_HZ = 100.0
CONTROL_PERIOD = 1.0 / CONTROL_RATE_HZ

LOG_COLUMNS = (
    "t",
    "phase",
    "blend",
    "fused_pitch",
    "fused_roll",
    "dev_pitch",
    "dev_roll",
    "fb_p_pitch",
    "fb_i_pitch",
    "fb_d_pitch",
    "fb_p_roll",
    "fb_i_roll",
    "fb_d_roll",
    "com_x",
    "com_y",
    "com_z",
    "cmd_vx",
    "cmd_vy",
    "cmd_wz",
    "walk",
    "support_left",
    "support_right",
    "fell",
)


class ScenarioError(ValueError):
    """Raised for malformed or inconsistent scenario documents."""


@dataclass
class ScenarioMetrics:
    fell: bool
    mean_abs_fused_deviation: float
    distance_travelled: float
    steps: int

    def as_dict(self) -> dict[str, Any]:
        return {
            "fell": self.fell,
            "meanAbsFusedDeviation": self.mean_abs_fused_deviation,
            "distanceTravelled": self.distance_travelled,
            "steps": self.steps,
        }


def load_scenario(path: str | Path) -> dict[str, Any]:
    p = Path(path)
    try:
        doc = json.loads(p.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {p}: {exc}") from exc
    _validate(doc)
    return doc


def _validate(doc: Any) -> None:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    if doc.get("version") != SCENARIO_SCHEMA_VERSION:
        raise ScenarioError(
            f"scenario version must be {SCENARIO_SCHEMA_VERSION}, got {doc.get('version')!r}"
        )
    duration = doc.get("duration")
    if not isinstance(duration, (int, float)) or not duration > 0:
        raise ScenarioError("duration must be a positive number of seconds")
    if doc.get("model", "default") != "default":
        raise ScenarioError(f"unknown model {doc.get('model')!r}")
    timestep = doc.get("timestep", MAX_TIMESTEP)
    if not isinstance(timestep, (int, float)) or not 0.0 < timestep <= MAX_TIMESTEP:
        raise ScenarioError(f"timestep must be in (0, {MAX_TIMESTEP}]")
    substeps = CONTROL_PERIOD / timestep
    if abs(substeps - round(substeps)) > 1e-9 or round(substeps) < 1:
        raise ScenarioError("timestep must divide the 10 ms control period evenly")
    for i, entry in enumerate(doc.get("commands", [])):
        if not isinstance(entry, dict) or "t" not in entry:
            raise ScenarioError(f"commands[{i}] must be an object with a time 't'")
    for i, entry in enumerate(doc.get("disturbances", [])):
        if not isinstance(entry, dict) or "t" not in entry:
            raise ScenarioError(f"disturbances[{i}] must be an object with a time 't'")
        impulse = entry.get("impulse")
        if not isinstance(impulse, (list, tuple)) or len(impulse) != 3:
            raise ScenarioError(f"disturbances[{i}].impulse must be a 3-vector (N*s)")


def _build_config(doc: dict[str, Any]) -> GaitConfig:
    overrides = dict(doc.get("gaitConfig", {}))
    if "gains" in overrides:
        overrides["gains"] = np.asarray(overrides["gains"], dtype=float)
    try:
        cfg = GaitConfig(**overrides)
    except TypeError as exc:
        raise ScenarioError(f"unknown gait config field: {exc}") from exc
    except ValueError as exc:
        raise ScenarioError(f"bad gait config value: {exc}") from exc
    if not doc.get("feedbackEnabled", True):
        cfg.gains = np.zeros_like(cfg.gains)
        cfg.timing_gain = 0.0
        cfg.virtual_slope_gain = 0.0
    return cfg


def run_scenario(
    scenario: dict[str, Any] | str | Path,
    log_path: str | Path | None = None,
    model: RobotModel | None = None,
) -> ScenarioMetrics:
    """Run one scripted scenario to completion and return its metrics."""
    if isinstance(scenario, (str, Path)):
        doc = load_scenario(scenario)
    else:
        _validate(scenario)
        doc = scenario

    if model is None:
        model = default_model()
    cfg = _build_config(doc)
    engine = GaitEngine(model, cfg)
    timestep = float(doc.get("timestep", MAX_TIMESTEP))
    substeps = round(CONTROL_PERIOD / timestep)
    world = SimWorld(
        model,
        joint_positions=engine.halt_position,
        seed=int(doc.get("seed", 0)),
        timestep=timestep,
    )
    est = initial_state()

    commands = sorted(doc.get("commands", []), key=lambda e: e["t"])
    disturbances = [dict(e, applied=False) for e in doc.get("disturbances", [])]

    start_xy = world.com_position[:2].copy()
    ticks = round(float(doc["duration"]) * CONTROL_RATE_HZ)
    deviation_sum = 0.0
    fell = False
    steps = 0
    rows: list[list[float]] = [] if log_path is not None else None

    for tick in range(ticks):
        now = tick * CONTROL_PERIOD

        active = {"vx": 0.0, "vy": 0.0, "wz": 0.0, "walk": False}
        for entry in commands:
            if entry["t"] <= now:
                active = entry
            else:
                break
        cmd = GaitCommand(
            vx=float(active.get("vx", 0.0)),
            vy=float(active.get("vy", 0.0)),
            wz=float(active.get("wz", 0.0)),
            walk=bool(active.get("walk", False)),
        )

        for dist in disturbances:
            if not dist["applied"] and dist["t"] <= now:
                world.apply_impulse(np.asarray(dist["impulse"], dtype=float))
                dist["applied"] = True

        attitude = fused_from_quat(est.orientation)
        result = engine.step(cmd, attitude, CONTROL_PERIOD)

        for _ in range(substeps):
            sample, _joints = world.step(result.command, timestep)
            est = filter_update(est, sample, timestep)

        steps += 1
        fused = fused_from_quat(est.orientation)
        exp_pitch, exp_roll = expected_attitude(result.phase, cfg)
        dev_pitch = fused.pitch - exp_pitch
        dev_roll = fused.roll - exp_roll
        deviation_sum += 0.5 * (abs(dev_pitch) + abs(dev_roll))
        fell = fall_detect(fused) is FallState.FALLING

        if rows is not None:
            fb = result.feedback
            support = result.command.support
            rows.append(
                [
                    now + CONTROL_PERIOD,
                    result.phase,
                    result.blend,
                    fused.pitch,
                    fused.roll,
                    dev_pitch,
                    dev_roll,
                    fb.p_pitch,
                    fb.i_pitch,
                    fb.d_pitch,
                    fb.p_roll,
                    fb.i_roll,
                    fb.d_roll,
                    world.com_position[0],
                    world.com_position[1],
                    world.com_position[2],
                    cmd.vx,
                    cmd.vy,
                    cmd.wz,
                    int(cmd.walk),
                    support.left_leg,
                    support.right_leg,
                    int(fell),
                ]
            )
        if fell:
            break

    if rows is not None:
        with open(log_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(LOG_COLUMNS)
            writer.writerows(rows)

    return ScenarioMetrics(
        fell=fell,
        mean_abs_fused_deviation=deviation_sum / steps if steps else 0.0,
        distance_travelled=float(
            math.hypot(*(world.com_position[:2] - start_xy))
        ),
        steps=steps,
    )
