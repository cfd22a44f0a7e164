"""Author the shipped motion library.

Poses are composed from the abstract-pose helpers where a stable stance is
needed and written in joint space elsewhere. Output files go through the
canonical serializer, so they are byte-stable under parse/serialize.
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import humotion
from humotion.dynamics import SupportCoefficients
from humotion.kinematics import CANONICAL_JOINT_ORDER, abstract_to_joint, default_halt_pose, mirror_joint_pose
from humotion.motions import Keyframe, Motion, save_motion

MODEL = humotion.default_model()
IDX = {name: i for i, name in enumerate(CANONICAL_JOINT_ORDER)}
OUT = Path(__file__).resolve().parents[1] / "src" / "humotion" / "data" / "motions"

HALT = abstract_to_joint(MODEL, default_halt_pose())


def pose(base=None, **joints):
    q = (HALT if base is None else base).copy()
    for name, value in joints.items():
        q[IDX[name]] = value
    lo = np.array([j.limits[0] for j in MODEL.joints])
    hi = np.array([j.limits[1] for j in MODEL.joints])
    if np.any(q < lo - 1e-12) or np.any(q > hi + 1e-12):
        bad = [MODEL.joints[i].name for i in np.where((q < lo) | (q > hi))[0]]
        raise SystemExit(f"pose violates limits: {bad}")
    return q


def vel(**joints):
    v = np.zeros(20)
    for name, value in joints.items():
        v[IDX[name]] = value
    return v


def frame(q, duration, support, effort=0.7, velocities=None, arms=None, legs=None, pose_space=None):
    eff = np.full(20, effort)
    if arms is not None:
        eff[2:8] = arms
    if legs is not None:
        eff[8:20] = legs
    return Keyframe(
        duration=duration,
        positions=q,
        velocities=np.zeros(20) if velocities is None else velocities,
        efforts=eff,
        support=support,
        pose_space=pose_space,
    )


BOTH = SupportCoefficients(left_leg=0.5, right_leg=0.5)
LEFT = SupportCoefficients(left_leg=1.0)
ARMS = SupportCoefficients(left_arm=0.5, right_arm=0.5)
ARMS_AND_LEGS = SupportCoefficients(left_leg=0.25, right_leg=0.25, left_arm=0.25, right_arm=0.25)
NONE = SupportCoefficients()


def build_wave():
    up = pose(rShoulderPitch=-2.4, rShoulderRoll=-0.4, rElbowPitch=-0.5)
    out = pose(rShoulderPitch=-2.4, rShoulderRoll=-0.4, rElbowPitch=-1.1)
    return Motion(
        "wave",
        "standing",
        [
            frame(pose(), 0.6, BOTH, pose_space="abstract"),
            frame(up, 0.4, BOTH, arms=0.9, pose_space="joint"),
            frame(out, 0.4, BOTH, arms=0.9, velocities=vel(rElbowPitch=1.2), pose_space="joint"),
            frame(up, 0.4, BOTH, arms=0.9, velocities=vel(rElbowPitch=-1.2), pose_space="joint"),
            frame(out, 0.6, BOTH, arms=0.9, pose_space="joint"),
            frame(pose(), 0.0, BOTH, pose_space="abstract"),
        ],
    )


def build_kick():
    shift = pose(lHipRoll=0.12, lAnkleRoll=-0.12, rHipRoll=0.12, rAnkleRoll=-0.12)
    lift = pose(shift, rHipPitch=-0.5, rKneePitch=1.2, rAnklePitch=-0.3)
    back = pose(shift, rHipPitch=0.35, rKneePitch=1.6, rAnklePitch=-0.5)
    through = pose(shift, rHipPitch=-0.9, rKneePitch=0.4, rAnklePitch=0.2)
    return Motion(
        "kick",
        "standing",
        [
            frame(pose(), 0.7, BOTH, pose_space="abstract"),
            frame(shift, 0.5, LEFT, legs=0.9),
            frame(lift, 0.4, LEFT, legs=0.9),
            frame(back, 0.3, LEFT, legs=1.0),
            frame(through, 1.3, LEFT, legs=1.0, velocities=vel(rHipPitch=-3.0, rKneePitch=-2.0)),
            frame(pose(), 0.0, BOTH, pose_space="abstract"),
        ],
    )


def build_getup_prone():
    flat = pose(
        np.zeros(20),
        lShoulderPitch=-2.9, rShoulderPitch=-2.9,
        lElbowPitch=-0.2, rElbowPitch=-0.2,
        headPitch=-0.3,
    )
    arms_under = pose(
        flat,
        lShoulderPitch=-2.2, rShoulderPitch=-2.2,
        lElbowPitch=-2.2, rElbowPitch=-2.2,
    )
    push = pose(
        arms_under,
        lElbowPitch=-0.4, rElbowPitch=-0.4,
        lHipPitch=-1.0, rHipPitch=-1.0,
        lKneePitch=1.4, rKneePitch=1.4,
        headPitch=0.4,
    )
    tuck = pose(
        push,
        lShoulderPitch=-0.6, rShoulderPitch=-0.6,
        lHipPitch=-1.9, rHipPitch=-1.9,
        lKneePitch=2.5, rKneePitch=2.5,
        lAnklePitch=-0.6, rAnklePitch=-0.6,
    )
    crouch = pose(
        lHipPitch=-1.5, rHipPitch=-1.5,
        lKneePitch=2.4, rKneePitch=2.4,
        lAnklePitch=-0.9, rAnklePitch=-0.9,
    )
    return Motion(
        "getup_prone",
        "prone",
        [
            frame(flat, 0.5, NONE, effort=0.5),
            frame(arms_under, 0.5, ARMS, arms=0.9),
            frame(push, 0.6, ARMS, arms=1.0, legs=0.8),
            frame(tuck, 0.5, ARMS_AND_LEGS, arms=1.0, legs=1.0),
            frame(crouch, 0.5, BOTH, legs=1.0),
            frame(pose(), 0.4, BOTH, legs=0.9, pose_space="abstract"),
            frame(pose(), 0.0, BOTH),
        ],
    )


def build_getup_supine():
    flat = pose(
        np.zeros(20),
        lShoulderPitch=0.3, rShoulderPitch=0.3,
        headPitch=0.3,
    )
    arms_back = pose(
        flat,
        lShoulderPitch=2.8, rShoulderPitch=2.8,
        lElbowPitch=-0.3, rElbowPitch=-0.3,
    )
    situp = pose(
        arms_back,
        lHipPitch=-1.2, rHipPitch=-1.2,
        lKneePitch=0.6, rKneePitch=0.6,
        headPitch=0.8,
    )
    tuck = pose(
        situp,
        lHipPitch=-1.9, rHipPitch=-1.9,
        lKneePitch=2.5, rKneePitch=2.5,
        lAnklePitch=-0.9, rAnklePitch=-0.9,
        lShoulderPitch=1.2, rShoulderPitch=1.2,
    )
    rock = pose(
        tuck,
        lShoulderPitch=-0.8, rShoulderPitch=-0.8,
        lAnklePitch=-1.1, rAnklePitch=-1.1,
    )
    crouch = pose(
        lHipPitch=-1.5, rHipPitch=-1.5,
        lKneePitch=2.4, rKneePitch=2.4,
        lAnklePitch=-0.9, rAnklePitch=-0.9,
    )
    return Motion(
        "getup_supine",
        "supine",
        [
            frame(flat, 0.6, NONE, effort=0.5),
            frame(arms_back, 0.6, ARMS, arms=0.9),
            frame(situp, 0.6, ARMS, arms=1.0),
            frame(tuck, 0.6, ARMS_AND_LEGS, arms=1.0, legs=0.9),
            frame(rock, 0.6, ARMS_AND_LEGS, legs=1.0),
            frame(crouch, 0.5, BOTH, legs=1.0),
            frame(pose(), 0.5, BOTH, legs=0.9, pose_space="abstract"),
            frame(pose(), 0.0, BOTH),
        ],
    )


def build_side(side: str, target: str):
    # roll from a sideways lie onto the target face, then hand off to that
    # get-up; authored for the left side, mirrored for the right
    lying = pose(
        np.zeros(20),
        lShoulderPitch=-1.2, rShoulderPitch=-1.2,
        lHipRoll=0.3, rHipRoll=0.3,
    )
    if target == "prone":
        swing = pose(
            lying,
            lShoulderPitch=-2.8, rShoulderPitch=-2.8,
            lHipYaw=0.8, rHipYaw=0.8,
            lKneePitch=1.0, rKneePitch=1.0,
        )
        landed = pose(
            np.zeros(20),
            lShoulderPitch=-2.9, rShoulderPitch=-2.9,
            lElbowPitch=-0.2, rElbowPitch=-0.2,
            headPitch=-0.3,
        )
    else:
        swing = pose(
            lying,
            lShoulderPitch=1.8, rShoulderPitch=1.8,
            lHipYaw=-0.8, rHipYaw=-0.8,
            lHipPitch=-0.6, rHipPitch=-0.6,
        )
        landed = pose(
            np.zeros(20),
            lShoulderPitch=0.3, rShoulderPitch=0.3,
            headPitch=0.3,
        )
    q0, q1, q2 = lying, swing, landed
    v1 = vel(lHipYaw=1.5, rHipYaw=1.5)
    if side == "right":
        q0, q1, q2 = (mirror_joint_pose(q) for q in (q0, q1, q2))
        v1 = mirror_joint_pose(v1)
    return Motion(
        f"getup_{side}_to_{target}",
        f"{side}Side",
        [
            frame(q0, 0.7, NONE, effort=0.5),
            frame(q1, 0.7, ARMS, arms=0.9, velocities=v1),
            frame(q2, 0.6, NONE, effort=0.6),
            frame(q2, 0.0, NONE, effort=0.6),
        ],
    )


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    motions = [
        build_wave(),
        build_kick(),
        build_getup_prone(),
        build_getup_supine(),
        build_side("left", "prone"),
        build_side("left", "supine"),
        build_side("right", "prone"),
        build_side("right", "supine"),
    ]
    for m in motions:
        path = OUT / f"{m.name}.json"
        save_motion(m, path)
        total = sum(f.duration for f in m.keyframes[:-1])
        print(f"{path.name:28s} {m.precondition:10s} {len(m.keyframes)} frames  {total:.1f}s")


if __name__ == "__main__":
    main()
