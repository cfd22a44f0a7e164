"""Regenerate the shipped default robot model file (data/model_default.json).

Dimensions target a 90 cm biped massing 6.6 kg total. Per-link masses and
inertias are plausible estimates, flagged as such in the file's note field.
"""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "humotion" / "data" / "model_default.json"

DIMS = {
    "trunkHeight": 0.375,
    "shoulderOffsetY": 0.105,
    "shoulderOffsetZ": 0.30,
    "upperArmLength": 0.14,
    "lowerArmLength": 0.15,
    "neckOffsetZ": 0.375,
    "headOffsetZ": 0.03,
    "hipOffsetY": 0.055,
    "thighLength": 0.21,
    "shankLength": 0.21,
    "footHeight": 0.04,
    "footToeX": 0.13,
    "footHeelX": 0.07,
    "footHalfWidth": 0.045,
}


def diag(x, y, z):
    return [[x, 0.0, 0.0], [0.0, y, 0.0], [0.0, 0.0, z]]


def link(name, parent, offset, mass, com, inertia):
    return {
        "name": name,
        "parent": parent,
        "offset": offset,
        "mass": mass,
        "com": com,
        "inertia": inertia,
    }


def joint(name, parent, child, axis, limits):
    return {"name": name, "parent": parent, "child": child, "axis": axis, "limits": limits}


d = DIMS
links = [
    link("trunk", None, [0, 0, 0], 2.30, [0.0, 0, 0.15], diag(0.0222, 0.0192, 0.0068)),
    link("neck", "trunk", [0, 0, d["neckOffsetZ"]], 0.05, [0, 0, 0.015], diag(2e-5, 2e-5, 2e-5)),
    link("head", "neck", [0, 0, d["headOffsetZ"]], 0.45, [0.01, 0, 0.05], diag(6.5e-4, 6.5e-4, 6.5e-4)),
]
joints = [
    joint("headYaw", "trunk", "neck", [0, 0, 1], [-2.7, 2.7]),
    joint("headPitch", "neck", "head", [0, 1, 0], [-0.6, 1.0]),
]

for side, sign in (("l", 1.0), ("r", -1.0)):
    sh = f"{side}Shoulder"
    links += [
        link(f"{sh}", "trunk", [0, sign * d["shoulderOffsetY"], d["shoulderOffsetZ"]],
             0.10, [0, 0, 0], diag(5e-5, 5e-5, 5e-5)),
        link(f"{side}UpperArm", f"{sh}", [0, 0, 0],
             0.25, [0, 0, -0.07], diag(4.1e-4, 4.1e-4, 5e-5)),
        link(f"{side}LowerArm", f"{side}UpperArm", [0, 0, -d["upperArmLength"]],
             0.15, [0, 0, -0.06], diag(2.8e-4, 2.8e-4, 3e-5)),
    ]
    roll_lim = [-0.25, 1.65] if side == "l" else [-1.65, 0.25]
    joints += [
        joint(f"{sh}Pitch", "trunk", f"{sh}", [0, 1, 0], [-3.1, 3.1]),
        joint(f"{sh}Roll", f"{sh}", f"{side}UpperArm", [1, 0, 0], roll_lim),
        joint(f"{side}ElbowPitch", f"{side}UpperArm", f"{side}LowerArm", [0, 1, 0], [-2.6, 0.0]),
    ]

for side, sign in (("l", 1.0), ("r", -1.0)):
    links += [
        link(f"{side}Pelvis", "trunk", [0, sign * d["hipOffsetY"], 0],
             0.15, [0, 0, 0], diag(1e-4, 1e-4, 1e-4)),
        link(f"{side}Hip", f"{side}Pelvis", [0, 0, 0],
             0.15, [0, 0, 0], diag(1e-4, 1e-4, 1e-4)),
        link(f"{side}Thigh", f"{side}Hip", [0, 0, 0],
             0.50, [0, 0, -0.105], diag(1.84e-3, 1.84e-3, 2e-4)),
        link(f"{side}Shank", f"{side}Thigh", [0, 0, -d["thighLength"]],
             0.35, [0, 0, -0.105], diag(1.29e-3, 1.29e-3, 1.5e-4)),
        link(f"{side}Ankle", f"{side}Shank", [0, 0, -d["shankLength"]],
             0.10, [0, 0, 0], diag(5e-5, 5e-5, 5e-5)),
        link(f"{side}Foot", f"{side}Ankle", [0, 0, 0],
             0.145, [0.02, 0, -0.03], diag(1.17e-4, 4.86e-4, 5.81e-4)),
        link(f"{side}Sole", f"{side}Foot", [0, 0, -d["footHeight"]],
             0.005, [0, 0, 0], diag(1e-6, 1e-6, 1e-6)),
    ]
    roll_lim = [-0.6, 0.8] if side == "l" else [-0.8, 0.6]
    joints += [
        joint(f"{side}HipYaw", "trunk", f"{side}Pelvis", [0, 0, 1], [-1.6, 1.6]),
        joint(f"{side}HipRoll", f"{side}Pelvis", f"{side}Hip", [1, 0, 0], roll_lim),
        joint(f"{side}HipPitch", f"{side}Hip", f"{side}Thigh", [0, 1, 0], [-2.0, 1.0]),
        joint(f"{side}KneePitch", f"{side}Thigh", f"{side}Shank", [0, 1, 0], [0.0, 2.6]),
        joint(f"{side}AnkleRoll", f"{side}Shank", f"{side}Ankle", [1, 0, 0], [-0.8, 0.8]),
        joint(f"{side}AnklePitch", f"{side}Ankle", f"{side}Foot", [0, 1, 0], [-1.2, 1.2]),
    ]

ORDER = [
    "headYaw", "headPitch",
    "lShoulderPitch", "lShoulderRoll", "lElbowPitch",
    "rShoulderPitch", "rShoulderRoll", "rElbowPitch",
    "lHipYaw", "lHipRoll", "lHipPitch", "lKneePitch", "lAnkleRoll", "lAnklePitch",
    "rHipYaw", "rHipRoll", "rHipPitch", "rKneePitch", "rAnkleRoll", "rAnklePitch",
]
joints.sort(key=lambda j: ORDER.index(j["name"]))

doc = {
    "version": 1,
    "name": "desk90",
    "note": (
        "Default 90 cm / 6.6 kg biped. Link dimensions are design values; "
        "per-link masses, CoM offsets and inertias are invented estimates "
        "chosen to sum to the 6.6 kg total."
    ),
    "dimensions": DIMS,
    "links": links,
    "joints": joints,
}

total = sum(l["mass"] for l in links)
assert abs(total - 6.6) < 1e-9, total

OUT.parent.mkdir(parents=True, exist_ok=True)
OUT.write_text(json.dumps(doc, indent=2) + "\n")
print(f"wrote {OUT} ({total:.3f} kg, {len(links)} links, {len(joints)} joints)")
