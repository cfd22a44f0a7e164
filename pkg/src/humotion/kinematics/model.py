"""Rigid-body tree model: links, revolute joints, FK, CoM, re-rooting.

The model is loaded from a versioned JSON document and validated against
the canonical 20-joint layout (head yaw/pitch, three joints per arm,
six per leg with hip yaw -> roll -> pitch and ankle roll -> pitch).
Link frames all coincide with the trunk orientation at the zero pose;
each joint rotates its child link about an axis through the child
frame origin.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..math3d import make_transform, rot_axis, transform_point

MODEL_SCHEMA_VERSION = 1

CANONICAL_JOINT_ORDER: tuple[str, ...] = (
    "headYaw",
    "headPitch",
    "lShoulderPitch",
    "lShoulderRoll",
    "lElbowPitch",
    "rShoulderPitch",
    "rShoulderRoll",
    "rElbowPitch",
    "lHipYaw",
    "lHipRoll",
    "lHipPitch",
    "lKneePitch",
    "lAnkleRoll",
    "lAnklePitch",
    "rHipYaw",
    "rHipRoll",
    "rHipPitch",
    "rKneePitch",
    "rAnkleRoll",
    "rAnklePitch",
)

# axis each canonical joint must rotate about (yaw = z, roll = x, pitch = y)
_AXIS_BY_SUFFIX = {"Yaw": (0.0, 0.0, 1.0), "Roll": (1.0, 0.0, 0.0), "Pitch": (0.0, 1.0, 0.0)}

REQUIRED_DIMENSIONS = (
    "trunkHeight",
    "shoulderOffsetY",
    "shoulderOffsetZ",
    "upperArmLength",
    "lowerArmLength",
    "neckOffsetZ",
    "headOffsetZ",
    "hipOffsetY",
    "thighLength",
    "shankLength",
    "footHeight",
    "footToeX",
    "footHeelX",
    "footHalfWidth",
)

LEG_JOINTS = ("HipYaw", "HipRoll", "HipPitch", "KneePitch", "AnkleRoll", "AnklePitch")
ARM_JOINTS = ("ShoulderPitch", "ShoulderRoll", "ElbowPitch")


class ModelError(ValueError):
    """Raised when a model document violates the layout contract."""


def canonical_axis(joint_name: str) -> np.ndarray:
    for suffix, axis in _AXIS_BY_SUFFIX.items():
        if joint_name.endswith(suffix):
            return np.array(axis)
    raise ModelError(f"joint {joint_name!r} has no yaw/roll/pitch suffix")


@dataclass(frozen=True)
class Link:
    name: str
    parent: str | None
    offset: np.ndarray  # fixed translation in parent frame, m
    mass: float  # kg
    com: np.ndarray  # CoM offset in link frame, m
    inertia: np.ndarray  # 3x3 about CoM, link frame, kg m^2


@dataclass(frozen=True)
class Joint:
    name: str
    parent: str
    child: str
    axis: np.ndarray  # unit axis in child frame
    limits: tuple[float, float]  # rad
    index: int  # canonical position in the joint vector


@dataclass(frozen=True)
class RobotModel:
    """Immutable kinematic/dynamic tree with the canonical joint vector."""

    name: str
    links: tuple[Link, ...]  # topological order, root first
    joints: tuple[Joint, ...]  # canonical order
    dims: dict[str, float]
    _link_by_name: dict[str, Link] = field(repr=False, default_factory=dict)
    _joint_by_child: dict[str, Joint] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "_link_by_name", {l.name: l for l in self.links})
        object.__setattr__(self, "_joint_by_child", {j.child: j for j in self.joints})

    @property
    def root(self) -> Link:
        return self.links[0]

    @property
    def joint_names(self) -> tuple[str, ...]:
        return tuple(j.name for j in self.joints)

    @property
    def total_mass(self) -> float:
        return sum(l.mass for l in self.links)

    def link(self, name: str) -> Link:
        try:
            return self._link_by_name[name]
        except KeyError:
            raise ModelError(f"unknown link {name!r}") from None

    def joint_for(self, link_name: str) -> Joint | None:
        """Joint driving the given link, or None for fixed/root links."""
        return self._joint_by_child.get(link_name)

    def children(self, link_name: str) -> list[Link]:
        return [l for l in self.links if l.parent == link_name]

    def clamp_to_limits(self, q: np.ndarray) -> tuple[np.ndarray, bool]:
        """Clamp a joint vector to the model limits; flags whether clamping bit."""
        lo = np.array([j.limits[0] for j in self.joints])
        hi = np.array([j.limits[1] for j in self.joints])
        out = np.clip(q, lo, hi)
        return out, bool(np.any(out != np.asarray(q, dtype=float)))

    # kinematics -----------------------------------------------------

    def forward_kinematics(self, q: np.ndarray) -> dict[str, np.ndarray]:
        """Transform of every link frame relative to the root frame.

        q is the canonical 20-vector (or matching joint count for reduced
        models); entries index by Joint.index.
        """
        q = np.asarray(q, dtype=float)
        if not np.all(np.isfinite(q)):
            raise ValueError("joint vector must be finite")
        transforms: dict[str, np.ndarray] = {}
        for link in self.links:
            joint = self._joint_by_child.get(link.name)
            if joint is None:
                rot = np.eye(3)
            else:
                rot = rot_axis(joint.axis, float(q[joint.index]))
            local = make_transform(rot, link.offset)
            if link.parent is None:
                transforms[link.name] = local
            else:
                transforms[link.name] = transforms[link.parent] @ local
        return transforms

    def center_of_mass(self, q: np.ndarray) -> np.ndarray:
        """Mass-weighted CoM in the root frame."""
        transforms = self.forward_kinematics(q)
        total = 0.0
        acc = np.zeros(3)
        for link in self.links:
            if link.mass == 0.0:
                continue
            acc += link.mass * transform_point(transforms[link.name], link.com)
            total += link.mass
        return acc / total

    # re-rooting -----------------------------------------------------

    def rerooted(self, new_root: str) -> "RobotModel":
        """Equivalent tree rooted at another link.

        Joints along the old root path are reversed (axis negated, same
        canonical angle), so joint vectors and torque vectors keep their
        canonical meaning. Link frames along the path shift to sit on the
        reversed joint axes; CoM offsets shift accordingly and inertias
        (about CoM) are unchanged.
        """
        self.link(new_root)
        path = [new_root]
        while (parent := self._link_by_name[path[-1]].parent) is not None:
            path.append(parent)
        path.reverse()  # old root ... new root
        n = len(path) - 1
        if n == 0:
            return self

        on_path = set(path)
        new_links: dict[str, Link] = {}
        new_joints: list[Joint] = []

        # shift applied to each path link's frame (offset of its path child)
        shift = {path[k]: self._link_by_name[path[k + 1]].offset for k in range(n)}
        shift[path[n]] = np.zeros(3)

        root_link = self._link_by_name[new_root]
        new_links[new_root] = replace(root_link, parent=None, offset=np.zeros(3))

        for k in range(n - 1, -1, -1):
            old = self._link_by_name[path[k]]
            s = shift[path[k]]
            new_links[old.name] = Link(
                name=old.name,
                parent=path[k + 1],
                offset=-shift[path[k + 1]],
                mass=old.mass,
                com=old.com - s,
                inertia=old.inertia,
            )
            joint = self._joint_by_child.get(path[k + 1])  # joint being reversed
            if joint is not None:
                new_joints.append(
                    Joint(
                        name=joint.name,
                        parent=path[k + 1],
                        child=old.name,
                        axis=-joint.axis,
                        limits=joint.limits,
                        index=joint.index,
                    )
                )

        # off-path links keep their joints; children of shifted parents move
        for link in self.links:
            if link.name in on_path:
                continue
            offset = link.offset
            if link.parent in shift:
                offset = offset - shift[link.parent]
            new_links[link.name] = replace(link, offset=offset)
            joint = self._joint_by_child.get(link.name)
            if joint is not None:
                new_joints.append(joint)

        ordered = _topological_links(list(new_links.values()), new_root)
        new_joints.sort(key=lambda j: j.index)
        return RobotModel(
            name=f"{self.name}@{new_root}",
            links=tuple(ordered),
            joints=tuple(new_joints),
            dims=self.dims,
        )


def _topological_links(links: list[Link], root: str) -> list[Link]:
    by_parent: dict[str | None, list[Link]] = {}
    for l in links:
        by_parent.setdefault(l.parent, []).append(l)
    ordered: list[Link] = []
    stack = [l for l in links if l.name == root]
    seen: set[str] = set()
    while stack:
        link = stack.pop()
        if link.name in seen:
            raise ModelError("link tree contains a cycle")
        seen.add(link.name)
        ordered.append(link)
        stack.extend(by_parent.get(link.name, []))
    if len(ordered) != len(links):
        raise ModelError("link tree is disconnected")
    return ordered


# loading ----------------------------------------------------------------


def load_model(path: str | Path) -> RobotModel:
    with open(path) as f:
        doc = json.load(f)
    return model_from_dict(doc)


def model_from_dict(doc: dict) -> RobotModel:
    if doc.get("version") != MODEL_SCHEMA_VERSION:
        raise ModelError(f"unsupported model version {doc.get('version')!r}")
    dims = doc.get("dimensions", {})
    for key in REQUIRED_DIMENSIONS:
        if key not in dims:
            raise ModelError(f"missing dimension {key!r}")
        if not (float(dims[key]) >= 0.0):
            raise ModelError(f"dimension {key!r} must be >= 0")

    links = []
    for entry in doc.get("links", []):
        inertia = np.array(entry["inertia"], dtype=float).reshape(3, 3)
        links.append(
            Link(
                name=entry["name"],
                parent=entry.get("parent"),
                offset=np.array(entry["offset"], dtype=float),
                mass=float(entry["mass"]),
                com=np.array(entry["com"], dtype=float),
                inertia=inertia,
            )
        )

    joints = []
    for index, entry in enumerate(doc.get("joints", [])):
        joints.append(
            Joint(
                name=entry["name"],
                parent=entry["parent"],
                child=entry["child"],
                axis=np.array(entry["axis"], dtype=float),
                limits=(float(entry["limits"][0]), float(entry["limits"][1])),
                index=index,
            )
        )

    model = RobotModel(
        name=doc.get("name", "unnamed"),
        links=tuple(_topological_links(links, _find_root(links))),
        joints=tuple(joints),
        dims={k: float(v) for k, v in dims.items()},
    )
    validate_model(model)
    return model


def _find_root(links: list[Link]) -> str:
    roots = [l.name for l in links if l.parent is None]
    if len(roots) != 1:
        raise ModelError(f"model must have exactly one root link, found {roots}")
    return roots[0]


def validate_model(model: RobotModel) -> None:
    """Enforce the canonical 20-joint layout and physical plausibility."""
    names = tuple(j.name for j in model.joints)
    if names != CANONICAL_JOINT_ORDER:
        raise ModelError(
            "joint order must be the canonical 20-joint layout; got "
            f"{list(names)}"
        )
    link_names = {l.name for l in model.links}
    for joint in model.joints:
        expected = canonical_axis(joint.name)
        if not np.array_equal(joint.axis, expected):
            raise ModelError(
                f"joint {joint.name!r} axis {joint.axis.tolist()} != canonical "
                f"{expected.tolist()}"
            )
        if joint.parent not in link_names or joint.child not in link_names:
            raise ModelError(f"joint {joint.name!r} references unknown links")
        child = model.link(joint.child)
        if child.parent != joint.parent:
            raise ModelError(f"joint {joint.name!r} disagrees with link parentage")
        if not joint.limits[0] < joint.limits[1]:
            raise ModelError(f"joint {joint.name!r} has empty limit range")

    # serial chain order within each limb (e.g. hip yaw drives hip roll's parent)
    for side in "lr":
        _check_chain(model, [side + n for n in LEG_JOINTS])
        _check_chain(model, [side + n for n in ARM_JOINTS])
    _check_chain(model, ["headYaw", "headPitch"])

    for link in model.links:
        if not link.mass > 0.0:
            raise ModelError(f"link {link.name!r} mass must be > 0")
        if not np.allclose(link.inertia, link.inertia.T, atol=1e-12):
            raise ModelError(f"link {link.name!r} inertia must be symmetric")
        if np.any(np.linalg.eigvalsh(link.inertia) <= 0.0):
            raise ModelError(f"link {link.name!r} inertia must be positive definite")


def _check_chain(model: RobotModel, joint_names: list[str]) -> None:
    by_name = {j.name: j for j in model.joints}
    for upper, lower in zip(joint_names, joint_names[1:]):
        # walk up fixed links from the lower joint's parent to the upper child
        link = by_name[lower].parent
        while link is not None and model.joint_for(link) is None:
            link = model.link(link).parent
        if link != by_name[upper].child:
            raise ModelError(
                f"joint {lower!r} must hang below {upper!r} in the chain"
            )


# mirroring --------------------------------------------------------------

_MIRROR_NEGATE = ("Yaw", "Roll")


def mirror_joint_pose(q: np.ndarray) -> np.ndarray:
    """Swap left/right joints and negate yaw/roll channels (sagittal mirror)."""
    q = np.asarray(q, dtype=float)
    out = np.empty_like(q)
    for i, name in enumerate(CANONICAL_JOINT_ORDER):
        if name.startswith("l"):
            src = CANONICAL_JOINT_ORDER.index("r" + name[1:])
        elif name.startswith("r"):
            src = CANONICAL_JOINT_ORDER.index("l" + name[1:])
        else:
            src = i
        sign = -1.0 if name.endswith(_MIRROR_NEGATE) else 1.0
        out[i] = sign * q[src]
    return out


def math_default_inertia(mass: float, radius: float) -> np.ndarray:
    """Solid-sphere inertia helper used when authoring model files."""
    i = 0.4 * mass * radius * radius
    return np.diag([i, i, i])
