"""Feed-forward actuation torques.

inverse_dynamics runs a recursive Newton-Euler pass over the link tree.
Gravity compensation exploits that the tree can be re-rooted at whichever
end effector currently carries the robot: the static torques for a blend
of support limbs are the support-coefficient-weighted sum of the torques
computed with the tree rooted at each limb's end link (superposition of
solutions of a linear system). Gravity is taken as (0, 0, -g) in the root
frame, which assumes the support surface is level.

Torque sign convention follows the canonical joint angles, so torques
from differently rooted trees combine elementwise without re-mapping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kinematics.model import RobotModel
from .math3d import rot_axis, wrap_angle

STANDARD_GRAVITY = 9.81
DEFAULT_GRAVITY = np.array([0.0, 0.0, -STANDARD_GRAVITY])

# proportional-gain window the effort channel maps onto, N*m/rad
DEFAULT_GAIN_RANGE = (5.0, 120.0)

# end link carrying the robot when a limb is in support
SUPPORT_LINKS = {
    "left_leg": "lSole",
    "right_leg": "rSole",
    "left_arm": "lLowerArm",
    "right_arm": "rLowerArm",
}

# phase width of the double-support blend window, rad
DOUBLE_SUPPORT_WIDTH = 0.35


@dataclass
class SupportCoefficients:
    left_leg: float = 0.0
    right_leg: float = 0.0
    left_arm: float = 0.0
    right_arm: float = 0.0

    def __post_init__(self):
        for name, v in vars(self).items():
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"support coefficient {name} must be in [0, 1], got {v}")

    def as_dict(self) -> dict[str, float]:
        return dict(vars(self))

    def total(self) -> float:
        return self.left_leg + self.right_leg + self.left_arm + self.right_arm


@dataclass
class JointCommand:
    position: np.ndarray
    velocity: np.ndarray
    acceleration: np.ndarray
    feed_forward_torque: np.ndarray
    effort: np.ndarray
    support: SupportCoefficients = field(default_factory=SupportCoefficients)

    def __post_init__(self):
        for name in ("position", "velocity", "acceleration", "feed_forward_torque", "effort"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        if np.any(self.effort < 0.0) or np.any(self.effort > 1.0):
            raise ValueError("efforts must be in [0, 1]")


def _cross3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # np.cross spends most of its time on axis bookkeeping at this size;
    # the recursion below calls this hundreds of times per solve
    return np.array(
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    )


# rerooting is pure model surgery, so repeated calls for the same
# (model, base) pair reuse one result; keyed models are kept referenced
# so their ids cannot be recycled while the entry lives
_REROOT_CACHE: dict[tuple[int, str], tuple[RobotModel, RobotModel]] = {}
_REROOT_CACHE_LIMIT = 64


def _rerooted_cached(model: RobotModel, base_link: str) -> RobotModel:
    key = (id(model), base_link)
    hit = _REROOT_CACHE.get(key)
    if hit is not None and hit[0] is model:
        return hit[1]
    rerooted = model.rerooted(base_link)
    if len(_REROOT_CACHE) >= _REROOT_CACHE_LIMIT:
        _REROOT_CACHE.pop(next(iter(_REROOT_CACHE)))
    _REROOT_CACHE[key] = (model, rerooted)
    return rerooted


def inverse_dynamics(
    model: RobotModel,
    q: np.ndarray,
    qdot: np.ndarray,
    qddot: np.ndarray,
    gravity: np.ndarray = DEFAULT_GRAVITY,
    base_link: str | None = None,
) -> np.ndarray:
    """Joint torques realizing (qdot, qddot) at pose q under gravity.

    The recursion runs over the tree rooted at base_link (default: the
    model root), with the base held stationary. gravity is expressed in
    the base link frame.
    """
    if base_link is not None and base_link != model.root.name:
        model = _rerooted_cached(model, base_link)
    q = np.asarray(q, dtype=float)
    qdot = np.asarray(qdot, dtype=float)
    qddot = np.asarray(qddot, dtype=float)

    n_joints = len(model.joints)
    tau = np.zeros(n_joints)

    # forward pass: angular velocity/acceleration and linear acceleration
    # of every link frame, each expressed in that link's own frame
    omega: dict[str, np.ndarray] = {}
    alpha: dict[str, np.ndarray] = {}
    acc: dict[str, np.ndarray] = {}
    rot_to_parent: dict[str, np.ndarray] = {}

    root = model.root.name
    omega[root] = np.zeros(3)
    alpha[root] = np.zeros(3)
    acc[root] = -np.asarray(gravity, dtype=float)  # equivalent upward base acceleration
    rot_to_parent[root] = np.eye(3)

    for link in model.links[1:]:
        joint = model.joint_for(link.name)
        parent = link.parent
        w_p, a_p, acc_p = omega[parent], alpha[parent], acc[parent]
        t = link.offset
        if joint is None:
            rot = np.eye(3)
            w = w_p.copy()
            al = a_p.copy()
        else:
            rot = rot_axis(joint.axis, float(q[joint.index]))
            qd = float(qdot[joint.index])
            qdd = float(qddot[joint.index])
            ax = joint.axis
            w_in = rot.T @ w_p
            w = w_in + ax * qd
            al = rot.T @ a_p + ax * qdd + _cross3(w_in, ax * qd)
        a_frame = rot.T @ (acc_p + _cross3(a_p, t) + _cross3(w_p, _cross3(w_p, t)))
        omega[link.name] = w
        alpha[link.name] = al
        acc[link.name] = a_frame
        rot_to_parent[link.name] = rot

    # backward pass: net force/moment per link, accumulated up the tree
    force: dict[str, np.ndarray] = {}
    moment: dict[str, np.ndarray] = {}
    for link in reversed(model.links):
        w, al, a = omega[link.name], alpha[link.name], acc[link.name]
        a_com = a + _cross3(al, link.com) + _cross3(w, _cross3(w, link.com))
        f = link.mass * a_com
        n = link.inertia @ al + _cross3(w, link.inertia @ w) + _cross3(link.com, f)
        for child in model.children(link.name):
            rot_c = rot_to_parent[child.name]
            f_c = rot_c @ force[child.name]
            f += f_c
            n += rot_c @ moment[child.name] + _cross3(child.offset, f_c)
        force[link.name] = f
        moment[link.name] = n
        joint = model.joint_for(link.name)
        if joint is not None:
            tau[joint.index] = float(joint.axis @ n)
    return tau


def inertial_torques(
    model: RobotModel, q: np.ndarray, qdot: np.ndarray, qddot: np.ndarray
) -> np.ndarray:
    """Torque share countering velocity/acceleration effects only."""
    return inverse_dynamics(model, q, qdot, qddot, gravity=np.zeros(3))


def gravity_torques(
    model: RobotModel,
    q: np.ndarray,
    support_link: str | None = None,
    gravity: np.ndarray = DEFAULT_GRAVITY,
) -> np.ndarray:
    zero = np.zeros(len(model.joints))
    return inverse_dynamics(model, q, zero, zero, gravity=gravity, base_link=support_link)


def gravity_compensation(
    model: RobotModel,
    q: np.ndarray,
    sc: SupportCoefficients,
    gravity: np.ndarray = DEFAULT_GRAVITY,
) -> np.ndarray:
    """Static holding torques for a blend of support limbs."""
    if sc.total() == 0.0:
        return gravity_torques(model, q, gravity=gravity)
    tau = np.zeros(len(model.joints))
    for limb, end_link in SUPPORT_LINKS.items():
        weight = getattr(sc, limb)
        if weight != 0.0:
            tau += weight * gravity_torques(model, q, support_link=end_link, gravity=gravity)
    return tau


def total_feed_forward(gravity_terms: np.ndarray, inertial_terms: np.ndarray) -> np.ndarray:
    return np.asarray(gravity_terms) + np.asarray(inertial_terms)


def effort_to_gain(effort: float, gain_range: tuple[float, float] = DEFAULT_GAIN_RANGE) -> float:
    """Affine map from the [0, 1] effort channel to a servo P gain."""
    lo, hi = gain_range
    e = min(1.0, max(0.0, float(effort)))
    return lo + e * (hi - lo)


def support_profile(phase: float, width: float = DOUBLE_SUPPORT_WIDTH) -> SupportCoefficients:
    """Leg support coefficients from the gait phase.

    Phase convention: one full cycle spans (-pi, pi]; the left leg is in
    full support around -pi/2, the right around +pi/2, and support hands
    over linearly across double-support windows of the given width
    centered on phase 0 and +-pi.
    """
    return SupportCoefficients(
        left_leg=_leg_support(wrap_angle(phase), width),
        right_leg=_leg_support(wrap_angle(phase + math.pi), width),
    )


def _leg_support(mu: float, width: float) -> float:
    half = 0.5 * width
    if -half <= mu <= half:
        return (half - mu) / width  # handing support over to the other leg
    if half < mu < math.pi - half:
        return 0.0  # swing
    if mu >= math.pi - half:
        return (mu - (math.pi - half)) / width
    if mu <= -math.pi + half:
        return (mu + math.pi + half) / width
    return 1.0  # full stance


def estimate_support_coefficients(source) -> SupportCoefficients:
    """Support coefficients from a gait phase or a keyframe-like carrier."""
    if isinstance(source, SupportCoefficients):
        return source
    if isinstance(source, (int, float)):
        return support_profile(float(source))
    support = getattr(source, "support", None)
    if isinstance(support, SupportCoefficients):
        return support
    raise TypeError(f"cannot derive support coefficients from {type(source).__name__}")
