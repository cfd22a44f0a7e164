import json
import math

import numpy as np
import pytest

import humotion
from humotion.kinematics import (
    CANONICAL_JOINT_ORDER,
    L_LEG,
    R_LEG,
    AbstractPose,
    InverseLegPose,
    InversePose,
    ModelError,
    PoseDomainError,
    abstract_to_joint,
    inverse_to_joint,
    joint_to_abstract,
    joint_to_inverse,
    leg_inverse_kinematics,
    mirror_joint_pose,
    model_from_dict,
)
from humotion.math3d import quat_angle_between, quat_from_rot, rot_y
from tests.conftest import random_legal_pose

L_LEG_NAMES = CANONICAL_JOINT_ORDER[8:14]


def model_doc():
    with humotion.data_path("model_default.json") as p:
        return json.loads(p.read_text())


# model loading and validation -------------------------------------------


def test_default_model_shape(model):
    assert len(model.joints) == 20
    assert model.joint_names == CANONICAL_JOINT_ORDER
    assert model.total_mass == pytest.approx(6.6, abs=1e-9)
    assert model.root.name == "trunk"


def test_zero_pose_geometry(model):
    fk = model.forward_kinematics(np.zeros(20))
    hip_y = model.dims["hipOffsetY"]
    reach = model.dims["thighLength"] + model.dims["shankLength"] + model.dims["footHeight"]
    assert np.allclose(fk["lSole"][:3, 3], [0, hip_y, -reach], atol=1e-12)
    assert np.allclose(fk["rSole"][:3, 3], [0, -hip_y, -reach], atol=1e-12)
    assert np.allclose(fk["lSole"][:3, :3], np.eye(3), atol=1e-12)
    for name in ("trunk", "head", "lFoot", "rFoot"):
        assert name in fk


def test_fk_rejects_nonfinite(model):
    q = np.zeros(20)
    q[3] = np.nan
    with pytest.raises(ValueError):
        model.forward_kinematics(q)


def test_clamp_to_limits(model):
    q = np.zeros(20)
    clamped, flag = model.clamp_to_limits(q)
    assert not flag and np.array_equal(clamped, q)
    q[11] = 99.0  # way past the knee limit
    clamped, flag = model.clamp_to_limits(q)
    assert flag
    assert clamped[11] == model.joints[11].limits[1]


def test_rejects_wrong_version():
    doc = model_doc()
    doc["version"] = 2
    with pytest.raises(ModelError):
        model_from_dict(doc)


def test_rejects_permuted_joint_order():
    doc = model_doc()
    doc["joints"][0], doc["joints"][1] = doc["joints"][1], doc["joints"][0]
    with pytest.raises(ModelError):
        model_from_dict(doc)


def test_rejects_wrong_axis():
    doc = model_doc()
    for j in doc["joints"]:
        if j["name"] == "lKneePitch":
            j["axis"] = [1, 0, 0]
    with pytest.raises(ModelError):
        model_from_dict(doc)


def test_rejects_missing_dimension():
    doc = model_doc()
    del doc["dimensions"]["thighLength"]
    with pytest.raises(ModelError):
        model_from_dict(doc)


def test_rejects_nonpositive_mass():
    doc = model_doc()
    doc["links"][0]["mass"] = 0.0
    with pytest.raises(ModelError):
        model_from_dict(doc)


def test_rejects_cycle():
    doc = model_doc()
    doc["links"][0]["parent"] = doc["links"][-1]["name"]
    with pytest.raises(ModelError):
        model_from_dict(doc)


# abstract space ----------------------------------------------------------


def test_straight_leg_is_full_extension(model):
    pose = joint_to_abstract(model, np.zeros(20))
    for leg in (pose.left_leg, pose.right_leg):
        assert leg.extension == pytest.approx(1.0, abs=1e-12)
        for v in (leg.foot_angle_x, leg.foot_angle_y, leg.leg_angle_x, leg.leg_angle_y, leg.leg_angle_z):
            assert v == pytest.approx(0.0, abs=1e-12)


def test_right_angle_knee_extension(model):
    # equal thigh/shank: hip-ankle distance L*sqrt(2) -> extension sqrt(2)/2
    q = np.zeros(20)
    q[11] = math.pi / 2
    pose = joint_to_abstract(model, q)
    assert pose.left_leg.extension == pytest.approx(math.sqrt(0.5), abs=1e-12)


def test_pure_hip_yaw_maps_to_leg_angle_z(model):
    q = np.zeros(20)
    q[8] = 0.37  # lHipYaw
    pose = joint_to_abstract(model, q)
    assert pose.left_leg.leg_angle_z == pytest.approx(0.37)
    assert pose.left_leg.leg_angle_x == 0.0
    assert pose.left_leg.leg_angle_y == 0.0
    assert pose.left_leg.extension == pytest.approx(1.0)


def test_full_extension_zero_angles_gives_zero_joints(model):
    q = abstract_to_joint(model, AbstractPose())
    assert np.allclose(q, 0.0, atol=1e-12)


def test_extension_domain_errors(model):
    pose = AbstractPose()
    pose.left_leg.extension = 1.2
    with pytest.raises(PoseDomainError):
        abstract_to_joint(model, pose)
    pose.left_leg.extension = -0.1
    with pytest.raises(PoseDomainError):
        abstract_to_joint(model, pose)


def test_abstract_round_trip_sweep(model, rng):
    # joint -> abstract -> joint identity across the legal box
    worst = 0.0
    for _ in range(10_000):
        q = random_legal_pose(model, rng)
        q2 = abstract_to_joint(model, joint_to_abstract(model, q))
        worst = max(worst, float(np.abs(q2 - q).max()))
    assert worst < 1e-10


def test_abstract_round_trip_other_direction(model, rng):
    for _ in range(2000):
        q = random_legal_pose(model, rng)
        pose = joint_to_abstract(model, q)
        pose2 = joint_to_abstract(model, abstract_to_joint(model, pose))
        for a, b in ((pose.left_leg, pose2.left_leg), (pose.right_leg, pose2.right_leg)):
            assert a.extension == pytest.approx(b.extension, abs=1e-10)
            assert a.leg_angle_y == pytest.approx(b.leg_angle_y, abs=1e-10)
            assert a.foot_angle_y == pytest.approx(b.foot_angle_y, abs=1e-10)


# inverse space -----------------------------------------------------------


def test_ik_recovers_random_legal_poses(model, rng):
    worst = 0.0
    for _ in range(1000):
        q = random_legal_pose(model, rng)
        q[11] = rng.uniform(0.05, 2.55)  # keep the knee off the acos boundary
        q[17] = rng.uniform(0.05, 2.55)
        # elbows on the canonical branch
        q[4] = rng.uniform(-2.6, -0.01)
        q[7] = rng.uniform(-2.6, -0.01)
        pose = joint_to_inverse(model, q)
        q2, clamped = inverse_to_joint(model, pose)
        assert not clamped
        worst = max(worst, float(np.abs(q2 - q).max()))
    assert worst < 1e-9


def test_fk_after_ik_reproduces_cartesian_target(model, rng):
    worst_pos = 0.0
    worst_rot = 0.0
    for _ in range(1000):
        q = random_legal_pose(model, rng)
        target = joint_to_inverse(model, q)
        q2, _ = inverse_to_joint(model, target)
        got = joint_to_inverse(model, q2)
        for a, b in ((target.left_leg, got.left_leg), (target.right_leg, got.right_leg)):
            worst_pos = max(worst_pos, float(np.abs(a.position - b.position).max()))
            worst_rot = max(worst_rot, quat_angle_between(a.orientation, b.orientation))
    assert worst_pos < 1e-9
    assert worst_rot < 1e-9


def test_ik_clamps_out_of_reach_target(model):
    reach = model.dims["thighLength"] + model.dims["shankLength"]
    hip_y = model.dims["hipOffsetY"]
    depth = reach + model.dims["footHeight"] + 0.001  # 1 mm past full stretch
    target = InverseLegPose(
        position=np.array([0.0, hip_y, -depth]),
        orientation=np.array([1.0, 0.0, 0.0, 0.0]),
    )
    leg_q, clamped = leg_inverse_kinematics(model, target, "left")
    assert clamped
    assert leg_q[3] == pytest.approx(0.0, abs=1e-6)  # knee straight at the boundary
    pose = joint_to_abstract(model, np.concatenate([np.zeros(8), leg_q, leg_q]))
    assert pose.left_leg.extension == pytest.approx(1.0, abs=1e-9)


def test_ik_reachable_target_not_flagged(model):
    q = np.zeros(20)
    q[11] = 0.8
    q[10] = -0.4
    pose = joint_to_inverse(model, q)
    _, clamped = inverse_to_joint(model, pose)
    assert not clamped


def test_ik_tilted_foot_target(model):
    # explicit non-axis-aligned target: foot pitched 0.3 rad, shifted forward
    rot = rot_y(0.3)
    target = InverseLegPose(
        position=np.array([0.06, model.dims["hipOffsetY"], -0.40]),
        orientation=quat_from_rot(rot),
    )
    leg_q, clamped = leg_inverse_kinematics(model, target, "left")
    assert not clamped
    q = np.zeros(20)
    q[L_LEG] = leg_q
    got = joint_to_inverse(model, q).left_leg
    assert np.allclose(got.position, target.position, atol=1e-10)
    assert quat_angle_between(got.orientation, target.orientation) < 1e-10


# mirroring ---------------------------------------------------------------


def test_mirror_is_involution(rng, model):
    for _ in range(100):
        q = random_legal_pose(model, rng)
        assert np.allclose(mirror_joint_pose(mirror_joint_pose(q)), q, atol=1e-15)


def test_mirror_reflects_forward_kinematics(model, rng):
    flip = np.array([1.0, -1.0, 1.0])
    for _ in range(200):
        q = random_legal_pose(model, rng)
        fk = model.forward_kinematics(q)
        fkm = model.forward_kinematics(mirror_joint_pose(q))
        assert np.allclose(fkm["rSole"][:3, 3], flip * fk["lSole"][:3, 3], atol=1e-12)
        assert np.allclose(fkm["lSole"][:3, 3], flip * fk["rSole"][:3, 3], atol=1e-12)
        assert np.allclose(fkm["head"][:3, 3], flip * fk["head"][:3, 3], atol=1e-12)


# re-rooting --------------------------------------------------------------


def test_reroot_preserves_relative_transforms(model, rng):
    # frames along the flipped chain may translate (joints must sit at the
    # child origin), so the physical invariants are: orientations, every
    # link's CoM world point, and the frame origins of links off the chain
    rerooted = model.rerooted("lSole")
    assert rerooted.root.name == "lSole"
    assert rerooted.total_mass == pytest.approx(model.total_mass, abs=1e-12)
    for _ in range(50):
        q = random_legal_pose(model, rng)
        fk = model.forward_kinematics(q)
        fk2 = rerooted.forward_kinematics(q)
        inv_sole = np.linalg.inv(fk["lSole"])
        for link in model.links:
            expect = inv_sole @ fk[link.name]
            got = fk2[link.name]
            assert np.allclose(got[:3, :3], expect[:3, :3], atol=1e-10)
            com_expect = expect[:3, :3] @ link.com + expect[:3, 3]
            link2 = rerooted.link(link.name)
            com_got = got[:3, :3] @ link2.com + got[:3, 3]
            assert np.allclose(com_got, com_expect, atol=1e-10)
        for name in ("head", "rSole", "neck", "lLowerArm"):
            assert np.allclose(fk2[name], inv_sole @ fk[name], atol=1e-10)


def test_reroot_preserves_center_of_mass(model, rng):
    rerooted = model.rerooted("rSole")
    for _ in range(20):
        q = random_legal_pose(model, rng)
        fk = model.forward_kinematics(q)
        com_trunk = model.center_of_mass(q)
        com_sole = rerooted.center_of_mass(q)
        t = np.linalg.inv(fk["rSole"])
        assert np.allclose(com_sole, t[:3, :3] @ com_trunk + t[:3, 3], atol=1e-10)


def test_reroot_noop_when_already_root(model):
    assert model.rerooted("trunk") is model
