"""Kinematic model, forward kinematics and pose-space conversions."""

from .model import (
    CANONICAL_JOINT_ORDER,
    Joint,
    Link,
    ModelError,
    RobotModel,
    load_model,
    mirror_joint_pose,
    model_from_dict,
)
from .poses import (
    HEAD,
    L_ARM,
    L_LEG,
    R_ARM,
    R_LEG,
    ZERO_POSE,
    AbstractArmPose,
    AbstractLegPose,
    AbstractPose,
    InverseLegPose,
    InversePose,
    PoseDomainError,
    abstract_to_joint,
    arm_abstract_to_joint,
    arm_joint_to_abstract,
    default_halt_pose,
    extension_from_knee,
    hip_ankle_distance,
    inverse_to_joint,
    joint_to_abstract,
    joint_to_inverse,
    knee_from_extension,
    leg_abstract_to_joint,
    leg_inverse_kinematics,
    leg_joint_to_abstract,
    leg_joint_to_inverse,
    sole_transform,
)

__all__ = [
    "CANONICAL_JOINT_ORDER",
    "Joint",
    "Link",
    "ModelError",
    "RobotModel",
    "load_model",
    "mirror_joint_pose",
    "model_from_dict",
    "HEAD",
    "L_ARM",
    "L_LEG",
    "R_ARM",
    "R_LEG",
    "ZERO_POSE",
    "AbstractArmPose",
    "AbstractLegPose",
    "AbstractPose",
    "InverseLegPose",
    "InversePose",
    "PoseDomainError",
    "abstract_to_joint",
    "arm_abstract_to_joint",
    "arm_joint_to_abstract",
    "default_halt_pose",
    "extension_from_knee",
    "hip_ankle_distance",
    "inverse_to_joint",
    "joint_to_abstract",
    "joint_to_inverse",
    "knee_from_extension",
    "leg_abstract_to_joint",
    "leg_inverse_kinematics",
    "leg_joint_to_abstract",
    "leg_joint_to_inverse",
    "sole_transform",
]
