"""HTTP/WebSocket service exposing the motion stack to authoring tools."""

from .app import API_VERSION, DATA_DIR_ENV, DEFAULT_PORT, create_app, resolve_data_dir
from .store import MotionStore, etag_of
from .wire import (
    WireError,
    convert_pose,
    link_transforms_dict,
    pose_from_dict,
    pose_to_dict,
    sample_frame,
    sample_motion,
)

__all__ = [
    "API_VERSION",
    "DATA_DIR_ENV",
    "DEFAULT_PORT",
    "MotionStore",
    "WireError",
    "convert_pose",
    "create_app",
    "etag_of",
    "link_transforms_dict",
    "pose_from_dict",
    "pose_to_dict",
    "resolve_data_dir",
    "sample_frame",
    "sample_motion",
]
