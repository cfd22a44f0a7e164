"""humotion: kinematics, state estimation, dynamics, motions, gait,
camera geometry and a reduced-order simulator for a 20-joint humanoid,
plus an HTTP/WebSocket service and command line tools on top.
"""

from importlib import resources

from .kinematics import RobotModel, load_model

__version__ = "0.1.0"


def default_model() -> RobotModel:
    """Load the robot model shipped with the package."""
    path = resources.files("humotion.data").joinpath("model_default.json")
    with resources.as_file(path) as p:
        return load_model(p)


def data_path(name: str):
    """Context manager yielding a real filesystem path for a packaged data file."""
    return resources.as_file(resources.files("humotion.data").joinpath(name))


__all__ = ["RobotModel", "load_model", "default_model", "data_path", "__version__"]
