import numpy as np
import pytest

import humotion


@pytest.fixture(scope="session")
def model():
    return humotion.default_model()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)


def random_rotations(rng: np.random.Generator, n: int) -> np.ndarray:
    """n random rotation matrices via normalized random quaternions."""
    from humotion.math3d import rot_from_quat

    quats = rng.standard_normal((n, 4))
    quats /= np.linalg.norm(quats, axis=1, keepdims=True)
    return np.array([rot_from_quat(q) for q in quats])


def random_legal_pose(model, rng: np.random.Generator) -> np.ndarray:
    """Uniform sample within the model joint limits."""
    lo = np.array([j.limits[0] for j in model.joints])
    hi = np.array([j.limits[1] for j in model.joints])
    return rng.uniform(lo, hi)
