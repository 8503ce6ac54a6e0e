import numpy as np
import pytest

from etskin.ets import ETS, ElementaryTransform
from etskin.model import load_model

# arm and wrist straight up: translational rank 1, J rank-deficient
UR5_STRETCHED = np.array([0.0, -np.pi / 2, 0.0, -np.pi / 2, 0.0, 0.0])


def random_chain(rng, n, constants_per_joint=2, prismatic_fraction=0.2):
    """Random serial chain with ``n`` joints, random constants and flips."""
    terms = []
    for j in range(n):
        for _ in range(rng.integers(0, constants_per_joint + 1)):
            kind = "rotation" if rng.random() < 0.5 else "translation"
            value = rng.uniform(-np.pi, np.pi) if kind == "rotation" else rng.uniform(-0.5, 0.5)
            terms.append(ElementaryTransform(rng.choice(list("xyz")), kind, value))
        if rng.random() < prismatic_fraction:
            terms.append(ElementaryTransform(rng.choice(list("xyz")), "translation", joint=j))
        else:
            terms.append(ElementaryTransform(rng.choice(list("xyz")), "rotation", joint=j,
                                             flip=bool(rng.random() < 0.3)))
    terms.append(ElementaryTransform("z", "translation", 0.1))
    return ETS(tuple(terms), name=f"random{n}")


@pytest.fixture(scope="session")
def planar2():
    return load_model("planar2")


@pytest.fixture(scope="session")
def ur5():
    return load_model("ur5")


@pytest.fixture(scope="session")
def panda():
    return load_model("panda")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
