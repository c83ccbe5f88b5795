import random

import pytest

from floorsynth.geometry import Boundary
from floorsynth.synth import generate_synthetic_corpus


@pytest.fixture(scope="session")
def corpus20():
    return generate_synthetic_corpus(20, seed=101)


@pytest.fixture(scope="session")
def corpus60():
    return generate_synthetic_corpus(60, seed=202)


@pytest.fixture()
def square_boundary():
    return Boundary(
        vertices=((20, 20), (100, 20), (100, 100), (20, 100)),
        front_door=((40, 20), (44, 20)),
    )


@pytest.fixture()
def l_boundary():
    return Boundary(
        vertices=((20, 20), (100, 20), (100, 60), (60, 60), (60, 100), (20, 100)),
        front_door=((30, 20), (34, 20)),
    )


def random_rectilinear_boundary(rng: random.Random, res: int = 128) -> Boundary:
    """Random simple rectilinear polygon with a door, via the generator."""
    from floorsynth.synth import generate_record

    while True:
        rec = generate_record("tmp", rng)
        if rec is not None:
            return rec.boundary
