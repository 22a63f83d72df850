import os
from pathlib import Path

import pytest

# BIPARA_SEED overrides the seed used by every randomized suite in here.
SUITE_SEED = int(os.environ.get("BIPARA_SEED", "20240917"))

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def suite_seed() -> int:
    return SUITE_SEED


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture(scope="session")
def flat_n2():
    from bipara import flat_structure

    return flat_structure(2)


@pytest.fixture(scope="session")
def heis():
    from bipara import heisenberg_structure

    return heisenberg_structure()


@pytest.fixture(scope="session")
def aff():
    from bipara import affine_structure

    return affine_structure()


def structure_pool(seed: int):
    """The shared pool of generated structures used across the suites.

    Mix of backends and half-dimensions; chart structures are unipotent
    conjugates of the flat model (degree <= 2), constant-frame ones come from
    Jacobi-valid random bracket tables.
    """
    from bipara import random_structure

    pool = []
    spec = [
        ("constant_frame", 1, 6),
        ("constant_frame", 2, 7),
        ("constant_frame", 3, 5),
        ("polynomial_chart", 1, 12),
        ("polynomial_chart", 2, 12),
        ("polynomial_chart", 3, 8),
    ]
    counter = 0
    for backend, n, count in spec:
        for k in range(count):
            pool.append(random_structure(n, backend, degree=2, seed=seed + 1000 * counter + k))
        counter += 1
    return pool


@pytest.fixture(scope="session")
def generated_pool(suite_seed):
    return structure_pool(suite_seed)
