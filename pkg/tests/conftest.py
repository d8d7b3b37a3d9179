import warnings

import numpy as np
import pytest

from cubicwkb.bsb import BsbIndex, real_orbit_potential, seed_from_scaling, solve_bsb

warnings.filterwarnings("ignore", category=RuntimeWarning)


@pytest.fixture(scope="session")
def orbit_potential():
    """A potential on the real quantizing orbit (class 320, shift 0)."""
    return real_orbit_potential()


@pytest.fixture(scope="session")
def sol_11():
    return solve_bsb(BsbIndex(1, 1), seed_from_scaling(BsbIndex(1, 1)))


@pytest.fixture(scope="session")
def sol_22():
    return solve_bsb(BsbIndex(2, 2), seed_from_scaling(BsbIndex(2, 2)))


@pytest.fixture(scope="session")
def sol_21(sol_11):
    idx = BsbIndex(2, 1)
    return solve_bsb(idx, seed_from_scaling(idx, {(1, 1): sol_11}))


@pytest.fixture(scope="session")
def sol_12(sol_11):
    idx = BsbIndex(1, 2)
    return solve_bsb(idx, seed_from_scaling(idx, {(1, 1): sol_11}))


def random_potentials(seed, count, box=2.0, real=False):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        if real:
            a, b = rng.uniform(-box, box), rng.uniform(-box, box)
        else:
            a = complex(rng.uniform(-box, box), rng.uniform(-box, box))
            b = complex(rng.uniform(-box, box), rng.uniform(-box, box))
        out.append((a, b))
    return out
