import numpy as np
import pytest

from conftest import random_potentials
from cubicwkb.monodromy import (
    default_radius,
    recessive_solution,
    stokes_multipliers,
    tritronquee_test,
)
from cubicwkb.potential import CubicPotential

GOLDEN = (1 + np.sqrt(5)) / 2


@pytest.fixture(scope="module")
def sigma_00():
    return stokes_multipliers(CubicPotential(0, 0))


def test_symmetric_cubic_multipliers_equal(sigma_00):
    s = sigma_00
    vals = [s.sigma[k] for k in range(-2, 3)]
    for v in vals[1:]:
        assert v == pytest.approx(vals[0], abs=1e-8)


def test_symmetric_cubic_golden_ratio(sigma_00):
    # the unique uniform admissible value: 1 + s^2 = -i s => s = -i * golden
    assert sigma_00.sigma[0] == pytest.approx(-1j * GOLDEN, abs=1e-8)


def test_admissibility_residuals_tiny(sigma_00):
    assert sigma_00.max_admissibility_residual < 1e-8


def test_two_point_agreement_and_drift(sigma_00):
    assert sigma_00.two_point_spread < 1e-8
    assert sigma_00.wronskian_drift < 1e-8


def test_radius_robustness():
    p = CubicPotential(0.4, -0.3)
    R = default_radius(p)
    s1 = stokes_multipliers(p, R=R)
    s2 = stokes_multipliers(p, R=1.25 * R)
    for k in range(-2, 3):
        assert s1.sigma[k] == pytest.approx(s2.sigma[k], rel=1e-7, abs=1e-8)


def test_admissibility_on_random_real_sample():
    for a, b in random_potentials(17, 5, box=3.0, real=True):
        s = stokes_multipliers(CubicPotential(a, b))
        assert s.max_normalized_residual < 1e-6


def test_recessive_solution_dominance_growth():
    # |psi_k| is smallest near its own ray and grows into the neighbours
    sol = recessive_solution(CubicPotential(0.3, 0.1), 0)
    own = sol.log_magnitude(0)
    assert sol.log_magnitude(2) > own + 1.0
    assert sol.log_magnitude(-2) > own + 1.0


def test_recessive_solution_radius_guard():
    with pytest.raises(Exception):
        recessive_solution(CubicPotential(2, 0), 0, R=0.5)


def test_bsb_solution_margins(sol_11):
    s = stokes_multipliers(sol_11.potential)
    ok, margin = tritronquee_test(s, threshold=0.1)
    assert ok
    assert margin == pytest.approx(max(abs(s.sigma[2]), abs(s.sigma[-2])))
    # at quantizing potentials the three central multipliers approach i
    assert s.sigma[0] == pytest.approx(1j, abs=0.05)
    assert s.sigma[1] == pytest.approx(1j, abs=0.15)
    assert s.sigma[-1] == pytest.approx(1j, abs=0.15)


def test_tritronquee_quintuplet_is_admissible():
    # completing sigma_{+-2} = 0 through the quadratic relations forces
    # sigma_0 = sigma_{+-1} = i; all five relations hold
    sigma = {0: 1j, 1: 1j, -1: 1j, 2: 0.0, -2: 0.0}
    for k in range(-2, 3):
        k1 = ((k + 1 + 2) % 5) - 2
        k3 = ((k + 3 + 2) % 5) - 2
        assert abs(1 + sigma[k] * sigma[k1] + 1j * sigma[k3]) < 1e-15


def test_random_potential_not_tritronquee():
    s = stokes_multipliers(CubicPotential(1.1, 0.7))
    ok, margin = tritronquee_test(s, threshold=1e-3)
    assert not ok
    assert margin > 0.1
