import numpy as np
import pytest

from cubicwkb.action import (
    BranchedPath,
    ClearanceError,
    alpha_integral,
    alpha_ray_tail,
    cycle_period,
    label_turning_points_by_periods,
    line_action,
    period_jacobian,
    turning_point_action,
)
from cubicwkb.potential import CubicPotential, GroupElement, apply_group, turning_points


def trapezoid_oracle(p, z0, z1, n=1_000_000, seed_sign=1.0):
    """Dense-sampling oracle with naive nearest-continuation of sqrt(V)."""
    ts = np.linspace(0.0, 1.0, n + 1)
    zs = z0 + ts * (z1 - z0)
    vals = np.sqrt(p(zs))
    w = vals[0] * seed_sign
    out = np.empty_like(vals)
    for i, v in enumerate(vals):
        if abs(v - w) > abs(v + w):
            v = -v
        out[i] = v
        w = v if v != 0 else w
    return np.trapezoid(out, dx=1.0 / n) * (z1 - z0)


def test_pure_cubic_action_is_four_fifths():
    p = CubicPotential(0, 0)
    v = line_action(p, BranchedPath(nodes=(0.0, 1.0), branch_seed=2.0))
    assert v.value == pytest.approx(0.8, abs=1e-12)


def test_reversed_path_negates():
    p = CubicPotential(0, 0)
    fwd = line_action(p, BranchedPath(nodes=(0.0, 1.0), branch_seed=2.0))
    rev = line_action(p, BranchedPath(nodes=(1.0, 0.0), branch_seed=2.0))
    assert rev.value == pytest.approx(-fwd.value, abs=1e-12)


def test_line_action_matches_dense_trapezoid():
    p = CubicPotential(2, 0)
    got = line_action(p, BranchedPath(nodes=(1.0, 2.0), branch_seed=np.sqrt(24.0)))
    oracle = trapezoid_oracle(p, 1.0, 2.0)
    assert abs(got.value - oracle) < 1e-8


def test_concatenation_additivity():
    p = CubicPotential(1.0 + 0.5j, 0.3)
    seed = np.sqrt(p(3.0 + 1.0j))
    ab = line_action(p, BranchedPath(nodes=(3.0 + 1.0j, 3.0 - 1.5j), branch_seed=seed))
    seed_b = np.sqrt(p(3.0 - 1.5j))
    if abs(seed_b - _continued(p, 3.0 + 1.0j, 3.0 - 1.5j, seed)) > abs(
        seed_b + _continued(p, 3.0 + 1.0j, 3.0 - 1.5j, seed)
    ):
        seed_b = -seed_b
    bc = line_action(p, BranchedPath(nodes=(3.0 - 1.5j, -2.0 - 2.0j), branch_seed=seed_b))
    ac = line_action(
        p, BranchedPath(nodes=(3.0 + 1.0j, 3.0 - 1.5j, -2.0 - 2.0j), branch_seed=seed)
    )
    assert ab.value + bc.value == pytest.approx(ac.value, abs=1e-9)


def _continued(p, z0, z1, w, n=500):
    for t in np.linspace(0, 1, n)[1:]:
        v = np.sqrt(p(z0 + t * (z1 - z0)))
        w = -v if abs(v + w) < abs(v - w) else v
    return w


def test_deformation_invariance():
    p = CubicPotential(1.0, 0.4 + 0.2j)
    seed = np.sqrt(p(4.0))
    direct = line_action(p, BranchedPath(nodes=(4.0, 4.0j), branch_seed=seed))
    detour = line_action(
        p, BranchedPath(nodes=(4.0, 4.0 + 4.0j, 4.0j), branch_seed=seed)
    )
    assert direct.value == pytest.approx(detour.value, abs=1e-8)


def test_clearance_violation_raises():
    p = CubicPotential(2, 0)  # roots at 0, +-1
    with pytest.raises(ClearanceError):
        line_action(
            p, BranchedPath(nodes=(-2.0, 2.0), branch_seed=np.sqrt(complex(p(-2.0))))
        )


def test_turning_point_action_same_point_zero():
    p = CubicPotential(2, 0)
    assert turning_point_action(p, 1.0, 1.0).value == 0


def test_turning_point_action_antisymmetry():
    p = CubicPotential(2, 0)
    a = turning_point_action(p, 0.0, 1.0, side_hint=2.0)
    b = turning_point_action(p, 1.0, 0.0, side_hint=2.0)
    assert a.value == pytest.approx(-b.value, abs=1e-12)


def test_turning_point_action_value_against_oracle():
    # V < 0 between the roots 0 and 1, so the action is purely imaginary on
    # the sheet fixed positive at x = 2
    p = CubicPotential(2, 0)
    got = turning_point_action(p, 0.0, 1.0, side_hint=2.0).value
    import scipy.integrate as si

    mag, _ = si.quad(lambda t: np.sqrt(-(4 * t**3 - 4 * t)), 0, 1, limit=200)
    assert abs(got.real) < 1e-10
    assert abs(got.imag) == pytest.approx(mag, abs=1e-9)


def test_turning_point_action_rejects_non_turning_points():
    p = CubicPotential(2, 0)
    with pytest.raises(ValueError):
        turning_point_action(p, 0.5, 1.0)


def test_turning_point_action_rejects_multiple_roots():
    p = CubicPotential(6.0, 2.0 / 7.0)  # double point at -1
    with pytest.raises(ValueError):
        turning_point_action(p, -1.0, 2.0)


def test_cycle_period_against_loop_oracle():
    # direct loop quadrature around the pair {-1, 0} on a dumbbell contour
    p = CubicPotential(2, 0)
    tpa = turning_point_action(p, -1.0, 0.0, side_hint=-0.5 + 0.0001j).value

    # loop oracle: rectangle around [-1, 0] with branch marching
    corners = [-1.3 - 0.4j, 0.3 - 0.4j, 0.3 + 0.4j, -1.3 + 0.4j, -1.3 - 0.4j]
    total = 0.0 + 0.0j
    w = np.sqrt(p(corners[0]))
    for z0, z1 in zip(corners[:-1], corners[1:]):
        n = 200000
        ts = np.linspace(0, 1, n + 1)
        zs = z0 + ts * (z1 - z0)
        vals = np.sqrt(p(zs))
        out = np.empty_like(vals)
        for i, v in enumerate(vals):
            if abs(v - w) > abs(v + w):
                v = -v
            out[i] = v
            w = v
        total += np.trapezoid(out, dx=1.0 / n) * (z1 - z0)
    # the loop integral equals twice the segment integral up to orientation
    assert abs(abs(total) - 2 * abs(tpa)) < 1e-6


def test_cycle_period_orientation_convention(orbit_potential):
    labels = label_turning_points_by_periods(orbit_potential)
    p1 = cycle_period(orbit_potential, "a1", labels=labels)
    p2 = cycle_period(orbit_potential, "a-1", labels=labels)
    assert p1.value.imag > 0
    assert p2.value.imag < 0
    # real potential: the two periods are conjugate
    assert p2.value == pytest.approx(np.conj(p1.value), abs=1e-10)
    # on the quantizing orbit the period is purely imaginary
    assert abs(p1.value.real) < 1e-10 * abs(p1.value)


def test_period_scaling_covariance(orbit_potential):
    labels = label_turning_points_by_periods(orbit_potential)
    base = cycle_period(orbit_potential, "a1", labels=labels).value
    for x in (0.7, 1.9):
        q = apply_group(GroupElement(x, 0), orbit_potential)
        lab_q = {k: x * v for k, v in labels.items()}
        got = cycle_period(q, "a1", labels=lab_q).value
        assert got == pytest.approx(x**2.5 * base, rel=1e-9)


def test_period_jacobian_vs_central_differences(orbit_potential):
    p = orbit_potential
    labels = label_turning_points_by_periods(p)
    da, db = period_jacobian(p, "a1", labels=labels)
    h = 1e-5

    def period_at(a, b):
        q = CubicPotential(a, b)
        return cycle_period(q, "a1", labels=label_turning_points_by_periods(q)).value

    fd_a = (period_at(p.a + h, p.b) - period_at(p.a - h, p.b)) / (2 * h)
    fd_b = (period_at(p.a, p.b + h) - period_at(p.a, p.b - h)) / (2 * h)
    assert da == pytest.approx(fd_a, rel=1e-6)
    assert db == pytest.approx(fd_b, rel=1e-6)


def test_jacobian_scaling_exponent(orbit_potential):
    # dP/da scales as x^{1/2} under the pure rescaling (x, 0)
    labels = label_turning_points_by_periods(orbit_potential)
    da, _ = period_jacobian(orbit_potential, "a1", labels=labels)
    x = 1.7
    q = apply_group(GroupElement(x, 0), orbit_potential)
    lab_q = {k: x * v for k, v in labels.items()}
    da2, _ = period_jacobian(q, "a1", labels=lab_q)
    assert da2 == pytest.approx(np.sqrt(x) * da, rel=1e-8)


def test_alpha_closed_form_pure_cubic():
    # V = 4x^3: |alpha| = (21/64) x^{-7/2}; over [1, inf) the integral is 21/160
    p = CubicPotential(0, 0)
    tail = alpha_ray_tail(p, 1.0)
    assert tail == pytest.approx(21.0 / 160.0, rel=1e-10)


def test_alpha_tail_decay_rate():
    p = CubicPotential(0, 0)
    for R in (2.0, 5.0, 11.0):
        assert alpha_ray_tail(p, R) == pytest.approx(
            (21.0 / 160.0) * R**-2.5, rel=1e-9
        )


def test_alpha_integral_scaling():
    p = CubicPotential(1.1, 0.4)
    path = BranchedPath(nodes=(2.0, 2.0 + 2.0j), branch_seed=1.0)
    base = alpha_integral(p, path)
    x = 1.6
    q = apply_group(GroupElement(x, 0), p)
    path_x = BranchedPath(nodes=(2.0 * x, (2.0 + 2.0j) * x), branch_seed=1.0)
    assert alpha_integral(q, path_x) == pytest.approx(x**-2.5 * base, rel=1e-9)
