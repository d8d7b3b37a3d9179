import numpy as np
import pytest

from conftest import random_potentials
from cubicwkb.potential import CubicPotential, GroupElement, apply_group
from cubicwkb.stokes import classify
from cubicwkb.wkb import (
    LOG3_HALF,
    WrongClassError,
    asymptotic_values_320,
    partial_asymptotic_values,
    quantization_residuals,
    relative_errors,
    sigma0_action_differences,
    transport_02_to_0m2,
)


def proj_equal(wa, wb, tol=1e-8):
    na, da = wa
    nb, db = wb
    return abs(na * db - nb * da) <= tol * max(abs(na * db) + abs(nb * da), 1.0)


def test_wrong_class_rejected():
    p = CubicPotential(0, 0)
    g = classify(p)
    with pytest.raises(WrongClassError):
        asymptotic_values_320(p, g)


def test_action_differences_conjugate_on_real_orbit(orbit_potential):
    g = classify(orbit_potential)
    d1, dm1 = sigma0_action_differences(orbit_potential, g)
    assert dm1 == pytest.approx(np.conj(d1), abs=1e-10)
    assert abs(d1.real) < 1e-10


def test_residuals_vanish_at_solution(sol_11):
    p = sol_11.potential
    g = classify(p)
    r = quantization_residuals(p, g)
    assert abs(r.r1) < 1e-9
    assert abs(r.r2) < 1e-9
    # the symmetry-breaking residual is incompatible with the other two
    assert abs(r.r3) > 0.5
    assert r.r3 == pytest.approx(3.0, abs=1e-9)


def test_residual_conjugation_real_potential(orbit_potential):
    g = classify(orbit_potential)
    r = quantization_residuals(orbit_potential, g)
    assert r.r1 == pytest.approx(np.conj(r.r2), abs=1e-12)


def test_asymptotic_values_structure_at_solution(sol_11):
    p = sol_11.potential
    g = classify(p)
    av = asymptotic_values_320(p, g)
    # basis values
    assert proj_equal(av.w[0], (0.0, 1.0))
    assert av.is_infinite(-2)
    # matching conditions at the solution: hat w1 = w_-2, hat w2 = w_-1
    assert av.is_infinite(1)
    assert proj_equal(av.w[2], av.w[-1])
    # coincidence pattern of the target quintuplet (0, 1, inf, inf, 1):
    # exactly three distinct projective values, paired (1,-2) and (2,-1)
    assert not proj_equal(av.w[0], av.w[2])
    assert not proj_equal(av.w[0], av.w[1])
    assert not proj_equal(av.w[1], av.w[2])
    assert av.exact_flags[-1] and not av.exact_flags[1]


def test_asymptotic_values_pairwise_distinct_off_solution(orbit_potential):
    # an orbit point that is not a solution: all five distinct except at
    # most one pair
    p = orbit_potential
    g = classify(p)
    av = asymptotic_values_320(p, g)
    coincident = 0
    ks = list(range(-2, 3))
    for i, ka in enumerate(ks):
        for kb in ks[i + 1:]:
            if proj_equal(av.w[ka], av.w[kb], tol=1e-10):
                coincident += 1
    assert coincident <= 1


def test_consecutive_values_never_equal(sol_11, orbit_potential):
    for p in (sol_11.potential, orbit_potential):
        g = classify(p)
        av = asymptotic_values_320(p, g)
        for k in range(-2, 3):
            kn = (k + 1 + 2) % 5 - 2
            assert not proj_equal(av.w[k], av.w[kn], tol=1e-12)


def test_moebius_transport_between_normalizations(sol_22):
    p = sol_22.potential
    g = classify(p)
    av_0m2 = asymptotic_values_320(p, g, normalization=(0, -2))
    av_02 = asymptotic_values_320(p, g, normalization=(0, 2))
    moved = transport_02_to_0m2(av_02)
    for k in range(-2, 3):
        assert proj_equal(av_0m2.w[k], moved.w[k], tol=1e-8)


def test_residual_value_consistency(sol_11, orbit_potential):
    # hat w1 = w_-2 exactly when r1 = 0: check the implication both ways on
    # solver output and on an off-solution potential
    for p, at_solution in ((sol_11.potential, True), (orbit_potential, False)):
        g = classify(p)
        av = asymptotic_values_320(p, g)
        r = quantization_residuals(p, g)
        w1_is_wm2 = proj_equal(av.w[1], av.w[-2], tol=1e-8)
        assert w1_is_wm2 == (abs(r.r1) < 1e-8) == at_solution


def test_partial_values_for_other_classes():
    q100 = partial_asymptotic_values("100")
    assert q100["values"][0] == -1.0
    assert q100["values"][2] == 1.0 and q100["values"][-2] == 1.0
    q110 = partial_asymptotic_values("110")
    assert q110["values"][-1] == 1.0
    assert q110["values"][2] == -1.0
    q000 = partial_asymptotic_values("000")
    for k in range(-2, 3):
        assert q000["values"][k] == pytest.approx(np.exp(2j * np.pi * k / 5))
    with pytest.raises(ValueError):
        partial_asymptotic_values("300")


def test_relative_errors_structure(orbit_potential):
    g = classify(orbit_potential)
    re = relative_errors(orbit_potential, g)
    # consecutive entries vanish, matrix is symmetric
    for l in range(-2, 3):
        ln = (l + 1 + 2) % 5 - 2
        assert re.value(l, ln) == 0.0
        assert re.value(ln, l) == 0.0
    assert np.array_equal(re.rho, re.rho.T)
    # infinite exactly on the non-related pairs
    for j in range(-2, 3):
        for k in range(-2, 3):
            if not g.relation.related(j, k):
                assert np.isinf(re.value(j, k))
            else:
                assert np.isfinite(re.value(j, k))


def test_relative_errors_finite_below_threshold_at_n2(sol_22):
    p = sol_22.potential
    g = classify(p)
    re = relative_errors(p, g)
    assert 0 < re.max_finite < LOG3_HALF
    assert re.sim_equals_relation


def test_relative_errors_scaling(orbit_potential):
    g = classify(orbit_potential)
    base = relative_errors(orbit_potential, g).max_finite
    x = 1.5
    q = apply_group(GroupElement(x, 0), orbit_potential)
    gq = classify(q)
    got = relative_errors(q, gq).max_finite
    assert got == pytest.approx(x**-2.5 * base, rel=1e-8)
