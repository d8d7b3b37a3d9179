from fractions import Fraction

import numpy as np
import pytest
import sympy

from cubicwkb.painleve import coeff_poly, laurent_coeffs, pi_residual


def test_low_order_pattern_exact():
    c2 = coeff_poly(2)
    c3 = coeff_poly(3)
    assert c2 == {(1, 0): Fraction(1, 10)}
    assert c3 == {(0, 0): Fraction(1, 6)}
    assert coeff_poly(-2) == {(0, 0): Fraction(1)}
    assert coeff_poly(-1) == {}
    assert coeff_poly(0) == {}
    assert coeff_poly(1) == {}
    assert coeff_poly(4) == {(0, 1): Fraction(1)}


def test_c5_against_series_substitution_oracle():
    # independent oracle: substitute a symbolic truncated series into the
    # equation and solve order by order with sympy
    a, b, t = sympy.symbols("a b t")
    N = 8
    cs = {-2: sympy.Integer(1), -1: 0, 0: 0, 1: 0,
          2: a / 10, 3: sympy.Rational(1, 6), 4: b}
    unknowns = {j: sympy.Symbol(f"c{j}") for j in range(5, N + 1)}
    cs.update(unknowns)
    y = sum(c * t**j for j, c in cs.items())
    expr = sympy.expand(sympy.diff(y, t, 2) - 6 * y**2 + (t + a))
    poly = sympy.Poly(expr, t)
    sols = {}
    for m in range(3, N - 1):  # orders that pin c_5..c_N
        eq = poly.coeff_monomial(t**m)
        eq = eq.subs(sols)
        j = m + 2
        sol = sympy.solve(sympy.Eq(eq, 0), unknowns[j])
        sols[unknowns[j]] = sympy.expand(sol[0])
    for j in range(5, N - 1):
        mine = coeff_poly(j)
        theirs = sympy.expand(sols[unknowns[j]])
        built = sum(
            sympy.Rational(c.numerator, c.denominator) * a**i * b**k
            for (i, k), c in mine.items()
        )
        assert sympy.simplify(built - theirs) == 0


def test_coefficient_reality():
    # coefficients are real polynomials: evaluating at conjugate (a, b)
    # conjugates every c_j
    s = laurent_coeffs(-1.2 + 0.8j, 0.5 - 0.3j, N=18)
    sc = laurent_coeffs(np.conj(-1.2 + 0.8j), np.conj(0.5 - 0.3j), N=18)
    for c1, c2 in zip(s.coeffs, sc.coeffs):
        assert c2 == pytest.approx(np.conj(c1), abs=1e-14)


def test_residual_conjugation_symmetry():
    s = laurent_coeffs(-1.0 + 0.5j, 0.2 + 0.1j, N=16)
    sc = laurent_coeffs(-1.0 - 0.5j, 0.2 - 0.1j, N=16)
    z = s.pole + 0.07 + 0.02j
    zc = np.conj(z)
    assert pi_residual(s, z) == pytest.approx(pi_residual(sc, zc), rel=1e-10)


def test_residual_decays_with_order():
    a, b = -2.3476, -0.0640
    prev = None
    for N in (6, 9, 12):
        s = laurent_coeffs(a, b, N=N)
        r = pi_residual(s, a + 0.15)
        if prev is not None:
            assert r < prev
        prev = r


def test_residual_small_at_reference_pair():
    s = laurent_coeffs(-2.3476, -0.0640, N=20)
    assert pi_residual(s, s.pole + 0.05) <= 1e-10


def test_double_pole_structure():
    s = laurent_coeffs(-2.3476, -0.0640, N=20)
    for ang in (0.3, 2.0, 4.4):
        z = s.pole + 1e-3 * np.exp(1j * ang)
        val = s.eval(z) * (z - s.pole) ** 2
        assert val == pytest.approx(1.0, abs=1e-8)


def test_eval_guards():
    s = laurent_coeffs(-1.0, 0.1, N=10)
    with pytest.raises(ValueError):
        pi_residual(s, s.pole)
    with pytest.raises(ValueError):
        pi_residual(s, s.pole + 10.0)
    with pytest.raises(ValueError):
        laurent_coeffs(1.0, 0.0, N=3)
