"""Solver for the two-cycle quantization system and the real pole family.

The system is P_a1(a, b) = i pi (n - 1/2), P_a-1(a, b) = -i pi (m - 1/2)
for positive integers n, m; solutions approximate poles of the tritronquee
solution (a = pole position, b = the free Laurent coefficient).  Real
solutions form a single power-law family a_n = a* (n - 1/2)^{4/5},
b_n = b* (n - 1/2)^{6/5} generated by one scaling orbit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.optimize as so

from .action import cycle_period, label_turning_points_by_periods, period_jacobian
from .potential import CubicPotential, turning_points
from .stokes import classify
from .wkb import relative_errors


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class BsbIndex:
    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("quantization indices must be positive integers")


@dataclass(frozen=True)
class BsbSolution:
    index: BsbIndex
    a: complex
    b: complex
    residual_norm: float
    rho_max: float
    class_checked: bool

    @property
    def potential(self) -> CubicPotential:
        return CubicPotential(self.a, self.b)


_PERMS3 = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]


def _labels_from_roots(p: CubicPotential, prev_labels: dict[str, complex]):
    """Re-attach tp0/tp1/tp-1 to the current roots by optimal matching.

    The assignment must be unambiguous: a trial point whose best root
    permutation is not clearly cheaper than the runner-up is rejected,
    since the iteration could otherwise change branch silently.
    """
    roots = list(turning_points(p).roots)
    if len(roots) != 3:
        raise SolverError("turning points collided during iteration")
    names = ("tp0", "tp1", "tp-1")
    prev = [prev_labels[n] for n in names]
    costs = sorted(
        (sum(abs(roots[pi] - prev[i]) for i, pi in enumerate(perm)), perm)
        for perm in _PERMS3
    )
    best, perm = costs[0]
    second = costs[1][0]
    if best > 0.6 * second:
        raise SolverError("root-label matching ambiguous on this step")
    return {n: roots[pi] for n, pi in zip(names, perm)}


def _targets(idx: BsbIndex) -> tuple[complex, complex]:
    return 1j * np.pi * (idx.n - 0.5), -1j * np.pi * (idx.m - 0.5)


def _system(p: CubicPotential, labels, t1: complex, t2: complex, tol: float):
    P1 = cycle_period(p, "a1", labels=labels, tol=tol).value
    P2 = cycle_period(p, "a-1", labels=labels, tol=tol).value
    return np.array([P1 - t1, P2 - t2])


def _newton_targets(p, labels, t1, t2, tol, max_iter):
    """Damped Newton on the two periods toward arbitrary target values."""
    F = _system(p, labels, t1, t2, tol=1e-9)
    norm = float(np.max(np.abs(F)))
    qtol = 1e-9
    for it in range(max_iter):
        if norm <= tol:
            break
        if norm < 1e-6:
            qtol = 1e-12
        da1, db1 = period_jacobian(p, "a1", labels=labels, tol=qtol)
        da2, db2 = period_jacobian(p, "a-1", labels=labels, tol=qtol)
        J = np.array([[da1, db1], [da2, db2]])
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"singular Jacobian at iteration {it}") from exc
        lam = 1.0
        for _ in range(9):
            q = CubicPotential(p.a + lam * step[0], p.b + lam * step[1])
            try:
                labels_q = _labels_from_roots(q, labels)
                Fq = _system(q, labels_q, t1, t2, tol=qtol)
            except (SolverError, ValueError):
                lam *= 0.5
                continue
            nq = float(np.max(np.abs(Fq)))
            if nq < norm or nq <= tol:
                p, labels, F, norm = q, labels_q, Fq, nq
                break
            lam *= 0.5
        else:
            raise SolverError(f"line search stalled at residual {norm:.3e}")
    if norm > tol:
        raise SolverError(f"no convergence after {max_iter} iterations ({norm:.3e})")
    return p, labels, norm


def _anchor_labels(p: CubicPotential, t1: complex, t2: complex):
    """Topologically authoritative labels consistent with the period targets.

    Every continuation node solves a purely-imaginary-period system, so its
    Stokes complex is of the quantizing type and the full classifier yields
    the canonical labels.  Returns None when the class or the residual check
    fails (the branch was lost to a root braid).
    """
    try:
        g = classify(p)
    except Exception:
        return None
    if g.class_code != "320" or g.decoration_shift != 0:
        return None
    labels = dict(g.tp_labels)
    F = _system(p, labels, t1, t2, 1e-10)
    if float(np.max(np.abs(F))) > 1e-6:
        return None
    return labels


def continue_to(
    seed: CubicPotential,
    from_idx: BsbIndex,
    to_idx: BsbIndex,
    tol: float = 1e-10,
    labels: dict[str, complex] | None = None,
) -> tuple[CubicPotential, dict[str, complex]]:
    """Homotopy in the quantization targets from one index pair to another.

    The target pair is walked in adaptive fractional steps; the seed must
    solve (or nearly solve) the from_idx system.  Returns the continued
    potential together with its tracked turning-point labels.
    """
    f1, f2 = _targets(from_idx)
    g1, g2 = _targets(to_idx)
    p = seed
    if labels is None:
        labels = _anchor_labels(p, f1, f2) or label_turning_points_by_periods(p)
    tau = 0.0
    step = 1.0 / max(abs(to_idx.n - from_idx.n) + abs(to_idx.m - from_idx.m), 1)
    while tau < 1.0:
        nxt = min(1.0, tau + step)
        t1 = f1 + (g1 - f1) * nxt
        t2 = f2 + (g2 - f2) * nxt
        try:
            p2, labels2, _ = _newton_targets(p, labels, t1, t2, tol, max_iter=30)
            # every node of the homotopy solves a purely-imaginary-period
            # system, so the quantizing root tp0 is recoverable from the
            # geometry; a residual jump after re-anchoring means the roots
            # braided and the iteration drifted onto a permuted branch
            labels2 = _anchor_labels(p2, t1, t2)
            if labels2 is None:
                raise SolverError("labels braided during continuation")
        except SolverError:
            step *= 0.5
            if step < 1.0 / 256.0:
                raise
            continue
        p, labels, tau = p2, labels2, nxt
        step = min(1.5 * step, 1.0 - tau if tau < 1.0 else step)
        if step == 0.0:
            break
    return p, labels


def solve_bsb(
    idx: BsbIndex,
    seed: CubicPotential,
    tol: float = 1e-10,
    max_iter: int = 50,
    check_class: bool = True,
    labels: dict[str, complex] | None = None,
) -> BsbSolution:
    """Damped Newton iteration on the two periods with analytic Jacobian.

    The seed must carry the quantizing-type geometry (one root joined to the
    other two by near-imaginary actions) or lie in the Newton basin of it;
    explicit labels override the geometric labelling of the seed (needed for
    continuation seeds away from the real family, where all pairwise actions
    are near-imaginary and the heuristic is blind).
    """
    t1, t2 = _targets(idx)
    if labels is None:
        labels = label_turning_points_by_periods(seed)
    p, labels, norm = _newton_targets(seed, labels, t1, t2, tol, max_iter)

    rho_max = 0.0
    class_ok = False
    if check_class:
        g = classify(p)
        class_ok = g.class_code == "320" and g.decoration_shift == 0
        if not class_ok:
            raise SolverError(
                f"converged point classifies as {g.class_code} "
                f"(shift {g.decoration_shift}), not the quantizing class"
            )
        if abs(g.tp_labels["tp0"] - labels["tp0"]) > 1e-6 * (1 + abs(labels["tp0"])):
            raise SolverError("solver labels disagree with the classified graph")
        rho_max = relative_errors(p, g).max_finite
    arg_a = abs(np.angle(complex(p.a)))
    if arg_a <= 4 * np.pi / 5:
        raise SolverError(f"|arg a| = {arg_a:.4f} violates the pole sector bound")
    return BsbSolution(
        index=idx,
        a=complex(p.a),
        b=complex(p.b),
        residual_norm=norm,
        rho_max=rho_max,
        class_checked=class_ok,
    )


@lru_cache(maxsize=8)
def _orbit_point(tol: float = 1e-13) -> tuple[float, float]:
    """(b_hat, Im P1) for the real quantizing orbit at a = -1."""

    def re_p1(b):
        p = CubicPotential(-1.0, b)
        labels = label_turning_points_by_periods(p)
        return cycle_period(p, "a1", labels=labels, tol=1e-12).value.real

    lo, hi = np.log(1e-3), np.log(0.3)
    grid = np.linspace(lo, hi, 18)
    vals = [re_p1(-np.exp(t)) for t in grid]
    bracket = None
    for t0, t1, v0, v1 in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if v0 == 0.0:
            bracket = (t0, t0)
            break
        if v0 * v1 < 0:
            bracket = (t0, t1)
            break
    if bracket is None:
        raise SolverError("failed to bracket the real quantizing orbit")
    t_star = so.brentq(lambda t: re_p1(-np.exp(t)), *bracket, xtol=1e-15, rtol=8.9e-16)
    b_hat = -np.exp(t_star)
    p = CubicPotential(-1.0, b_hat)
    labels = label_turning_points_by_periods(p)
    y0 = cycle_period(p, "a1", labels=labels, tol=tol).value.imag
    return float(b_hat), float(y0)


def real_orbit_constants(tol: float = 1e-13) -> tuple[float, float, float]:
    """(mu_star, a_star, b_star) of the real pole family.

    mu_star is the orbit invariant in the a^3/b^2 form (~ -3158.92); a_star
    and b_star normalize the family so the cycle condition holds exactly at
    half-integer multiples of i pi.
    """
    b_hat, y0 = _orbit_point(tol)
    mu_star = -1.0 / b_hat**2
    x = (np.pi / y0) ** 0.4
    a_star = -(x**2)
    b_star = b_hat * x**3
    return mu_star, a_star, b_star


def real_orbit_potential() -> CubicPotential:
    """A representative potential on the real quantizing orbit (a = -1)."""
    b_hat, _ = _orbit_point()
    return CubicPotential(-1.0, b_hat)


def real_poles(n_max: int, tol: float = 1e-13) -> list[tuple[float, float]]:
    """(a_n, b_n) for n = 1..n_max from the exact power law of the family."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    _, a_star, b_star = real_orbit_constants(tol)
    return [
        (a_star * (n - 0.5) ** 0.8, b_star * (n - 0.5) ** 1.2)
        for n in range(1, n_max + 1)
    ]


def seed_from_scaling(
    idx: BsbIndex, solved: dict[tuple[int, int], BsbSolution] | None = None
) -> CubicPotential:
    """Newton seed for an index pair.

    Diagonal indices use the real power-law point; off-diagonal indices copy
    the nearest solved neighbour (continuation), falling back to the
    diagonal point at round((n + m) / 2) on a cold start.
    """
    if idx.n == idx.m:
        a, b = real_poles(idx.n)[-1]
        return CubicPotential(a, b)
    if solved:
        best = None
        for (n, m), sol in solved.items():
            d = abs(n - idx.n) + abs(m - idx.m)
            if best is None or d < best[0]:
                best = (d, sol)
        if best is not None and best[0] <= 2:
            return best[1].potential
    k = max(1, round((idx.n + idx.m) / 2))
    a, b = real_poles(k)[-1]
    return CubicPotential(a, b)


def solve_lattice(
    n_max: int, m_max: int, tol: float = 1e-10, check_class: bool = False
) -> tuple[dict[tuple[int, int], BsbSolution], dict[tuple[int, int], str]]:
    """Fill the (n, m) lattice: diagonal first, then continuation outward.

    Off-diagonal cells are reached by homotopy in the quantization targets
    from the nearest solved neighbour, which keeps the iterates on the
    quantizing branch.
    """
    solved: dict[tuple[int, int], BsbSolution] = {}
    failures: dict[tuple[int, int], str] = {}
    order = sorted(
        ((n, m) for n in range(1, n_max + 1) for m in range(1, m_max + 1)),
        key=lambda nm: (abs(nm[0] - nm[1]), nm[0] + nm[1]),
    )
    for n, m in order:
        idx = BsbIndex(n, m)
        try:
            labels = None
            if n == m:
                seed = seed_from_scaling(idx)
            else:
                neighbour = None
                for (nn, mm) in sorted(
                    solved, key=lambda t: abs(t[0] - n) + abs(t[1] - m)
                ):
                    neighbour = (nn, mm)
                    break
                if neighbour is None:
                    seed = seed_from_scaling(idx)
                else:
                    seed, labels = continue_to(
                        solved[neighbour].potential,
                        BsbIndex(*neighbour),
                        idx,
                        tol=tol,
                    )
            solved[(n, m)] = solve_bsb(
                idx, seed, tol=tol, check_class=check_class, labels=labels
            )
        except (SolverError, ValueError, RuntimeError) as exc:
            failures[(n, m)] = str(exc)
    return solved, failures
