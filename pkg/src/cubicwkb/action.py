"""Branch-tracked contour integration of sqrt(V) and the cycle periods.

The square root is evaluated in factored form
    sqrt(V) = 2 * eta * sqrt(x - r1) * sqrt(x - r2) * sqrt(x - r3),
with each factor continued separately along the path (a factor can only
vanish at its own root, so nearest-of-two continuation per factor is
unambiguous away from that root).  The overall sheet sign eta is pinned by a
seed value at one reference point.  Endpoints that coincide with simple
turning points are handled with the substitution x = tp + t^2 * (end - tp),
which removes the square-root endpoint singularity exactly: the vanishing
factor is t * sqrt(end - tp) on the tracked sheet.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .potential import CubicPotential, turning_points

_GAUSS_N = 20
_GX, _GW = np.polynomial.legendre.leggauss(_GAUSS_N)
_GX2, _GW2 = np.polynomial.legendre.leggauss(2 * _GAUSS_N)


class ClearanceError(ValueError):
    """Path passes closer to a turning point than the configured clearance."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


@dataclass(frozen=True)
class BranchedPath:
    """Piecewise-linear path with the sqrt(V) sheet fixed by a seed value.

    branch_seed is an approximation of sqrt(V) at the first node (the nearer
    of the two roots of V is taken).  If the first node coincides with a
    turning point the seed refers to the first regular node instead.
    """

    nodes: tuple[complex, ...]
    branch_seed: complex

    def __post_init__(self):
        if len(self.nodes) < 2:
            raise ValueError("path needs at least two nodes")


@dataclass(frozen=True)
class ActionValue:
    value: complex
    est_error: float


@dataclass(frozen=True)
class CyclePeriod:
    cycle_id: str
    value: complex
    est_error: float


class _FactorTracker:
    """Continues the three factors sqrt(x - r_i) along a point sequence."""

    __slots__ = ("roots", "vals")

    def __init__(self, roots, z0):
        self.roots = np.asarray(roots, dtype=complex)
        self.vals = np.sqrt(z0 - self.roots)

    def advance(self, z) -> np.ndarray:
        prin = np.sqrt(z - self.roots)
        flip = np.abs(prin - self.vals) > np.abs(prin + self.vals)
        self.vals = np.where(flip, -prin, prin)
        return self.vals

    def sqrtV(self) -> complex:
        return 2.0 * self.vals[0] * self.vals[1] * self.vals[2]

    def copy(self) -> "_FactorTracker":
        t = _FactorTracker.__new__(_FactorTracker)
        t.roots = self.roots
        t.vals = self.vals.copy()
        return t


def _seg_min_dist(a: complex, b: complex, r: complex) -> float:
    """Distance from point r to the segment [a, b]."""
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0:
        return abs(r - a)
    t = ((r - a) * np.conj(d)).real / L2
    t = min(1.0, max(0.0, t))
    return abs(a + t * d - r)


def _split_points(a: complex, b: complex, roots, skip=()) -> list[complex]:
    """Waypoints along [a, b] so each piece is shorter than half its distance
    to every root not in skip (keeps per-factor continuation unambiguous)."""
    out: list[tuple[complex, complex]] = []
    stack = [(a, b, 0)]
    while stack:
        u, v, depth = stack.pop()
        dmin = min(
            (_seg_min_dist(u, v, r) for i, r in enumerate(roots) if i not in skip),
            default=np.inf,
        )
        if abs(v - u) <= 0.5 * dmin or depth > 48 or v == u:
            out.append((u, v))
        else:
            mid = 0.5 * (u + v)
            stack.append((mid, v, depth + 1))
            stack.append((u, mid, depth + 1))
    out.sort(key=lambda seg: abs(seg[0] - a))
    return [s[0] for s in out] + [b]


def _gauss_panel(f, a, b):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    i2 = half * np.sum(_GW2 * f(mid + half * _GX2))
    i1 = half * np.sum(_GW * f(mid + half * _GX))
    return i2, abs(i2 - i1)


def _adaptive(f, a, b, tol, depth=0):
    val, err = _gauss_panel(f, a, b)
    if err <= tol or depth >= 26:
        if depth >= 26 and err > 1e4 * tol:
            raise QuadratureError(f"quadrature stalled at error {err:.3g}")
        return val, err
    mid = 0.5 * (a + b)
    v1, e1 = _adaptive(f, a, mid, 0.6 * tol, depth + 1)
    v2, e2 = _adaptive(f, mid, b, 0.6 * tol, depth + 1)
    return v1 + v2, e1 + e2


def _integrate_regular(roots, tracker, a, b, tol, weight):
    """Integral of weight(z, sqrtV) along the regular segment [a, b].

    Advances tracker to b.  weight must be vectorizable point-by-point.
    """
    pieces = _split_points(a, b, roots)
    total = 0.0 + 0.0j
    err = 0.0
    for u, v in zip(pieces[:-1], pieces[1:]):
        if u == v:
            continue
        base = tracker.copy()

        def f(ss):
            t = base.copy()
            out = np.empty(len(ss), dtype=complex)
            for i, s in enumerate(np.asarray(ss)):
                z = u + s * (v - u)
                fac = t.advance(z)
                out[i] = weight(z, 2.0 * fac[0] * fac[1] * fac[2]) * (v - u)
            return out

        val, e = _adaptive(f, 0.0, 1.0, tol)
        total += val
        err += e
        tracker.advance(v)
    return total, err


def _vanishing_set(roots, tp, scale):
    """Flat indices of all root copies sitting at the turning point tp."""
    return [i for i, r in enumerate(roots) if abs(r - tp) <= 1e-9 * max(scale, 1e-12)]


def _tp_leg_states(roots, vanish, tp, b, tracker_at_b):
    """Piece boundaries (in t) and tracker states for the leg tp -> b.

    The leg is parameterized x = tp + t^2 (b - tp), t in [0, 1].  States are
    produced by walking the tracker from b (t = 1) down to t = 0; the factors
    vanishing at tp are excluded from the step-size rule (they are evaluated
    in the exact form t * sqrt(b - tp) rather than through the tracker).
    """
    d = b - tp
    lam_pts = _split_points(tp, b, roots, skip=set(vanish))
    t_bounds = [float(np.sqrt(abs(l - tp) / abs(d))) if d != 0 else 0.0 for l in lam_pts]
    t_bounds[0], t_bounds[-1] = 0.0, 1.0
    states = [None] * len(t_bounds)
    walk = tracker_at_b.copy()
    states[-1] = walk.copy()
    for k in range(len(t_bounds) - 2, -1, -1):
        walk.advance(tp + t_bounds[k] ** 2 * d)
        states[k] = walk.copy()
    return t_bounds, states


def _integrate_tp_leg(roots, vanish, tp, b, tracker_at_b, tol, weight_t):
    """Integral from turning point tp to regular point b on the tracked sheet.

    weight_t(z, t, van, fac, others, d) must include the Jacobian
    2 t (b - tp) dt of the substitution; `van` is the product of the tracked
    sqrt(b - r_i) over the vanishing factors, so that the vanishing part of
    sqrt(V) is exactly t^len(vanish) * van.  Returns (value, error) oriented
    tp -> b.
    """
    d = b - tp
    others = [i for i in range(3) if i not in vanish]
    van = complex(np.prod([tracker_at_b.vals[i] for i in vanish]))
    nv = len(vanish)
    t_bounds, states = _tp_leg_states(roots, vanish, tp, b, tracker_at_b)
    total = 0.0 + 0.0j
    err = 0.0
    for k in range(len(t_bounds) - 1):
        t0, t1 = t_bounds[k], t_bounds[k + 1]
        if t0 == t1:
            continue
        base = states[k]

        def f(ts):
            t = base.copy()
            out = np.empty(len(ts), dtype=complex)
            for i, tt in enumerate(np.asarray(ts)):
                z = tp + tt**2 * d
                fac = t.advance(z)
                out[i] = weight_t(z, tt**nv * van, fac, others, d, tt)
            return out

        val, e = _adaptive(f, t0, t1, tol)
        total += val
        err += e
    return total, err


def _w_sqrtV(z, van_t, fac, others, d, tt):
    # sqrt(V) dx = 2 * (vanishing part) * (regular factors) * 2 t d dt
    reg = 1.0 + 0.0j
    for i in others:
        reg *= fac[i]
    return 2.0 * van_t * reg * 2.0 * tt * d


def line_action(
    p: CubicPotential,
    path: BranchedPath,
    tol: float = 1e-11,
    clearance: float | None = None,
) -> ActionValue:
    """Integral of sqrt(V) along the path on the sheet fixed by branch_seed.

    Interior nodes keep clearance from all turning points; the first or last
    node may coincide with a simple turning point (endpoint-adapted rule).
    """
    tps = turning_points(p)
    roots = np.array(tps.all_with_repeats, dtype=complex)
    sep = tps.separation if len(tps.roots) > 1 else max(tps.scale, 1.0)
    clr = clearance if clearance is not None else 1e-3 * max(sep, 1e-12)
    scale = max(tps.scale, 1.0)

    nodes = [complex(z) for z in path.nodes]
    d0 = np.abs(nodes[0] - roots)
    dN = np.abs(nodes[-1] - roots)
    start_is_tp = float(np.min(d0)) <= 1e-9 * scale
    end_is_tp = float(np.min(dN)) <= 1e-9 * scale
    van0 = _vanishing_set(roots, nodes[0], scale) if start_is_tp else []
    vanN = _vanishing_set(roots, nodes[-1], scale) if end_is_tp else []
    if start_is_tp and len(nodes) == 2 and end_is_tp:
        raise ClearanceError("a two-node path cannot join two turning points")

    for k, (u, v) in enumerate(zip(nodes[:-1], nodes[1:])):
        for j, r in enumerate(roots):
            if (k == 0 and j in van0) or (k == len(nodes) - 2 and j in vanN):
                continue
            if _seg_min_dist(u, v, r) < clr:
                raise ClearanceError(
                    f"segment {k} passes within {clr:.3g} of turning point {r}"
                )

    ref = nodes[1] if start_is_tp else nodes[0]
    tracker = _FactorTracker(roots, ref)
    if path.branch_seed == 0:
        raise ValueError("branch_seed must be a nonzero sqrt(V) approximation")
    w_ref = tracker.sqrtV()
    eta = -1.0 if abs(path.branch_seed + w_ref) < abs(path.branch_seed - w_ref) else 1.0

    total = 0.0 + 0.0j
    err = 0.0
    if start_is_tp:
        val, e = _integrate_tp_leg(roots, van0, nodes[0], nodes[1], tracker, tol, _w_sqrtV)
        total += eta * val
        err += e
        first_seg = 1
    else:
        first_seg = 0

    last = len(nodes) - 1
    for k in range(first_seg, last):
        u, v = nodes[k], nodes[k + 1]
        if k == last - 1 and end_is_tp:
            val, e = _integrate_tp_leg(roots, vanN, nodes[last], u, tracker, tol, _w_sqrtV)
            total += -eta * val  # leg was oriented tp -> u
            err += e
        else:
            val, e = _integrate_regular(
                roots, tracker, u, v, tol, lambda z, w: eta * w
            )
            total += val
            err += e
    return ActionValue(value=total, est_error=err)


def _flat_to_cluster(tps, flat_index):
    k = 0
    for ci, m in enumerate(tps.multiplicities):
        for _ in range(m):
            if k == flat_index:
                return ci
            k += 1
    raise IndexError(flat_index)


def turning_point_action(
    p: CubicPotential,
    from_tp: complex,
    to_tp: complex,
    side_hint: complex | None = None,
    tol: float = 1e-11,
) -> ActionValue:
    """Integral of sqrt(V) between two simple turning points.

    The path runs from_tp -> side_hint -> to_tp; side_hint is a regular point
    that selects which side of the third turning point the path passes and
    pins the sheet (sqrt(V) there is the principal product of factor roots).
    Defaults to the midpoint of the two endpoints.
    """
    tps = turning_points(p)
    roots = np.array(tps.all_with_repeats, dtype=complex)
    scale = max(tps.scale, 1e-12)
    di = np.abs(from_tp - roots)
    dj = np.abs(to_tp - roots)
    i, j = int(np.argmin(di)), int(np.argmin(dj))
    if di[i] > 1e-6 * scale or dj[j] > 1e-6 * scale:
        raise ValueError("endpoints must be turning points of the potential")
    if i == j:
        return ActionValue(value=0.0 + 0.0j, est_error=0.0)
    if (
        tps.multiplicities[_flat_to_cluster(tps, i)] != 1
        or tps.multiplicities[_flat_to_cluster(tps, j)] != 1
    ):
        raise ValueError("endpoints must be simple turning points")
    a_tp, b_tp = complex(roots[i]), complex(roots[j])
    if side_hint is not None:
        h = complex(side_hint)
    else:
        h = 0.5 * (a_tp + b_tp)
        if min(abs(h - r) for r in roots) < 0.05 * abs(b_tp - a_tp):
            # third root sits on the chord: hop over it on the +i side
            h = h + 0.5j * (b_tp - a_tp)
    if min(abs(h - r) for r in roots) < 1e-9 * scale:
        raise ClearanceError("side_hint too close to a turning point")

    tracker = _FactorTracker(roots, h)
    val1, e1 = _integrate_tp_leg(roots, [i], a_tp, h, tracker.copy(), tol, _w_sqrtV)
    val2, e2 = _integrate_tp_leg(roots, [j], b_tp, h, tracker.copy(), tol, _w_sqrtV)
    # from_tp -> h  plus  h -> to_tp
    return ActionValue(value=val1 - val2, est_error=e1 + e2)


def _orient_sign(value: complex, cycle_id: str) -> float:
    """CONVENTION: Im(period) > 0 on a1 and < 0 on a-1 (ties broken by Re > 0)."""
    want_positive = cycle_id == "a1"
    if value.imag != 0:
        return 1.0 if (value.imag > 0) == want_positive else -1.0
    return 1.0 if value.real >= 0 else -1.0


def label_turning_points_by_periods(
    p: CubicPotential, tol: float = 1e-8
) -> dict[str, complex]:
    """Label three simple turning points tp0 / tp1 / tp-1 for the two cycles.

    tp0 is the root whose two pairwise actions are closest to purely
    imaginary (the quantizing geometry); tp1 is the remaining root of larger
    imaginary part.  For real potentials with a single real root this yields
    tp0 = real root and tp1 in the upper half plane.
    """
    tps = turning_points(p)
    if tuple(tps.multiplicities) != (1, 1, 1):
        raise ValueError("labelling requires three simple turning points")
    r = list(tps.roots)
    scale = max(tps.scale, 1e-12)

    # real potential with one real root and a conjugate pair: canonical labels
    if p.is_real(1e-12 * max(1.0, abs(p.a), abs(p.b))):
        n_real = sum(1 for z in r if abs(z.imag) <= 1e-9 * scale)
        if n_real == 1:
            i0 = int(np.argmin([abs(z.imag) for z in r]))
            rest = [k for k in range(3) if k != i0]
            ra, rb = r[rest[0]], r[rest[1]]
            if ra.imag < rb.imag:
                ra, rb = rb, ra
            return {"tp0": r[i0], "tp1": ra, "tp-1": rb}

    # otherwise pick the root whose worse pairwise action is closest to
    # purely imaginary (at quantizing potentials both of its pairs are)
    score = {}
    for i in range(3):
        for j in range(i + 1, 3):
            v = turning_point_action(p, r[i], r[j], tol=tol).value
            score[(i, j)] = abs(v.real) / max(abs(v), 1e-300)
    worst = [
        max(score[(0, 1)], score[(0, 2)]),
        max(score[(0, 1)], score[(1, 2)]),
        max(score[(0, 2)], score[(1, 2)]),
    ]
    i0 = int(np.argmin(worst))
    rest = [k for k in range(3) if k != i0]
    ra, rb = r[rest[0]], r[rest[1]]
    if ra.imag < rb.imag:
        ra, rb = rb, ra
    return {"tp0": r[i0], "tp1": ra, "tp-1": rb}


def cycle_period(
    p: CubicPotential,
    cycle_id: str,
    labels: dict[str, complex] | None = None,
    tol: float = 1e-11,
) -> CyclePeriod:
    """Period over cycle a1 (around tp0, tp1) or a-1 (around tp0, tp-1).

    Normalized so that quantizing potentials sit exactly at i*pi*(n - 1/2)
    on a1 and -i*pi*(m - 1/2) on a-1: the value is the branch-tracked
    integral of sqrt(V) between the two encircled turning points with the
    orientation fixed by the sign of its imaginary part.
    """
    if cycle_id not in ("a1", "a-1"):
        raise ValueError("cycle_id must be 'a1' or 'a-1'")
    if labels is None:
        labels = label_turning_points_by_periods(p)
    lam0 = labels["tp0"]
    lam = labels["tp1"] if cycle_id == "a1" else labels["tp-1"]
    act = turning_point_action(p, lam0, lam, tol=tol)
    s = _orient_sign(act.value, cycle_id)
    return CyclePeriod(cycle_id=cycle_id, value=s * act.value, est_error=act.est_error)


def period_jacobian(
    p: CubicPotential,
    cycle_id: str,
    labels: dict[str, complex] | None = None,
    tol: float = 1e-11,
) -> tuple[complex, complex]:
    """(dP/da, dP/db) for cycle_period, by differentiating under the integral.

    dP/da = -int lam / sqrt(V) dlam and dP/db = -14 int dlam / sqrt(V) over
    the same segment, sheet and orientation (endpoint motion drops out since
    sqrt(V) vanishes there); the endpoint singularities are integrable and
    removed by the t^2 substitution.
    """
    if cycle_id not in ("a1", "a-1"):
        raise ValueError("cycle_id must be 'a1' or 'a-1'")
    if labels is None:
        labels = label_turning_points_by_periods(p)
    lam0 = labels["tp0"]
    lam = labels["tp1"] if cycle_id == "a1" else labels["tp-1"]

    tps = turning_points(p)
    roots = np.array(tps.all_with_repeats, dtype=complex)
    i = int(np.argmin(np.abs(lam0 - roots)))
    j = int(np.argmin(np.abs(lam - roots)))
    a_tp, b_tp = complex(roots[i]), complex(roots[j])
    h = 0.5 * (a_tp + b_tp)
    tracker = _FactorTracker(roots, h)

    def w_da(z, van_t, fac, others, d, tt):
        # -z / sqrt(V) * dx = -z / (2 t van f2 f3) * 2 t d dt = -z d / (van f2 f3);
        # Gauss nodes are interior so tt > 0 and van_t / tt is safe.
        return -z * d * tt / (van_t * fac[others[0]] * fac[others[1]])

    def w_db(z, van_t, fac, others, d, tt):
        return -14.0 * d * tt / (van_t * fac[others[0]] * fac[others[1]])

    da1, _ = _integrate_tp_leg(roots, [i], a_tp, h, tracker.copy(), tol, w_da)
    da2, _ = _integrate_tp_leg(roots, [j], b_tp, h, tracker.copy(), tol, w_da)
    db1, _ = _integrate_tp_leg(roots, [i], a_tp, h, tracker.copy(), tol, w_db)
    db2, _ = _integrate_tp_leg(roots, [j], b_tp, h, tracker.copy(), tol, w_db)
    base = turning_point_action(p, lam0, lam, tol=tol).value
    s = _orient_sign(base, cycle_id)
    return s * (da1 - da2), s * (db1 - db2)


def safe_nodes(a: complex, b: complex, roots, clearance: float, depth: int = 0):
    """Waypoints from a to b keeping clearance from all roots except the
    endpoints themselves (detours hop around blocking roots)."""
    bad = None
    for r in roots:
        if abs(r - a) < 1e-12 or abs(r - b) < 1e-12:
            continue
        if _seg_min_dist(a, b, r) < clearance:
            bad = r
            break
    if bad is None or depth > 6:
        return [a, b]
    d = b - a
    t = ((bad - a) * np.conj(d)).real / abs(d) ** 2
    foot = a + t * d
    away = foot - bad
    if abs(away) < 1e-14:
        away = 1j * d / abs(d)
    mid = bad + (2.5 * clearance + abs(away)) * away / max(abs(away), 1e-300)
    return (
        safe_nodes(a, mid, roots, clearance, depth + 1)[:-1]
        + safe_nodes(mid, b, roots, clearance, depth + 1)
    )


def alpha_at(p: CubicPotential, z: complex) -> float:
    """|alpha| at z, alpha = (4 V V'' - 5 V'^2) / (32 V^{5/2}); sheet-free."""
    V = p(z)
    return abs(4 * V * p.d2(z) - 5 * p.d1(z) ** 2) / (32.0 * abs(V) ** 2.5)


def alpha_integral(
    p: CubicPotential,
    path: BranchedPath,
    tol: float = 1e-11,
    clearance: float | None = None,
) -> float:
    """int |alpha(lam) dlam| along the path; the WKB relative-error density.

    |alpha| does not depend on the square-root sheet, so branch_seed is
    accepted for interface symmetry but not used.
    """
    tps = turning_points(p)
    roots = np.array(tps.all_with_repeats, dtype=complex)
    sep = tps.separation if len(tps.roots) > 1 else max(tps.scale, 1.0)
    clr = clearance if clearance is not None else 1e-3 * max(sep, 1e-12)
    nodes = [complex(z) for z in path.nodes]
    for u, v in zip(nodes[:-1], nodes[1:]):
        for r in roots:
            if _seg_min_dist(u, v, r) < clr:
                raise ClearanceError("path violates turning-point clearance")
    total = 0.0
    for u, v in zip(nodes[:-1], nodes[1:]):
        for s0, s1 in zip(*(lambda pp: (pp[:-1], pp[1:]))(_split_points(u, v, roots))):
            if s0 == s1:
                continue
            seg = s1 - s0

            def f(ts):
                return np.array(
                    [alpha_at(p, s0 + t * seg) * abs(seg) for t in np.asarray(ts)]
                )

            val, _ = _adaptive(f, 0.0, 1.0, tol)
            total += float(val.real)
    return total


def alpha_ray_tail(p: CubicPotential, start: complex, tol: float = 1e-12) -> float:
    """int_start^inf |alpha| |dlam| along the outward ray through start.

    Uses r = R / s^2 to compress the tail; alpha decays like r^{-7/2}, so the
    transformed integrand vanishes like s^4 at s = 0.
    """
    R = abs(start)
    if R == 0:
        raise ValueError("tail ray must start away from the origin")
    u = start / R

    def f(ss):
        out = np.empty(len(ss))
        for i, s in enumerate(np.asarray(ss)):
            if s <= 0:
                out[i] = 0.0
            else:
                r = R / s**2
                out[i] = alpha_at(p, r * u) * (2 * R / s**3)
        return out

    val, _ = _adaptive(f, 0.0, 1.0, tol)
    return float(val.real)
