"""Direct computation of the Stokes multipliers by ODE integration.

Each sector carries a normalized recessive solution fixed by
    psi_k(x) ~ x^{-3/4} exp(-(4/5) x^{5/2} + a x^{1/2}),  x -> inf on the ray
    arg x = 2 pi k / 5,
with the half-power branch chosen so Re x^{5/2} -> +inf along that ray and
the quarter power taken as the principal branch.  Initial data at
x_k = R exp(2 pi i k / 5) come from the exact WKB gauge transform plus
regularized tail integrals along the outward ray, so the per-sector
normalization constants are coherent to O(rho(R)^3).

Multipliers are extracted by a central connection: each solution is carried
radially inward along its own ray (the stable direction) and then through
the corridors of the Stokes complex, where the action's real part stays near
the saddle levels, so the exponentially small recessive components survive
in double precision.  Every Wronskian ratio is evaluated at a common point
on the wall separating the sectors involved, where all factors have
comparable modulus, and at a second wall as a consistency gate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .action import _adaptive
from .potential import CubicPotential, turning_points
from .stokes import StokesComplexGraph, classify


class MonodromyError(RuntimeError):
    pass


@dataclass(frozen=True)
class RecessiveSolution:
    """Samples of one normalized recessive solution on the circle |x| = R.

    Samples are stored at multiples of pi/5 as (v, v', log_scale): the true
    solution is exp(log_scale) * v.  Coverage spans arg x in
    [2 pi k/5 - 4 pi/5, 2 pi k/5 + 4 pi/5].
    """

    sector: int
    radius: float
    samples: dict[int, tuple[complex, complex, complex]]  # key: angle index j (pi/5 units)
    est_error: float = 0.0

    def magnitude(self, j: int) -> float:
        v, _, l = self.samples[j]
        return float(np.exp(l.real) * abs(v)) if np.isfinite(l.real) else np.inf

    def log_magnitude(self, j: int) -> float:
        v, _, l = self.samples[j]
        return float(l.real + np.log(abs(v)))


@dataclass(frozen=True)
class StokesMultipliers:
    sigma: dict[int, complex]
    admissibility_residuals: tuple[complex, ...]
    two_point_spread: float
    wronskian_drift: float
    est_error: float
    completed: tuple[int, ...] = ()

    @property
    def max_admissibility_residual(self) -> float:
        return float(max(abs(r) for r in self.admissibility_residuals))

    @property
    def normalized_residuals(self) -> tuple[float, ...]:
        """Residuals scaled by the size of the terms entering each relation.

        Generic potentials have multipliers as large as e^{2 max Re dS}, so
        the absolute residual of 1 + s_k s_{k+1} + i s_{k+3} is floored at
        machine epsilon times |s_k s_{k+1}|; the normalized form is the
        scale-free accuracy measure.
        """
        out = []
        for k in range(-2, 3):
            s1 = self.sigma[k]
            s2 = self.sigma[_s5(k + 1)]
            s3 = self.sigma[_s5(k + 3)]
            r = 1.0 + s1 * s2 + 1j * s3
            out.append(float(abs(r) / (1.0 + abs(s1 * s2) + abs(s3))))
        return tuple(out)

    @property
    def max_normalized_residual(self) -> float:
        return float(max(self.normalized_residuals))


def default_radius(p: CubicPotential) -> float:
    return float(max(8.0, 4.0 * (1.0 + turning_points(p).scale)))


class _Ray:
    """Branch-coherent quantities along the outward ray arg x = 2 pi k / 5."""

    def __init__(self, p: CubicPotential, k: int, R: float):
        self.p = p
        self.k = k
        self.R = R
        self.theta = 2.0 * np.pi * k / 5.0
        self.eps = -1.0 if (k % 2) else 1.0
        self.u = np.exp(1j * self.theta)
        self.roots = np.array(turning_points(p).all_with_repeats, dtype=complex)

    def half_power(self, r: float) -> complex:
        return self.eps * np.sqrt(r) * np.exp(0.5j * self.theta)

    def w(self, r: float) -> complex:
        """sqrt(V) on the recessive branch at x = r * exp(i theta)."""
        lam = r * self.u
        prod = np.prod(1.0 - self.roots / lam)
        s = self.half_power(r)
        return 2.0 * s**3 * np.sqrt(prod)

    def alpha(self, r: float) -> complex:
        lam = r * self.u
        V = self.p(lam)
        w = self.w(r)
        return (4.0 * V * self.p.d2(lam) - 5.0 * self.p.d1(lam) ** 2) / (32.0 * w**5)

    def alpha_over_2w(self, r: float) -> complex:
        return self.alpha(r) / (2.0 * self.w(r))

    def d_alpha_over_2w(self, r: float) -> complex:
        """d/dx of alpha/(2w) at x = r e^{i theta} (analytic derivative)."""
        lam = r * self.u
        V = self.p(lam)
        V1 = self.p.d1(lam)
        V2 = self.p.d2(lam)
        w = self.w(r)
        alpha = (4.0 * V * V2 - 5.0 * V1**2) / (32.0 * w**5)
        num1 = 4.0 * V * 24.0 - 6.0 * V1 * V2  # d/dx of (4 V V'' - 5 V'^2)
        dalpha = num1 / (32.0 * w**5) - 5.0 * alpha * V1 / (2.0 * V)
        dw = V1 / (2.0 * w)
        return dalpha / (2.0 * w) - alpha * dw / (2.0 * w**2)

    def _tail(self, f, tol=1e-13):
        """int_R^inf f(r) dr via r = R / s^2."""
        R = self.R

        def g(ss):
            out = np.empty(len(ss), dtype=complex)
            for i, s in enumerate(np.asarray(ss)):
                if s <= 0:
                    out[i] = 0.0
                else:
                    r = R / s**2
                    out[i] = f(r) * (2.0 * R / s**3)
            return out

        val, err = _adaptive(g, 0.0, 1.0, tol)
        return val, err

    def normalization(self):
        """(log N, U1, U2, est_error) for the initial data at r = R."""
        p, R, u = self.p, self.R, self.u
        a = p.a
        b = p.b

        # action-tail T_inf: integrand w - (2 x^{3/2} - (a/2) x^{-1/2}) dx
        #   = 2 s^3 (sqrt(1 + q) - 1 + a/(4 x^2)) dx, q = -a/(2x^2) - 7b/x^3;
        # the bracket is evaluated by its series for small q to avoid the
        # catastrophic cancellation at large radii
        def f_T(r):
            lam = r * u
            s3 = self.half_power(r) ** 3
            q = -0.5 * a / lam**2 - 7.0 * b / lam**3
            if abs(q) < 1e-3:
                bracket = (
                    -3.5 * b / lam**3
                    - q**2 / 8.0
                    + q**3 / 16.0
                    - 5.0 * q**4 / 128.0
                )
            else:
                bracket = np.sqrt(1.0 + q) - 1.0 + 0.25 * a / lam**2
            return 2.0 * s3 * bracket * u

        T_inf, eT = self._tail(f_T)

        # log-derivative tail M_inf: -(1/4)(V'/V - 3/x) = -(ax + 21b)/(x V)
        def f_M(r):
            lam = r * u
            return -(a * lam + 21.0 * b) / (lam * p(lam)) * u

        M_inf, eM = self._tail(f_M)

        # alpha tails for the Volterra corrections
        def f_Ia(r):
            return self.alpha(r) * u

        I_a, eI = self._tail(f_Ia)

        def f_J2(r):
            return self.alpha(r) * self.alpha_over_2w(r) * u

        J2, eJ = self._tail(f_J2)

        s_R = self.half_power(R)
        G_R = 0.8 * R**2.5 - a * s_R
        logN = (
            -G_R
            + T_inf
            - M_inf
            - 0.75 * np.log(R)
            - 0.75j * self.theta
        )
        a2w = self.alpha_over_2w(R)
        da2w = self.d_alpha_over_2w(R)
        w_R = self.w(R)
        U1 = -a2w * (1.0 + I_a - a2w) - da2w / (2.0 * w_R)
        U2 = 1.0 + I_a + 0.5 * I_a**2 - J2
        # neglected terms are O(rho^3) with rho ~ |I_a|
        est = float(abs(I_a) ** 3 + eT + eM + eI + eJ)
        return logN, U1, U2, est

    def initial_data(self):
        """(v, v', log_scale, est_error) of the normalized solution at r = R."""
        logN, U1, U2, est = self.normalization()
        lam = self.R * self.u
        V = self.p(lam)
        w = self.w(self.R)
        corr = self.p.d1(lam) / (4.0 * V)
        psi = U1 + U2
        dpsi = (w - corr) * U1 + (-w - corr) * U2
        return psi, dpsi, logN, est


def _integrate_arc(p, R, j_start, direction, n_steps, v0, dv0, l0, rtol):
    """March (psi, psi') along |x| = R from angle index j_start (pi/5 units).

    Returns samples {j: (v, v', log_scale)} at each passed multiple of pi/5,
    rescaling per half-step segment (pi/10) to keep moduli near unity.
    """
    samples = {j_start: (v0, dv0, l0)}
    v, dv, l = v0, dv0, l0
    wscale = 2.0 * R**1.5

    def rhs(phi, y):
        lam = R * np.exp(1j * phi)
        dlam = 1j * lam
        return np.array([y[1] * dlam, p(lam) * y[0] * dlam])

    for step in range(n_steps):
        phi0 = (j_start * np.pi / 5.0) + direction * step * (np.pi / 5.0)
        for half in range(2):
            a0 = phi0 + direction * half * (np.pi / 10.0)
            a1 = a0 + direction * (np.pi / 10.0)
            sol = solve_ivp(
                rhs,
                (a0, a1),
                np.array([v, dv], dtype=complex),
                method="DOP853",
                rtol=rtol,
                atol=np.array([1e-14, 1e-14 * wscale]),
                dense_output=False,
            )
            if not sol.success:
                raise MonodromyError(f"arc integration failed near angle {a0}")
            v, dv = sol.y[0, -1], sol.y[1, -1]
            m = max(abs(v), abs(dv) / wscale)
            if m == 0 or not np.isfinite(m):
                raise MonodromyError("solution vanished or overflowed on the arc")
            v /= m
            dv /= m
            l = l + np.log(m)
        j = j_start + direction * (step + 1)
        samples[j] = (v, dv, l)
    return samples


def recessive_solution(
    p: CubicPotential,
    k: int,
    R: float | None = None,
    rtol: float = 1e-12,
    span: int = 4,
) -> RecessiveSolution:
    """Normalized recessive solution of sector k sampled on |x| = R.

    The arc covers arg x in [2 pi k/5 - span*pi/5, 2 pi k/5 + span*pi/5].
    """
    R = float(R) if R is not None else default_radius(p)
    if R < 2.0 * turning_points(p).scale:
        raise MonodromyError("R too small: turning points too close to the circle")
    ray = _Ray(p, k, R)
    v, dv, l, est = ray.initial_data()
    m = max(abs(v), abs(dv) / (2.0 * R**1.5))
    v, dv, l = v / m, dv / m, l + np.log(m)
    up = _integrate_arc(p, R, 2 * k, +1, span, v, dv, l, rtol)
    down = _integrate_arc(p, R, 2 * k, -1, span, v, dv, l, rtol)
    samples = {**down, **up}
    return RecessiveSolution(sector=k, radius=R, samples=samples, est_error=est)


def _s5(k: int) -> int:
    """Reduce an index into the signed window -2..2."""
    return ((k + 2) % 5) - 2


def _transport(p, nodes, v, dv, l, rtol):
    """Carry (psi, psi', log_scale) along a polyline, rescaling per node.

    Returns (v, dv, l, quality): quality is the net climb of -log|psi| from
    its running minimum, which bounds the log of the contamination
    amplification picked up along the way (a clean, downhill leg has
    quality ~ 0).
    """
    h_min = -(l.real + np.log(max(abs(v), 1e-300)))
    h_end = h_min
    for a, b in zip(nodes[:-1], nodes[1:]):
        seg = b - a
        if seg == 0:
            continue

        def rhs(t, y):
            lam = a + t * seg
            return np.array([y[1] * seg, p(lam) * y[0] * seg])

        n_probe = max(2, int(abs(seg) * (1.0 + abs(p(a)) ** 0.5)))
        t_eval = np.linspace(0.0, 1.0, min(n_probe, 24) + 1)[1:]
        sol = solve_ivp(
            rhs,
            (0.0, 1.0),
            np.array([v, dv], dtype=complex),
            method="DOP853",
            rtol=rtol,
            atol=1e-300,
            t_eval=t_eval,
        )
        if not sol.success:
            raise MonodromyError(f"transport failed on segment {a} -> {b}")
        for col in range(sol.y.shape[1]):
            mag = abs(sol.y[0, col])
            if mag > 0:
                h_here = -(l.real + np.log(mag))
                h_min = min(h_min, h_here)
                h_end = h_here
        v, dv = sol.y[0, -1], sol.y[1, -1]
        wscale = 1.0 + abs(p(b)) ** 0.5
        m = max(abs(v), abs(dv) / wscale)
        if m == 0 or not np.isfinite(m):
            raise MonodromyError("solution vanished or overflowed in transport")
        v, dv, l = v / m, dv / m, l + np.log(m)
    return v, dv, l, float(max(0.0, h_end - h_min))


def _wall_midpoint(g: StokesComplexGraph, wall, r_ext: float) -> complex:
    if wall[0] == "int":
        return 0.5 * (g.internal_vertices[wall[1]] + g.internal_vertices[wall[2]])
    pts = g.lines[wall[1]].points
    k = int(np.argmin(np.abs(np.abs(pts) - r_ext)))
    return complex(pts[k])


def stokes_multipliers(
    p: CubicPotential,
    R: float | None = None,
    rtol: float = 1e-13,
    graph: StokesComplexGraph | None = None,
) -> StokesMultipliers:
    """All five Stokes multipliers via Wronskian ratios of recessive solutions.

    sigma_k = W(psi_{k-1}, psi_{k+1}) / W(psi_k, psi_{k+1}), with both
    Wronskians evaluated at a common point on a wall of the Stokes complex
    between the sectors involved (where all the factors have comparable
    modulus), and again at a second wall as a consistency gate.
    """
    R = float(R) if R is not None else default_radius(p)
    g = graph
    if g is None:
        # the graph is only used to route transports and choose evaluation
        # walls; for potentials sitting on a class boundary (where
        # classification is ambiguous by design) the corridor geometry of a
        # slightly perturbed neighbour serves equally well, since the
        # solutions are entire and paths are free to deform
        try:
            g = classify(p)
        except Exception:
            scale = max(turning_points(p).scale, 1.0)
            for eps in (3e-4, 1e-3, 3e-3):
                try:
                    g = classify(
                        CubicPotential(p.a, p.b + eps * scale**3 * (1 + 1j))
                    )
                    break
                except Exception:
                    continue
            if g is None:
                raise MonodromyError("no usable routing graph near this potential")
    tps = turning_points(p)
    scale = max(tps.scale, 1e-12)
    roots = list(tps.roots)
    r_foot = max(1.35 * scale, 1.0)

    # consecutive-sector corridors, ordered from the lower sector's side
    corridors = {}
    for k in range(-2, 3):
        kn = _s5(k + 1)
        walls = g.corridors.get((k, kn))
        if walls is None and g.corridors.get((kn, k)) is not None:
            walls = tuple(reversed(g.corridors[(kn, k)]))
        if not walls:
            raise MonodromyError(f"no corridor between sectors {k} and {kn}")
        corridors[k] = walls

    def wall_endpoints(w):
        if w[0] == "int":
            return {w[1], w[2]}
        return {g.lines[w[1]].origin}

    def wall_point(w):
        return _wall_midpoint(g, w, 0.85 * r_foot)

    # evaluation point of the pair (k, k+1): the point on the corridor wall
    # facing sector k (the solutions involved all have moderate modulus on
    # the walls, whose levels sit at the saddle values)
    mids = {k: wall_point(corridors[k][0]) for k in range(-2, 3)}

    def chain_points(walls):
        """Waypoints through a wall sequence, bridging across shared
        turning points so the path hugs the complex (the ODE is regular at
        turning points, and Re S is constant along each wall)."""
        pts = []
        prev = None
        for w in walls:
            if prev is not None:
                common = wall_endpoints(prev) & wall_endpoints(w)
                if common:
                    pts.append(complex(g.internal_vertices[common.pop()]))
            pts.append(wall_point(w))
            prev = w
        return pts

    def route(j, i):
        """Waypoints from the foot of sector j to the eval point mids[i]."""
        if i == j:
            return [mids[j]]
        if i == _s5(j - 1):
            return chain_points(tuple(reversed(corridors[_s5(j - 1)])))
        if i == _s5(j + 1):
            return chain_points(corridors[j] + (corridors[_s5(j + 1)][0],))
        if i == _s5(j - 2):
            return chain_points(
                tuple(reversed(corridors[_s5(j - 1)]))
                + tuple(reversed(corridors[_s5(j - 2)]))
            )
        if i == _s5(j + 2):
            return chain_points(
                corridors[j]
                + corridors[_s5(j + 1)]
                + (corridors[_s5(j + 2)][0],)
            )
        raise MonodromyError("route outside the supported sector span")

    # initial data at radius R, carried inward to the foot of each ray and
    # then along the complex to the evaluation points
    init_est = 0.0
    data = {}  # (j, eval_key) -> (v, dv, l, quality)
    for j in range(-2, 3):
        ray = _Ray(p, j, R)
        v, dv, l, est = ray.initial_data()
        init_est += est
        m = max(abs(v), abs(dv) / (2.0 * R**1.5))
        v, dv, l = v / m, dv / m, l + np.log(m)
        foot = r_foot * np.exp(1j * ray.theta)
        # split the radial leg so the growth per piece stays well inside the
        # double range (the solution climbs by e^{(4/5) R^{5/2}} overall)
        n_rad = max(1, int(0.8 * R**2.5 / 150.0) + 1)
        radii = np.geomspace(R, r_foot, n_rad + 1)
        rad_nodes = [r * np.exp(1j * ray.theta) for r in radii]
        v, dv, l, _ = _transport(p, rad_nodes, v, dv, l, rtol)
        for off in (-2, -1, 0, 1, 2):
            wk5 = _s5(j + off)
            data[(j, wk5)] = _transport(
                p, [foot] + route(j, wk5), v, dv, l, rtol
            )

    def wronskian_candidates(ja, jb):
        """Constant Wronskian of a solution pair at each wall, with the
        estimated relative error (transport contamination plus cancellation
        at the evaluation point), sorted best first."""
        cands = []
        for wk in range(-2, 3):
            va, dva, la, qa = data[(_s5(ja), wk)]
            vb, dvb, lb, qb = data[(_s5(jb), wk)]
            w = va * dvb - dva * vb
            if w == 0:
                continue
            cancel = (abs(va * dvb) + abs(dva * vb)) / abs(w)
            err = np.exp(2.0 * max(qa, qb)) * 1e-13 * cancel + 1e-16 * cancel
            cands.append((w, la + lb, err))
        if not cands:
            raise MonodromyError("vanishing Wronskian for a solution pair")
        cands.sort(key=lambda t: t[2])
        return cands

    # Raw ratios s_k are taken in the cut-plane basis (the quarter power has
    # its cut on the negative real axis, between sectors +2 and -2).  In that
    # basis the interior connection relations have unit coefficient while the
    # two relations crossing the cut carry a factor i; matching to the
    # standard normalization (the one whose quintuplet satisfies
    # 1 + s_k s_{k+1} = -i s_{k+3}) gives sigma_k = -s_k except
    # sigma_{-2} = i s_{-2}.
    sigma = {}
    sig_err = {}
    spread = 0.0
    for k in range(-2, 3):
        nums = wronskian_candidates(k - 1, k + 1)
        wd, ld, ed = wronskian_candidates(k, k + 1)[0]
        wn, ln, en = nums[0]
        s_k = (wn / wd) * np.exp(ln - ld)
        sigma[k] = 1j * s_k if k == -2 else -s_k
        sig_err[k] = abs(s_k) * (en + ed)
        # two-point gate: recompute from the runner-up wall when it is also
        # well conditioned
        if len(nums) > 1 and nums[1][2] < 1e-8:
            s_alt = (nums[1][0] / wd) * np.exp(nums[1][1] - ld)
            spread = max(spread, float(abs(s_k - s_alt)))

    # Multipliers without any well-conditioned wall (conjugate-level
    # geometries) are rebuilt from better-measured neighbours through the
    # exact quadratic relation sigma_{k+3} = i (1 + sigma_k sigma_{k+1});
    # each replacement is applied only where it improves the error estimate.
    completed = []
    for k in range(-2, 3):
        k3 = _s5(k + 3)
        prop = (
            sig_err[k] * abs(sigma[_s5(k + 1)])
            + sig_err[_s5(k + 1)] * abs(sigma[k])
            + 1e-16 * (1.0 + abs(sigma[k] * sigma[_s5(k + 1)]))
        )
        if prop < 0.2 * sig_err[k3]:
            sigma[k3] = 1j * (1.0 + sigma[k] * sigma[_s5(k + 1)])
            sig_err[k3] = prop
            completed.append(k3)
    completed = tuple(completed)

    # consistency gates: Wronskian constancy of adjacent pairs across their
    # two clean walls, and the residual spread of the completed relations
    drift = 0.0
    for k in range(-2, 3):
        vals = []
        for wk in (_s5(k - 1), _s5(k)):
            va, dva, la, qa = data[(_s5(k), wk)]
            vb, dvb, lb, qb = data[(_s5(k + 1), wk)]
            w = va * dvb - dva * vb
            if w != 0 and max(qa, qb) < 2.0:
                vals.append((w, la + lb))
        if len(vals) == 2 and vals[0][0] != 0:
            drift = max(
                drift,
                float(
                    abs(
                        1.0
                        - (vals[1][0] / vals[0][0])
                        * np.exp(vals[1][1] - vals[0][1])
                    )
                ),
            )
    resid = tuple(
        1.0 + sigma[k] * sigma[_s5(k + 1)] + 1j * sigma[_s5(k + 3)]
        for k in range(-2, 3)
    )
    return StokesMultipliers(
        sigma=sigma,
        admissibility_residuals=resid,
        two_point_spread=spread,
        wronskian_drift=drift,
        est_error=float(init_est + max(sig_err.values())),
        completed=completed,
    )


def tritronquee_test(
    s: StokesMultipliers, threshold: float = 1e-3
) -> tuple[bool, float]:
    """Whether sigma_{+-2} both vanish within the threshold; margin reported."""
    margin = max(abs(s.sigma[2]), abs(s.sigma[-2]))
    return margin <= threshold, float(margin)
