"""Stokes-line tracing, the decorated complex, and its topological class.

Stokes lines are level curves of Re S emanating from turning points (3/4/5
lines for simple/double/triple points).  Each traced line ends either at
another turning point or escapes along one of the five asymptotic rays
arg x = (2k+1) pi / 5.  The resulting decorated graph falls into one of the
seven classes 300, 310, 311, 320, 100, 110, 000 (modulo a Z5 shift of the
ray decoration); the class is recognized from the sector-connectivity
relation computed from the embedded graph, which also yields the shift and
the turning-point labels used by the quantization machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .action import (
    _FactorTracker,
    _integrate_tp_leg,
    _vanishing_set,
    _w_sqrtV,
    turning_point_action,
)
from .potential import CubicPotential, turning_points

PHI = [(2 * k + 1) * np.pi / 5 for k in range(-2, 3)]  # ray angles, k = -2..2


class ClassificationError(RuntimeError):
    """Tracing or graph assembly failed in a way that prevents classification."""


class AmbiguousClassError(ClassificationError):
    """The traced graph sits numerically on a class boundary."""

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)


@dataclass(frozen=True)
class TraceOptions:
    r_max_factor: float = 10.0
    wedge_tol: float = np.pi / 20
    trap_factor: float = 1e-4
    launch_factor: float = 1e-2
    step_tol: float = 1e-9
    max_steps: int = 60000
    anti_stokes: bool = False


@dataclass(frozen=True)
class StokesLine:
    origin: int                     # internal vertex index
    direction_index: int
    points: np.ndarray              # complex polyline
    terminal: tuple[str, int]       # ("tp", vertex) or ("ray", k in -2..2)


@dataclass(frozen=True)
class SectorRelation:
    """Boolean 5x5 matrix of the sector-connectivity relation, k = -2..2."""

    matrix: np.ndarray

    def related(self, j: int, k: int) -> bool:
        return bool(self.matrix[(j + 2) % 5, (k + 2) % 5])


@dataclass(frozen=True)
class StokesComplexGraph:
    internal_vertices: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    lines: tuple[StokesLine, ...]
    internal_edges: tuple[tuple[int, int], ...]
    external_edges: tuple[tuple[int, int], ...]   # (vertex, ray k)
    class_code: str
    decoration_shift: int
    tp_labels: dict[str, complex]
    relation: SectorRelation
    corridors: dict[tuple[int, int], tuple] = field(default_factory=dict, repr=False)

    @property
    def n_internal_edges(self) -> int:
        return len(self.internal_edges)


# canonical non-consecutive pairs failing the relation, per class (labels -2..2)
_ALL_NONCONSEC = frozenset(frozenset(((k - 2) % 5 - 2, (k) % 5 - 2)) for k in range(5))


def _pairset(pairs):
    return frozenset(frozenset(p) for p in pairs)


_CANONICAL_FAIL = {
    "300": _pairset([]),
    "310": _pairset([(0, 2), (0, -2)]),
    "311": _pairset([(1, -1)]),
    "320": _pairset([(1, -1), (1, -2), (-1, 2)]),
    "100": _pairset([(1, -1), (0, -2), (0, 2)]),
    "110": _pairset([(0, 2), (0, -2), (1, -2), (-1, 2)]),
    "000": _pairset([(0, 2), (1, -2), (2, -1), (-2, 0), (-1, 1)]),
}

# external-vertex valences for classes whose fail-set does not pin the shift
_CANONICAL_VALENCE = {
    "300": {-2: 1, -1: 2, 0: 2, 1: 1, 2: 3},
    "000": {-2: 1, -1: 1, 0: 1, 1: 1, 2: 1},
}


def _wrap(x: float) -> float:
    return (x + np.pi) % (2 * np.pi) - np.pi


def _launch_directions(
    p: CubicPotential, tp: complex, mult: int, anti: bool = False
) -> list[float]:
    """Local Stokes (or anti-Stokes) directions at a turning point.

    Near the point, S ~ sqrt(c) (x - tp)^{(mult+2)/2}; Stokes directions
    solve Re S = 0, anti-Stokes directions Im S = 0.
    """
    derivs = {1: p.d1, 2: p.d2, 3: lambda z: 24.0}
    fact = {1: 1.0, 2: 2.0, 3: 6.0}
    c = complex(derivs[mult](tp)) / fact[mult]
    gamma = 0.5 * np.angle(c)
    q = (mult + 2) / 2.0
    off = 0.0 if anti else np.pi / 2
    return [float((off + j * np.pi - gamma) / q) for j in range(mult + 2)]


def _sqrt_continue(V: complex, prev: complex) -> complex:
    w = np.sqrt(V)
    return -w if abs(w + prev) < abs(w - prev) else w


def _trace_one(p, tps, origin, theta, opts, rays):
    """Integrate one level curve of Re S from a turning point outward."""
    roots = np.array(tps.roots, dtype=complex)
    mult = tps.multiplicities[origin]
    tp = complex(roots[origin])
    scale = max(tps.scale, 1.0)
    sep = tps.separation if len(roots) > 1 else scale
    r_launch = opts.launch_factor * max(sep, 1e-3 * scale) if len(roots) > 1 else opts.launch_factor * scale
    r_trap = opts.trap_factor * max(sep, 1e-3 * scale) if len(roots) > 1 else 0.0
    R_max = opts.r_max_factor * (1.0 + tps.scale)

    z = tp + r_launch * np.exp(1j * theta)
    w = np.sqrt(p(z))
    turn = 1j if not opts.anti_stokes else 1.0
    v = turn * np.conj(w) / abs(w)
    if (v * np.exp(-1j * theta)).real < 0:
        w = -w
        v = -v

    def vel(zz, w_ref):
        ww = _sqrt_continue(p(zz), w_ref)
        return turn * np.conj(ww) / abs(ww), ww

    pts = [tp, z]
    # seed the level-set drift with the exact action from the turning point
    # to the launch point, so the projection locks onto the separatrix
    # through the turning point itself
    all_roots = np.array(tps.all_with_repeats, dtype=complex)
    vanish = _vanishing_set(all_roots, tp, scale)
    tracker = _FactorTracker(all_roots, z)
    s_launch, _ = _integrate_tp_leg(
        all_roots, vanish, tp, z, tracker, 1e-14, _w_sqrtV
    )
    w_tracked = tracker.sqrtV()
    if abs(w_tracked - w) > abs(w_tracked + w):
        s_launch = -s_launch
    # level function is Re(u * S): u = 1 for Stokes lines, -i for anti-Stokes
    u = 1.0 + 0.0j if not opts.anti_stokes else -1.0j
    drift = float((u * s_launch).real)
    h = 0.25 * r_launch
    n = 0
    while n < opts.max_steps:
        n += 1
        dists = np.abs(z - roots)
        dmin_other = min(
            (dists[i] for i in range(len(roots)) if i != origin), default=np.inf
        )
        if len(roots) > 1 and dmin_other < r_trap and abs(z - tp) > 3 * r_launch:
            j = int(np.argmin([d if i != origin else np.inf for i, d in enumerate(dists)]))
            pts.append(complex(roots[j]))
            return StokesLine(origin, -1, np.array(pts), ("tp", j))
        if abs(z) >= R_max:
            ang = float(np.angle(z))
            ray_set = rays
            devs = [abs(_wrap(ang - f)) for f in ray_set]
            k = int(np.argmin(devs))
            if devs[k] > opts.wedge_tol:
                return StokesLine(origin, -1, np.array(pts), ("unresolved", -99))
            return StokesLine(origin, -1, np.array(pts), ("ray", k - 2))
        if abs(z - tp) < 0.5 * r_launch and n > 10:
            # returned to its own turning point: numerically degenerate
            return StokesLine(origin, -1, np.array(pts), ("unresolved", -98))

        hcap = 0.2 * float(np.min(dists)) if len(roots) > 1 else 0.2 * abs(z - tp)
        hcap = max(hcap, 1e-6 * scale)
        hcap = min(max(hcap, 0.05 * r_launch), 0.1 * (1.0 + abs(z)))
        h = min(max(h, 0.05 * hcap), hcap)

        # RK4 step with continuation from the step-base branch w
        k1, _ = vel(z, w)
        k2, _ = vel(z + 0.5 * h * k1, w)
        k3, _ = vel(z + 0.5 * h * k2, w)
        k4, _ = vel(z + h * k3, w)
        z_full = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        # error estimate via two half steps
        zh = z + (h / 12.0) * (k1 + 2 * k2 + 2 * k3 + k4)  # crude midpoint predictor
        k1b, _ = vel(zh, w)
        err = abs(k1b - k1) * h  # curvature-scaled heuristic
        tol_loc = opts.step_tol * (1.0 + abs(z))
        if err > 64 * tol_loc and h > 0.06 * hcap:
            h *= 0.5
            continue
        w_new = _sqrt_continue(p(z_full), w)
        # trapezoid of d(level) = Re(u w dz) for the drift projection
        drift += (u * 0.5 * (w + w_new) * (z_full - z)).real
        z, w = z_full, w_new
        # transverse Newton projection back onto the level set; the guard is
        # relative to the distance from the nearest turning point so the
        # correction stays active during saddle approaches
        if drift != 0.0:
            dz = -drift * np.conj(u) * np.conj(w) / abs(w) ** 2
            dmin_here = float(np.min(np.abs(z - roots)))
            if abs(dz) < 0.3 * dmin_here:
                z = z + dz
                w = _sqrt_continue(p(z), w)
                drift = 0.0
        pts.append(z)
        if err < 4 * tol_loc:
            h *= 1.6
    return StokesLine(origin, -1, np.array(pts), ("unresolved", -97))


def trace_stokes_lines(
    p: CubicPotential, opts: TraceOptions | None = None
) -> list[StokesLine]:
    """Trace all Stokes lines (anti-Stokes with opts.anti_stokes=True)."""
    opts = opts or TraceOptions()
    tps = turning_points(p)
    rays = (
        PHI
        if not opts.anti_stokes
        else [f + np.pi / 5 for f in PHI]
    )
    lines: list[StokesLine] = []
    for vi, (tp, m) in enumerate(zip(tps.roots, tps.multiplicities)):
        for di, theta in enumerate(_launch_directions(p, tp, m, opts.anti_stokes)):
            ln = _trace_one(p, tps, vi, theta, opts, rays)
            lines.append(
                StokesLine(ln.origin, di, ln.points, ln.terminal)
            )
    return lines


def _assemble(lines, tps):
    """Deduplicate traced lines into internal and external edges.

    External entries carry the index of the traced line for later geometric
    lookups (corridor crossing points, SVG export).
    """
    internal: dict[frozenset, list] = {}
    external: list[tuple[int, int, np.ndarray, int]] = []
    for idx, ln in enumerate(lines):
        kind, t = ln.terminal
        if kind == "unresolved":
            raise ClassificationError(f"unresolved Stokes line from vertex {ln.origin}")
        if kind == "tp":
            if t == ln.origin:
                raise ClassificationError("Stokes line returned to its own vertex")
            internal.setdefault(frozenset((ln.origin, t)), []).append(ln)
        else:
            external.append((ln.origin, t, ln.points, idx))
    for pair, lns in internal.items():
        if len(lns) != 2:
            raise AmbiguousClassError(
                f"internal line between {sorted(pair)} traced {len(lns)} times"
            )
    # two vertices can share at most one line; a duplicate means tracing failure
    return internal, external


def _rotation_system(lines_by_edge, tps, opts):
    """Build the combinatorial embedding: CCW dart order at every vertex.

    Vertices are ('v', i) internal and ('e', k) external; boundary arcs
    between consecutive external vertices are included as edges so each face
    is a single closed walk.
    """
    internal, external = lines_by_edge
    darts = {}  # dart id -> (u, v, edge_key)
    incid = {}  # vertex -> list of (sort_angle, dart_id)
    did = 0

    def add_vertex(v):
        incid.setdefault(v, [])

    R_eval = opts.r_max_factor * (1.0 + tps.scale) * 0.92

    def add_edge(u, v, key, ang_u, ang_v):
        nonlocal did
        d1, d2 = did, did + 1
        did += 2
        darts[d1] = (u, v, key, d2)
        darts[d2] = (v, u, key, d1)
        incid[u].append((ang_u, d1))
        incid[v].append((ang_v, d2))

    for i in range(len(tps.roots)):
        add_vertex(("v", i))
    for k in range(-2, 3):
        add_vertex(("e", k))

    # internal edges: angle at each endpoint from the traced polylines
    for pair, lns in internal.items():
        i, j = sorted(pair)
        ln = next(l for l in lns if l.origin == i)
        ang_i = float(np.angle(ln.points[1] - ln.points[0]))
        ln2 = next(l for l in lns if l.origin == j)
        ang_j = float(np.angle(ln2.points[1] - ln2.points[0]))
        add_edge(("v", i), ("v", j), ("int", i, j), ang_i, ang_j)

    # external edges: at the internal vertex, the launch angle; at the
    # external vertex the CCW cycle is (arc toward k+1, lines by decreasing
    # deviation from the ray, arc toward k-1), encoded by sort key -dev with
    # the arcs at -inf / +inf
    for (vi, k, pts, idx) in external:
        ang_v = float(np.angle(pts[1] - pts[0]))
        ray = PHI[k + 2]
        zz = pts[-1]
        for q in range(len(pts) - 1, 0, -1):
            if abs(pts[q]) <= R_eval:
                zz = pts[q]
                break
        dev = _wrap(float(np.angle(zz)) - ray)
        add_edge(("v", vi), ("e", k), ("ext", idx), ang_v, -dev)

    # boundary arcs (key angle +/- inf places them around the line darts)
    for k in range(-2, 3):
        kn = k + 1 if k < 2 else -2
        add_edge(("e", k), ("e", kn), ("arc", k), -np.inf, np.inf)

    rot = {}
    for v, lst in incid.items():
        lst.sort(key=lambda t: t[0])
        rot[v] = [d for _, d in lst]
    return darts, rot


def _faces(darts, rot):
    """Face orbits of the embedding: next dart = rotation successor of twin."""
    pos = {}
    for v, lst in rot.items():
        for i, d in enumerate(lst):
            pos[d] = (v, i)
    seen = set()
    faces = []
    for d0 in darts:
        if d0 in seen:
            continue
        walk = []
        d = d0
        while d not in seen:
            seen.add(d)
            walk.append(d)
            twin = darts[d][3]
            v, i = pos[twin]
            d = rot[v][(i + 1) % len(rot[v])]
        faces.append(walk)
    return faces


def _face_info(faces, darts):
    """Identify sector faces (by their boundary arc) and boundary components."""
    info = []
    for walk in faces:
        arcs = [d for d in walk if darts[d][2][0] == "arc"]
        # boundary components: cut the cyclic walk at arcs and at external
        # vertices (points at infinity)
        comp_of = {}
        comp = 0
        n = len(walk)
        # find a cut position to start from, if any
        cuts = []
        for i in range(n):
            d_prev = walk[i - 1]
            d = walk[i]
            junction = darts[d][0]
            if darts[d_prev][2][0] == "arc" or darts[d][2][0] == "arc" or junction[0] == "e":
                cuts.append(i)
        if not cuts:
            for d in walk:
                comp_of[d] = 0
            ncomp = 1
        else:
            start = cuts[0]
            comp = -1
            for off in range(n):
                i = (start + off) % n
                if i in cuts or off == 0:
                    comp += 1
                d = walk[i]
                if darts[d][2][0] != "arc":
                    comp_of[d] = comp
            ncomp = comp + 1
        info.append({"walk": walk, "arcs": arcs, "comp_of": comp_of})
    return info


def _compute_relation(internal, external, tps, opts):
    """Sector relation and corridor walls from the embedded graph."""
    darts, rot = _rotation_system((internal, external), tps, opts)
    faces = _faces(darts, rot)
    info = _face_info(faces, darts)

    # map arc k -> sector face: the face walk containing arc dart (Ek->Ek+1)
    # on the inner side is the sector with rays phi_k, phi_{k+1}, i.e.
    # Sigma_{k+1}
    sector_face = {}
    outer = None
    for fi, rec in enumerate(info):
        arc_keys = {darts[d][2][1] for d in rec["arcs"]}
        if len(rec["arcs"]) == 5 and all(
            darts[d][2][0] == "arc" for d in rec["walk"]
        ):
            outer = fi
            continue
        for d in rec["arcs"]:
            k = darts[d][2][1]
            sec = k + 1 if k + 1 <= 2 else k + 1 - 5
            if sec in sector_face:
                raise ClassificationError("two faces claim the same sector arc")
            sector_face[sec] = fi
    if len(sector_face) != 5:
        raise ClassificationError("could not identify the five sector faces")

    face_of_dart = {}
    for fi, rec in enumerate(info):
        for d in rec["walk"]:
            face_of_dart[d] = fi

    # adjacency moves through graph-edge walls
    def wall_moves(fi, entry_comp):
        rec = info[fi]
        for d in rec["walk"]:
            kind = darts[d][2][0]
            if kind == "arc":
                continue
            if entry_comp is not None and rec["comp_of"][d] == entry_comp:
                continue
            twin = darts[d][3]
            yield darts[d][2], twin, face_of_dart[twin]

    related = np.eye(5, dtype=bool)
    corridors = {}
    from collections import deque

    for l in range(-2, 3):
        start = sector_face[l]
        # BFS over (face, entry component)
        prev = {}
        dq = deque()
        seen_states = set()
        for key, twin, nf in wall_moves(start, None):
            st = (nf, info[nf]["comp_of"].get(twin))
            if st not in seen_states:
                seen_states.add(st)
                prev[st] = (None, key)
                dq.append(st)
        reached = {}
        while dq:
            fi, comp = dq.popleft()
            # is fi a sector face?
            for k, sf in sector_face.items():
                if sf == fi and k != l and k not in reached:
                    reached[k] = (fi, comp)
            # continue only through band-type faces (sector faces have one
            # boundary component, so the move generator yields nothing new)
            for key, twin, nf in wall_moves(fi, comp):
                st = (nf, info[nf]["comp_of"].get(twin))
                if st not in seen_states:
                    seen_states.add(st)
                    prev[st] = ((fi, comp), key)
                    dq.append(st)
        for k, st in reached.items():
            related[(l + 2) % 5, (k + 2) % 5] = True
            # recover wall sequence
            walls = []
            cur = st
            while cur is not None:
                parent, key = prev[cur]
                walls.append(key)
                cur = parent
            corridors[(l, k)] = tuple(reversed(walls))
    return SectorRelation(matrix=related), corridors


def _match_class(n_simple, n_int, fail_set, ext_valence):
    """Class code and decoration shift from counts + relation fail pattern."""
    by_counts = {
        (3, 0): ["300"],
        (3, 1): ["310", "311"],
        (3, 2): ["320"],
        (1, 0): ["100"],
        (1, 1): ["110"],
        (0, 0): ["000"],
    }
    cands = by_counts.get((n_simple, n_int))
    if cands is None:
        raise AmbiguousClassError(
            f"no admissible class with {n_simple} simple points and "
            f"{n_int} internal lines"
        )
    matches = []
    for code in cands:
        canon = _CANONICAL_FAIL[code]
        for m in range(5):
            shifted = frozenset(
                frozenset(((x + m + 2) % 5 - 2) for x in pair) for pair in canon
            )
            if shifted == fail_set:
                matches.append((code, m))
    if not matches:
        raise AmbiguousClassError(
            "relation pattern matches no admissible class", candidates=cands
        )
    codes = {c for c, _ in matches}
    if len(codes) > 1:
        raise AmbiguousClassError("relation pattern is class-ambiguous", candidates=codes)
    code = codes.pop()
    shifts = sorted(m for _, m in matches)
    if len(shifts) == 1:
        return code, shifts[0]
    # symmetric fail set (300, 000): disambiguate by external valences
    pattern = _CANONICAL_VALENCE.get(code)
    if pattern is not None:
        good = []
        for m in shifts:
            if all(
                ext_valence.get((k + m + 2) % 5 - 2, 0) == v
                for k, v in pattern.items()
            ):
                good.append(m)
        if len(good) == 1:
            return code, good[0]
    return code, 0


def classify(
    p: CubicPotential, opts: TraceOptions | None = None
) -> StokesComplexGraph:
    """Trace, assemble, and classify the Stokes complex of the potential."""
    opts = opts or TraceOptions()
    last_exc = None
    for attempt, rf in enumerate((opts.r_max_factor, 3 * opts.r_max_factor)):
        o = TraceOptions(
            r_max_factor=rf,
            wedge_tol=opts.wedge_tol,
            trap_factor=opts.trap_factor,
            launch_factor=opts.launch_factor,
            step_tol=opts.step_tol,
            max_steps=opts.max_steps,
            anti_stokes=False,
        )
        try:
            return _classify_once(p, o)
        except ClassificationError as exc:
            last_exc = exc
    raise last_exc


def _classify_once(p, opts):
    tps = turning_points(p)
    lines = trace_stokes_lines(p, opts)
    internal, external = _assemble(lines, tps)

    # graph invariants
    nv = len(tps.roots)
    n_simple = sum(1 for m in tps.multiplicities if m == 1)
    n_int = len(internal)
    valency = {i: 0 for i in range(nv)}
    for pair in internal:
        for i in pair:
            valency[i] += 1
    ext_valence = {k: 0 for k in range(-2, 3)}
    for vi, k, *_ in external:
        valency[vi] += 1
        ext_valence[k] += 1
    for i, m in enumerate(tps.multiplicities):
        if valency[i] != m + 2:
            raise ClassificationError(
                f"vertex {i} multiplicity {m} has valency {valency[i]}"
            )
    if any(v == 0 for v in ext_valence.values()):
        raise AmbiguousClassError("an asymptotic ray received no Stokes line")
    # internal acyclicity: with <= 3 internal vertices a cycle needs either a
    # repeated pair (excluded by assembly) or a triangle
    if n_int >= 3:
        raise ClassificationError("internal subgraph has a cycle")

    relation, corridors = _compute_relation(internal, external, tps, opts)
    # consecutive sectors must always be related
    for k in range(-2, 3):
        kn = k + 1 if k < 2 else -2
        if not relation.related(k, kn):
            raise ClassificationError("consecutive sectors not related: tracing defect")

    fail_set = frozenset(
        frozenset((j, k))
        for j in range(-2, 3)
        for k in range(-2, 3)
        if j != k
        and abs((j - k) % 5) not in (1, 4)
        and not relation.related(j, k)
    )
    code, shift = _match_class(n_simple, n_int, fail_set, ext_valence)

    labels = _tp_labels(code, shift, tps, internal, external)
    return StokesComplexGraph(
        internal_vertices=tuple(tps.roots),
        multiplicities=tuple(tps.multiplicities),
        lines=tuple(lines),
        internal_edges=tuple(tuple(sorted(pair)) for pair in internal),
        external_edges=tuple((vi, k) for vi, k, *_ in external),
        class_code=code,
        decoration_shift=shift,
        tp_labels=labels,
        relation=relation,
        corridors=corridors,
    )


def _tp_labels(code, shift, tps, internal, external):
    """Turning-point labels tp0 / tp1 / tp-1.

    For 320 the labels are topological: tp0 carries both internal edges, tp1
    is the vertex decorated with rays {shift, shift+1}.  For the remaining
    classes the assignment is a documented convention (sorted by
    multiplicity, then real part, then imaginary part).
    """
    roots = list(tps.roots)
    if code == "320":
        deg = {i: 0 for i in range(len(roots))}
        for pair in internal:
            for i in pair:
                deg[i] += 1
        i0 = max(deg, key=lambda i: deg[i])
        if deg[i0] != 2:
            raise ClassificationError("320 graph without a double-internal vertex")
        ext_of = {i: set() for i in range(len(roots))}
        for vi, k, *_ in external:
            ext_of[vi].add(k)
        # rays of tp1 sit at canonical positions {0, 1} shifted by m
        s0 = (0 + shift + 2) % 5 - 2
        s1 = (1 + shift + 2) % 5 - 2
        rest = [i for i in range(len(roots)) if i != i0]
        tp1 = None
        for i in rest:
            if ext_of[i] == {s0, s1}:
                tp1 = i
        if tp1 is None:
            raise ClassificationError("320 decoration does not match any shift")
        tpm1 = next(i for i in rest if i != tp1)
        return {"tp0": roots[i0], "tp1": roots[tp1], "tp-1": roots[tpm1]}
    order = sorted(
        range(len(roots)),
        key=lambda i: (-tps.multiplicities[i], roots[i].real, roots[i].imag),
    )
    names = ["tp0", "tp1", "tp-1"]
    return {names[j]: roots[i] for j, i in enumerate(order)}


def canonical_relation(class_code: str, shift: int = 0) -> SectorRelation:
    """The tabulated relation for a class, with the decoration shift applied."""
    mat = np.zeros((5, 5), dtype=bool)
    for j in range(-2, 3):
        mat[(j + 2) % 5, (j + 2) % 5] = True
        for k in (j - 1, j + 1):
            mat[(j + 2) % 5, (k + 2) % 5] = True
    fail = _CANONICAL_FAIL[class_code]
    for j in range(-2, 3):
        for k in range(-2, 3):
            if j == k or abs((j - k) % 5) in (1, 4):
                continue
            pair = frozenset(((j - shift + 2) % 5 - 2, (k - shift + 2) % 5 - 2))
            mat[(j + 2) % 5, (k + 2) % 5] = pair not in fail
    return SectorRelation(matrix=mat)


def sector_relation(g: StokesComplexGraph) -> SectorRelation:
    """The sector relation of a classified graph (table row, shift applied)."""
    canon = canonical_relation(g.class_code, g.decoration_shift)
    if not np.array_equal(canon.matrix, g.relation.matrix):
        raise ClassificationError("computed relation disagrees with the class table")
    return g.relation


@dataclass(frozen=True)
class PeriodClassGuess:
    family: str                 # "300", "31x", "320", or "indeterminate"
    zero_pairs: tuple[tuple[complex, complex], ...]
    labels: dict[str, complex] | None

    def consistent_with(self, class_code: str) -> bool:
        table = {
            "300": {"300"},
            "31x": {"310", "311"},
            "320": {"320"},
            "indeterminate": {"300", "310", "311"},
        }
        return class_code in table[self.family]


def classify_by_periods(
    p: CubicPotential, zero_tol: float = 1e-7, nonzero_tol: float = 1e-4
) -> PeriodClassGuess:
    """Fast class guess from Re of the three pairwise turning-point actions.

    A quantizing-type graph has one root whose both pairwise actions are
    purely imaginary; a single vanishing pair indicates one internal line;
    none indicates the edgeless class.  For a real potential the action of
    a complex-conjugate root pair can have vanishing real part by symmetry
    alone, without the pair being connected: if that is the only vanishing
    pair the sign data cannot decide between the edgeless and one-edge
    classes and the guess is "indeterminate".  Raises AmbiguousClassError
    inside the tolerance band.
    """
    tps = turning_points(p)
    if tuple(tps.multiplicities) != (1, 1, 1):
        raise ValueError("classify_by_periods requires three simple turning points")
    r = list(tps.roots)
    scale = max(tps.scale, 1e-12)
    zero = {}
    zero_pairs = []
    for i in range(3):
        for j in range(i + 1, 3):
            v = turning_point_action(p, r[i], r[j], tol=1e-10).value
            score = abs(v.real) / max(abs(v), 1e-300)
            if score < zero_tol:
                zero[(i, j)] = True
                zero_pairs.append((r[i], r[j]))
            elif score > nonzero_tol:
                zero[(i, j)] = False
            else:
                raise AmbiguousClassError(
                    f"pair ({i},{j}) action Re-score {score:.2e} in tolerance band"
                )
    counts = {i: 0 for i in range(3)}
    for (i, j), z in zero.items():
        if z:
            counts[i] += 1
            counts[j] += 1
    common = [i for i, c in counts.items() if c >= 2]
    if common:
        i0 = common[0]
        rest = [k for k in range(3) if k != i0]
        ra, rb = r[rest[0]], r[rest[1]]
        if ra.imag < rb.imag:
            ra, rb = rb, ra
        return PeriodClassGuess(
            family="320",
            zero_pairs=tuple(zero_pairs),
            labels={"tp0": r[i0], "tp1": ra, "tp-1": rb},
        )
    if len(zero_pairs) == 1:
        if p.is_real(1e-12 * max(1.0, abs(p.a), abs(p.b))):
            za, zb = zero_pairs[0]
            if abs(za - np.conj(zb)) < 1e-8 * scale:
                return PeriodClassGuess(
                    family="indeterminate", zero_pairs=tuple(zero_pairs), labels=None
                )
        return PeriodClassGuess(family="31x", zero_pairs=tuple(zero_pairs), labels=None)
    if len(zero_pairs) == 0:
        return PeriodClassGuess(family="300", zero_pairs=(), labels=None)
    raise AmbiguousClassError("inconsistent zero-pair pattern")
