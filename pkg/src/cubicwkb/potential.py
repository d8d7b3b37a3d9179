"""Canonical cubic potentials V(x; a, b) = 4x^3 - 2ax - 28b and their moduli."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OMEGA = np.exp(2j * np.pi / 5)


class DegenerateModuliError(ValueError):
    """Raised when moduli coordinates are requested for a potential with a = 0."""


@dataclass(frozen=True)
class CubicPotential:
    """The pair (a, b) defining V(x) = 4x^3 - 2ax - 28b."""

    a: complex
    b: complex

    def __call__(self, lam: complex) -> complex:
        return 4 * lam**3 - 2 * self.a * lam - 28 * self.b

    def d1(self, lam: complex) -> complex:
        return 12 * lam**2 - 2 * self.a

    def d2(self, lam: complex) -> complex:
        return 24 * lam

    def coeffs(self) -> np.ndarray:
        return np.array([4.0, 0.0, -2 * complex(self.a), -28 * complex(self.b)])

    def is_real(self, tol: float = 0.0) -> bool:
        return abs(np.imag(self.a)) <= tol and abs(np.imag(self.b)) <= tol


@dataclass(frozen=True)
class TurningPointSet:
    """Roots of V with multiplicities; simple/double/triple by clustering."""

    roots: tuple[complex, ...]
    multiplicities: tuple[int, ...]

    @property
    def simple(self) -> tuple[complex, ...]:
        return tuple(r for r, m in zip(self.roots, self.multiplicities) if m == 1)

    @property
    def all_with_repeats(self) -> tuple[complex, ...]:
        out: list[complex] = []
        for r, m in zip(self.roots, self.multiplicities):
            out.extend([r] * m)
        return tuple(out)

    @property
    def scale(self) -> float:
        """Radius of the root set (roots sum to zero, so 0 is the centroid)."""
        return max(abs(r) for r in self.all_with_repeats)

    @property
    def separation(self) -> float:
        rs = self.roots
        if len(rs) == 1:
            return 0.0
        return min(abs(rs[i] - rs[j]) for i in range(len(rs)) for j in range(i + 1, len(rs)))


@dataclass(frozen=True)
class ModuliCoords:
    """Scale-action coordinates nu = b/a, mu = b^2/a^3."""

    nu: complex
    mu: complex


@dataclass(frozen=True)
class GroupElement:
    """Element (x, m) of R+ x Z5 acting by (a, b) -> (w^2m x^2 a, w^3m x^3 b)."""

    x: float
    m: int

    def __post_init__(self):
        if self.x <= 0:
            raise ValueError("scaling factor x must be positive")
        object.__setattr__(self, "m", self.m % 5)

    def compose(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.x * other.x, (self.m + other.m) % 5)


def turning_points(p: CubicPotential, tol: float = 1e-8) -> TurningPointSet:
    """Roots of V with multiplicity clustering at relative tolerance tol.

    The cubic always has three roots over C; clusters of roots closer than
    tol * scale are merged into one multiple turning point.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    raw = np.roots(p.coeffs())
    # one Newton polish pass; keeps residuals near machine precision
    for _ in range(2):
        d = p.d1(raw)
        step = np.where(np.abs(d) > 1e-30, p(raw) / np.where(d == 0, 1, d), 0.0)
        mask = np.abs(step) < 1e-2 * (1 + np.abs(raw))
        raw = raw - np.where(mask, step, 0.0)
    scale = max(1.0, float(np.max(np.abs(raw))))
    # union-find clustering by pairwise distance
    idx = list(range(3))

    def find(i):
        while idx[i] != i:
            idx[i] = idx[idx[i]]
            i = idx[i]
        return i

    for i in range(3):
        for j in range(i + 1, 3):
            if abs(raw[i] - raw[j]) <= tol * scale:
                idx[find(i)] = find(j)
    clusters: dict[int, list[complex]] = {}
    for i in range(3):
        clusters.setdefault(find(i), []).append(complex(raw[i]))
    roots = []
    mults = []
    for members in clusters.values():
        roots.append(sum(members) / len(members))
        mults.append(len(members))
    pairs = sorted(zip(roots, mults), key=lambda t: (-t[1], t[0].real, t[0].imag))
    roots = tuple(r for r, _ in pairs)
    mults = tuple(m for _, m in pairs)
    return TurningPointSet(roots=roots, multiplicities=mults)


def apply_group(g: GroupElement, p: CubicPotential) -> CubicPotential:
    """Rescaled potential (w^2m x^2 a, w^3m x^3 b), w = exp(2 pi i / 5)."""
    wa = OMEGA ** (2 * g.m)
    wb = OMEGA ** (3 * g.m)
    return CubicPotential(a=wa * g.x**2 * p.a, b=wb * g.x**3 * p.b)


def moduli(p: CubicPotential) -> ModuliCoords:
    """Coordinates (nu, mu) = (b/a, b^2/a^3); mu is invariant under apply_group."""
    if p.a == 0:
        raise DegenerateModuliError("moduli coordinates degenerate at a = 0")
    return ModuliCoords(nu=p.b / p.a, mu=p.b**2 / p.a**3)


def orbit_modulus(p: CubicPotential) -> complex:
    """The orbit invariant in the a^3/b^2 normalization (reciprocal of moduli().mu).

    This is the form in which the real tritronquee orbit value ~ -3158.92 is
    quoted; it is infinite for b = 0.
    """
    if p.b == 0:
        raise DegenerateModuliError("orbit modulus degenerate at b = 0")
    return p.a**3 / p.b**2
