"""Fill the (n, m) quantization lattice and display the pole predictions.

Every lattice cell is an approximate pole of the tritronquee solution; the
diagonal is real, off-diagonal cells come in conjugate pairs, and every
cell satisfies the sector bound |arg a| > 4 pi / 5.
"""

import numpy as np

from cubicwkb import solve_lattice

solved, failures = solve_lattice(4, 4, tol=1e-10)

print(f"{'n':>2} {'m':>2} {'re a':>12} {'im a':>12} {'re b':>11} {'im b':>11} "
      f"{'|arg a|':>8}")
for (n, m), sol in sorted(solved.items()):
    print(
        f"{n:>2} {m:>2} {sol.a.real:>12.6f} {sol.a.imag:>12.6f} "
        f"{sol.b.real:>11.6f} {sol.b.imag:>11.6f} "
        f"{abs(np.angle(complex(sol.a))):>8.4f}"
    )
for nm, msg in failures.items():
    print(f"failed {nm}: {msg}")

bound = 4 * np.pi / 5
min_arg = min(abs(np.angle(complex(s.a))) for s in solved.values())
print(f"\nmin |arg a| = {min_arg:.4f}  (sector bound 4 pi/5 = {bound:.4f})")
conj_dev = max(
    abs(solved[(n, m)].a - np.conj(solved[(m, n)].a)) for (n, m) in solved
)
print(f"max conjugation deviation across the lattice: {conj_dev:.2e}")
