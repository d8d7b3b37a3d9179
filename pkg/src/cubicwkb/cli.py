"""Batch front-end: classify, solve lattices, run the monodromy oracle.

Exit codes: 0 success, 1 usage error, 2 ambiguity / partial results,
3 numerical failure.  All numeric output uses decimal points; JSON and CSV
carry full machine precision, the human-readable tables four significant
digits.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .bsb import (
    BsbIndex,
    SolverError,
    real_orbit_constants,
    real_poles,
    solve_bsb,
    solve_lattice,
)
from .export import graph_to_json, graph_to_svg
from .monodromy import MonodromyError, stokes_multipliers, tritronquee_test
from .potential import CubicPotential
from .stokes import (
    AmbiguousClassError,
    ClassificationError,
    TraceOptions,
    classify,
    trace_stokes_lines,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_AMBIGUOUS = 2
EXIT_NUMERICAL = 3

# embedded reference values for the comparison table: independently computed
# pole positions of the tritronquee solution (external ground truth)
REFERENCE_NUMERIC = {"a1": -2.38, "b1": -0.062, "mu1": -3510.0, "a2": -5.66}


def _parse_complex(s: str) -> complex:
    try:
        return complex(s.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse complex number: {s!r}") from exc


def _load_config(path: str | None) -> dict:
    """Simple key=value config file; values parsed as int/float/str."""
    if not path:
        return {}
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, val = (t.strip() for t in line.split("=", 1))
            for cast in (int, float):
                try:
                    out[key] = cast(val)
                    break
                except ValueError:
                    continue
            else:
                out[key] = val
    return out


def cmd_classify(args) -> int:
    p = CubicPotential(args.a, args.b)
    opts = TraceOptions(r_max_factor=args.rmax_factor)
    try:
        g = classify(p, opts)
    except AmbiguousClassError as exc:
        print(f"ambiguous: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except ClassificationError as exc:
        print(f"classification failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    payload = graph_to_json(g)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        print(payload)
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(graph_to_svg(g, compactified=args.disk))
    return EXIT_OK


def cmd_trace(args) -> int:
    p = CubicPotential(args.a, args.b)
    opts = TraceOptions(anti_stokes=args.anti)
    try:
        lines = trace_stokes_lines(p, opts)
    except ClassificationError as exc:
        print(f"tracing failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    out = [
        {
            "origin": ln.origin,
            "direction": ln.direction_index,
            "terminal": list(ln.terminal),
            "polyline": [[z.real, z.imag] for z in ln.points],
        }
        for ln in lines
    ]
    text = json.dumps(out)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text)
    return EXIT_OK


def cmd_poles(args) -> int:
    solved, failures = solve_lattice(
        args.nmax, args.mmax, tol=args.tol, check_class=not args.fast
    )
    rows = []
    for (n, m), sol in sorted(solved.items()):
        rows.append(
            [n, m, sol.a.real, sol.a.imag, sol.b.real, sol.b.imag,
             sol.residual_norm, sol.rho_max]
        )
    out = sys.stdout if not args.out else open(args.out, "w", newline="", encoding="utf-8")
    try:
        writer = csv.writer(out)
        writer.writerow(["n", "m", "re_a", "im_a", "re_b", "im_b", "residual", "rho_max"])
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    finally:
        if args.out:
            out.close()
    min_arg = min(abs(np.angle(complex(s.a))) for s in solved.values()) if solved else np.nan
    print(f"min |arg a| over lattice: {min_arg:.6f} (4*pi/5 = {4*np.pi/5:.6f})",
          file=sys.stderr)
    for nm, msg in failures.items():
        print(f"cell {nm} failed: {msg}", file=sys.stderr)
    if failures:
        return EXIT_AMBIGUOUS
    return EXIT_OK


def cmd_verify(args) -> int:
    p = CubicPotential(args.a, args.b)
    try:
        s = stokes_multipliers(p, R=args.radius)
    except (MonodromyError, ClassificationError) as exc:
        print(f"monodromy failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    passed, margin = tritronquee_test(s, threshold=args.threshold)
    report = {
        "sigma": {str(k): [s.sigma[k].real, s.sigma[k].imag] for k in range(-2, 3)},
        "admissibility_residuals": [
            [r.real, r.imag] for r in s.admissibility_residuals
        ],
        "normalized_residuals": list(s.normalized_residuals),
        "tritronquee_margin": margin,
        "tritronquee": bool(passed),
        "completed": list(s.completed),
    }
    text = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text)
    return EXIT_OK


def cmd_constants(args) -> int:
    mu, a_s, b_s = real_orbit_constants()
    print(f"mu_star = {mu:.10g}")
    print(f"a_star  = {a_s:.10g}")
    print(f"b_star  = {b_s:.10g}")
    return EXIT_OK


def _fmt4(x: float) -> str:
    return f"{x:.4g}"


def cmd_table2(args) -> int:
    """Comparison of the quantization predictions with reference pole data."""
    pairs = real_poles(2)
    (a1, b1), (a2, b2) = pairs
    try:
        s1 = solve_bsb(BsbIndex(1, 1), CubicPotential(a1, b1), check_class=False)
        s2 = solve_bsb(BsbIndex(2, 2), CubicPotential(a2, b2), check_class=False)
    except SolverError as exc:
        print(f"polish failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    a1, b1 = s1.a.real, s1.b.real
    a2, b2 = s2.a.real, s2.b.real
    mu1 = a1**3 / b1**2
    mu2 = a2**3 / b2**2
    ref = REFERENCE_NUMERIC
    rows = [
        ("a1", a1, ref["a1"]),
        ("b1", b1, ref["b1"]),
        ("mu1", mu1, ref["mu1"]),
        ("a2", a2, ref["a2"]),
        ("b2", b2, None),
        ("mu2", mu2, None),
    ]
    print(f"{'':>5} {'computed':>12} {'reference':>12} {'error %':>9}")
    for name, wkb, num in rows:
        if num is None:
            print(f"{name:>5} {_fmt4(wkb):>12} {'unknown':>12} {'unknown':>9}")
        else:
            err = 100.0 * abs(wkb - num) / abs(num)
            print(f"{name:>5} {_fmt4(wkb):>12} {_fmt4(num):>12} {_fmt4(err):>9}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cubicwkb",
        description="WKB analysis of cubic oscillators and the pole lattice "
        "of the Painleve-I tritronquee solution",
    )
    ap.add_argument("--config", help="key=value config file; flags override it")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify the Stokes complex of one potential")
    c.add_argument("--a", type=_parse_complex, required=True)
    c.add_argument("--b", type=_parse_complex, required=True)
    c.add_argument("--json", help="write graph JSON here (default stdout)")
    c.add_argument("--svg", help="write an SVG drawing here")
    c.add_argument("--disk", action="store_true", help="compactified disk view")
    c.add_argument("--rmax-factor", type=float, default=10.0, dest="rmax_factor")
    c.set_defaults(func=cmd_classify)

    t = sub.add_parser("trace", help="dump raw Stokes polylines as JSON")
    t.add_argument("--a", type=_parse_complex, required=True)
    t.add_argument("--b", type=_parse_complex, required=True)
    t.add_argument("--anti", action="store_true", help="trace anti-Stokes lines")
    t.add_argument("--out")
    t.set_defaults(func=cmd_trace)

    o = sub.add_parser("poles", help="solve the quantization lattice, emit CSV")
    o.add_argument("--nmax", type=int, default=5)
    o.add_argument("--mmax", type=int, default=5)
    o.add_argument("--tol", type=float, default=1e-10)
    o.add_argument("--out", help="CSV path (default stdout)")
    o.add_argument("--fast", action="store_true",
                   help="skip the per-cell re-classification and rho estimate")
    o.set_defaults(func=cmd_poles)

    v = sub.add_parser("verify", help="direct monodromy report for one potential")
    v.add_argument("--a", type=_parse_complex, required=True)
    v.add_argument("--b", type=_parse_complex, required=True)
    v.add_argument("--radius", type=float, default=None)
    v.add_argument("--threshold", type=float, default=1e-3)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("constants", help="print the real-orbit constants")
    k.set_defaults(func=cmd_constants)

    tb = sub.add_parser("table2", help="comparison table against reference poles")
    tb.set_defaults(func=cmd_table2)
    return ap


# defaults of config-overridable options (per subcommand destinations)
_OVERRIDABLE_DEFAULTS = {
    "nmax": 5,
    "mmax": 5,
    "tol": 1e-10,
    "rmax_factor": 10.0,
    "radius": None,
    "threshold": 1e-3,
}


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    cfg = _load_config(getattr(args, "config", None))
    for key, val in cfg.items():
        attr = key.replace("-", "_")
        default = _OVERRIDABLE_DEFAULTS.get(attr)
        # a flag given explicitly on the command line wins over the config
        if hasattr(args, attr) and getattr(args, attr) == default:
            setattr(args, attr, val)
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
