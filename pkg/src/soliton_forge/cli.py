"""Command-line front end: reproducible scenario runs with CSV/JSON/LaTeX
emission, plus optional matplotlib figures rendered next to the delimited
output.

Exit codes: 0 success, 1 failed verification checks, 2 bad flags or config,
3 degenerate curve or trajectory collision.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import abel, diagnostics, dubrovin, elliptic, kdv_hierarchy, nls, spectral, symmetry
from .errors import CollisionError, DegenerateCurve, DomainError, SolitonForgeError

SCHEMA = "soliton-forge/1"

EXIT_CHECK_FAILED = 1
EXIT_BAD_FLAGS = 2
EXIT_DEGENERATE = 3


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    _write_atomic(path, "\n".join(lines) + "\n")


def _emit_json(obj: dict) -> None:
    print(json.dumps({"schema": SCHEMA, **obj}, indent=2, sort_keys=True))


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    env = os.environ.get("SOLITON_FORGE_THREADS")
    return max(1, int(env)) if env else 1


def _plot_backend():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


# -- kdv ----------------------------------------------------------------------


def cmd_kdv_hierarchy(args) -> int:
    n = args.n
    if not -1 <= n <= 6:
        raise ValueError("hierarchy level must lie in -1..6")
    level = kdv_hierarchy.hierarchy_level(n)
    h = kdv_hierarchy.invariant_polynomial(n)
    p = kdv_hierarchy.curve_polynomial(n)
    if args.format == "json":
        _emit_json(
            {
                "n": n,
                "F": level.F.to_json_obj(),
                "phi": level.phi.to_json_obj(),
                "H": h.to_json_obj(),
                "P": p.to_json_obj(),
            }
        )
    elif args.format == "latex":
        print(f"F_{{{n}}} = {level.F.to_latex()}")
        print(f"\\phi_{{{n}}} = {level.phi.to_latex()}")
        print(f"H_{{{n}}} = {h.to_latex()}")
        print(f"P_{{{n}}} = {p.to_latex()}")
    else:
        print(f"F_{n} = {level.F.to_text()}")
        print(f"phi_{n} = {level.phi.to_text()}")
        print(f"H_{n} = {h.to_text()}")
        print(f"P_{n} = {p.to_text()}")
    return 0


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _profile_jets(args):
    """Cnoidal or sech q-jet factory from flags; returns (jet_fn, label, period)."""
    if args.cnoidal:
        f1, f2, f3 = _parse_floats(args.cnoidal)
        params = elliptic.CnoidalParams(f1, f2, f3, x0=args.x0)
        per = elliptic.period(params)
        return (
            lambda x: elliptic.kdv_field(elliptic.cnoidal_profile(params, x)),
            f"cnoidal({f1},{f2},{f3})",
            per,
        )
    if args.sech is not None:
        c = args.sech
        return (
            lambda x: elliptic.sech_soliton(c, args.x0, x),
            f"sech(c={c})",
            None,
        )
    return None


def _scenario_curve(args):
    """Build (curve, start, label, jet_fn) from flags/config."""
    prof = _profile_jets(args)
    if prof is not None:
        jet_fn, label, _ = prof
        x0 = args.x_range[0]
        curve = spectral.curve_from_profile(args.genus, jet_fn(x0))
        start = spectral.aux_spectrum(args.genus, jet_fn(x0))
        return curve, start, label, jet_fn
    if not args.branch_points:
        raise ValueError("need --cnoidal, --sech or --branch-points")
    pts = _parse_floats(args.branch_points)
    curve = spectral.SpectralCurveNumeric.from_branch_points(pts)
    if args.start:
        vals = _parse_floats(args.start)
        start = [spectral.AuxiliaryPoint(v, 1) for v in vals]
    else:
        start = [
            spectral.AuxiliaryPoint(0.5 * (a + b), 1) for a, b in curve.gaps()
        ]
    return curve, start, f"branch{tuple(pts)}", None


def cmd_kdv_curve(args) -> int:
    prof = _profile_jets(args)
    out = Path(args.out)
    if prof is None:
        pts = _parse_floats(args.branch_points)
        curve = spectral.SpectralCurveNumeric.from_branch_points(pts)
        _emit_json({"curve": curve.to_json_obj()})
        return 0
    jet_fn, label, _ = prof
    a, b, count = args.grid
    xs = np.linspace(a, b, int(count))
    rows = []
    curve = None
    for x in xs:
        curve = spectral.curve_from_profile(args.genus, jet_fn(x))
        rows.append([x, *curve.coeffs])
    header = ["x"] + [f"c{k}" for k in range(2 * args.genus + 2)]
    _write_csv(out / "curve_coefficients.csv", header, rows)
    _emit_json({"profile": label, "curve": curve.to_json_obj(),
                "csv": str(out / "curve_coefficients.csv")})
    return 0


def cmd_kdv_flow(args) -> int:
    curve, start, label, jet_fn = _scenario_curve(args)
    x0, x1 = args.x_range
    traj = dubrovin.x_flow(
        curve, start, (x0, x1), tol=args.tol, samples=args.samples,
        max_step=args.max_step,
    )
    field = dubrovin.reconstruct_q(traj)
    series = abel.accumulate_along(traj)
    out = Path(args.out)
    n = curve.n

    header = ["x"] + [f"lam{k+1}" for k in range(n)] + [f"s{k+1}" for k in range(n)] + ["q"]
    rows = [
        [traj.xs[i], *traj.lambdas[i], *traj.signs[i], field.q[i]]
        for i in range(len(traj.xs))
    ]
    _write_csv(out / "trajectory.csv", header, rows)
    _write_csv(
        out / "abel.csv",
        ["x"] + [f"A{mu}" for mu in range(1, n + 1)],
        [[series.xs[i], *series.values[i]] for i in range(len(series.xs))],
    )

    gaps = curve.gaps()
    confined = all(
        gaps[k][0] - 1e-9 <= traj.lambdas[:, k].min()
        and traj.lambdas[:, k].max() <= gaps[k][1] + 1e-9
        for k in range(n)
    )
    slope = series.slope(n)
    drifts = {mu: series.drift(mu) for mu in range(1, n)}
    summary = {
        "scenario": label,
        "curve": curve.to_json_obj(),
        "gap_confinement": bool(confined),
        "branch_touches": len(traj.branch_touches),
        "abel_slope": slope,
        "abel_drift": drifts,
        "outputs": [str(out / "trajectory.csv"), str(out / "abel.csv")],
    }
    if jet_fn is not None:
        exact = np.array([jet_fn(x)[0] for x in traj.xs])
        summary["reconstruction_sup_error"] = float(np.max(np.abs(field.q - exact)))
        coeff_rows = np.array(
            [spectral.curve_from_profile(n, jet_fn(x)).coeffs for x in traj.xs[:: max(1, len(traj.xs) // 50)]]
        )
        summary["curve_coefficient_drift"] = float(
            np.max(coeff_rows.max(axis=0) - coeff_rows.min(axis=0))
        )
    if args.plot:
        plt = _plot_backend()
        fig, axes = plt.subplots(3, 1, figsize=(8, 9), sharex=True)
        for k in range(n):
            axes[0].plot(traj.xs, traj.lambdas[:, k], label=f"lam{k+1}")
        for e in curve.branch_points:
            axes[0].axhline(e, color="gray", lw=0.5, ls=":")
        axes[0].set_ylabel("auxiliary spectrum")
        axes[0].legend(loc="best")
        axes[1].plot(traj.xs, field.q, color="C3")
        axes[1].set_ylabel("q")
        for mu in range(1, n + 1):
            axes[2].plot(series.xs, series.values[:, mu - 1], label=f"A{mu}")
        axes[2].set_ylabel("accumulated components")
        axes[2].set_xlabel("x")
        axes[2].legend(loc="best")
        fig.tight_layout()
        fig.savefig(out / "flow.png", dpi=140)
        plt.close(fig)
        summary["figure"] = str(out / "flow.png")

    print(f"abel_slope={slope:.6f}")
    for mu, d in drifts.items():
        print(f"mu={mu} drift={d:.3e}")
    print(f"gap_confinement={'ok' if confined else 'VIOLATED'}")
    if "reconstruction_sup_error" in summary:
        print(f"reconstruction_sup_error={summary['reconstruction_sup_error']:.3e}")
        print(f"curve_coefficient_drift={summary['curve_coefficient_drift']:.3e}")
    _write_atomic(out / "summary.json", json.dumps({"schema": SCHEMA, **summary}, indent=2, sort_keys=True))
    return 0


def cmd_kdv_evolve(args) -> int:
    f1, f2, f3 = _parse_floats(args.cnoidal)
    params = elliptic.CnoidalParams(f1, f2, f3, x0=args.x0)
    per = elliptic.period(params)
    xs = np.linspace(0.0, per, args.grid_n, endpoint=False)
    q0 = np.array([-elliptic.cnoidal_profile(params, x)[0] for x in xs])
    lams = (-0.5 * q0)[:, None]
    curve = spectral.curve_from_profile(1, elliptic.kdv_field(elliptic.cnoidal_profile(params, 0.1 * per)))
    field = dubrovin.FieldGrid(xs=xs, q=q0, lambdas=lams, curve=curve, periodic=True)
    evolved = dubrovin.t_flow(field, (0.0, args.t_end), cfl=args.cfl, stored_levels=args.levels)

    out = Path(args.out)
    rows = []
    for level in evolved.levels:
        rows.extend([level.t, x, qv] for x, qv in zip(xs, level.q))
    _write_csv(out / "evolution.csv", ["t", "x", "q"], rows)

    dx = float(xs[1] - xs[0])
    q_stack = np.array([lv.q for lv in evolved.levels])
    dt = evolved.levels[1].t - evolved.levels[0].t if len(evolved.levels) > 1 else args.t_end
    residual = diagnostics.kdv_residual(q_stack, dx, dt, periodic=True)
    drift0 = diagnostics.curve_coefficient_drift(evolved.levels[0].q, dx, 1, periodic=True)
    drift1 = diagnostics.curve_coefficient_drift(evolved.levels[-1].q, dx, 1, periodic=True)
    summary = {
        "period": per,
        "grid_n": args.grid_n,
        "t_end": args.t_end,
        "cfl": args.cfl,
        "kdv_residual_sup": residual,
        "curve_drift_initial": drift0,
        "curve_drift_final": drift1,
        "outputs": [str(out / "evolution.csv")],
    }
    print(f"kdv_residual_sup={residual:.3e}")
    print(f"curve_coefficient_drift={max(drift0, drift1):.3e}")
    _write_atomic(out / "summary.json", json.dumps({"schema": SCHEMA, **summary}, indent=2, sort_keys=True))

    if args.plot:
        plt = _plot_backend()
        fig, ax = plt.subplots(figsize=(8, 4))
        for lv in evolved.levels[:: max(1, len(evolved.levels) // 6)]:
            ax.plot(xs, lv.q, label=f"t={lv.t:.3f}")
        ax.set_xlabel("x")
        ax.set_ylabel("q")
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
        fig.savefig(out / "evolve.png", dpi=140)
        plt.close(fig)
    return 0


# -- nls ----------------------------------------------------------------------


def cmd_nls_hierarchy(args) -> int:
    phi = nls.basic_soliton(args.n)
    if args.format == "json":
        _emit_json({"n": args.n, "phi": phi.to_json_obj(),
                    "coefficients": [nls.recursion_coefficient(j).to_json_obj() for j in range(args.n + 1)]})
    elif args.format == "latex":
        print(f"\\phi_{{{args.n}}} = {phi.to_latex()}")
    else:
        print(f"phi_{args.n} = {phi.to_text()}")
        for j in range(args.n + 1):
            print(f"A_{j} = {nls.recursion_coefficient(j).to_text()}")
    return 0


def cmd_nls_conditions(args) -> int:
    r_a, r_b = nls.condition_residuals(args.n)
    if args.format == "json":
        _emit_json({"n": args.n, "condition_A": r_a.to_json_obj(), "condition_B": r_b.to_json_obj()})
    elif args.format == "latex":
        print(f"A: {r_a.to_latex()} = 0")
        print(f"B: {r_b.to_latex()} = 0")
    else:
        print(f"condition_A[{args.n}]: {r_a.to_text()} = 0")
        print(f"condition_B[{args.n}]: {r_b.to_text()} = 0")
    return 0


def cmd_nls_check(args) -> int:
    a, b, count = args.window
    xs = np.linspace(a, b, int(count))
    checks = {}
    failed = False

    if args.profile == "plane":
        prof = nls.plane_wave(complex(args.amplitude), args.k, sigma=args.sigma)
        rep = nls.closure_check(prof, xs, degrees=list(range(args.max_degree + 1)))
        checks["closure_max_residual"] = rep.max_residual()
        failed |= rep.max_residual() > 1e-12
    elif args.profile == "sech":
        prof = nls.sech_profile(args.a, sigma=1)
        omega = 0.5 * args.a**2
        cur = nls.stationary_curve_check(prof, omega, xs)
        checks["curve_drift"] = cur.drift
        checks["curve_constants"] = [repr(cur.c1), repr(cur.c2)]
        failed |= cur.drift > 1e-8
        tf = nls.third_flow_check(prof, xs)
        checks["third_flow_mismatch"] = tf.mismatch
        failed |= tf.mismatch > 1e-8
    else:
        prof = nls.polynomial_wave(sigma=args.sigma)
    rep = nls.log_derivative_identity_check(prof, xs)
    checks["log_derivative_max_error"] = rep.max_error()
    failed |= rep.max_error() > 1e-10

    _emit_json({"profile": prof.label, "checks": checks, "failures": int(failed)})
    return EXIT_CHECK_FAILED if failed else 0


# -- identity / elliptic --------------------------------------------------------


def _identity_trial(rng_seed: int, size: int) -> int:
    rng = random.Random(rng_seed)
    while True:
        entries = [
            Fraction(rng.randint(-50, 50), rng.randint(1, 12)) for _ in range(size)
        ]
        if len(set(entries)) == size:
            break
    xs = symmetry.RationalVector(entries)
    n = size - 1
    failures = 0
    for mu in range(n + 1):
        want = Fraction(1) if mu == n else Fraction(0)
        if symmetry.symmetric_sum(xs, mu) != want:
            failures += 1
        if symmetry.symmetric_sum_via_quotient(xs, mu) != want:
            failures += 1
    return failures


def cmd_identity(args) -> int:
    rng = random.Random(args.seed)
    sizes = [rng.randint(2, args.size) for _ in range(args.trials)]
    seeds = [rng.randrange(2**62) for _ in range(args.trials)]
    workers = _threads(args)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            failures = sum(pool.map(_identity_trial, seeds, sizes))
    else:
        failures = sum(_identity_trial(s, z) for s, z in zip(seeds, sizes))
    _emit_json(
        {
            "trials": args.trials,
            "max_size": args.size,
            "seed": args.seed,
            "failures": failures,
        }
    )
    return EXIT_CHECK_FAILED if failures else 0


def cmd_elliptic_k(args) -> int:
    print(_fmt(elliptic.complete_K(args.m)))
    return 0


def cmd_elliptic_cn(args) -> int:
    print(_fmt(elliptic.jacobi_cn(args.u, args.m)))
    return 0


def cmd_elliptic_profile(args) -> int:
    f1, f2, f3 = _parse_floats(args.cnoidal)
    params = elliptic.CnoidalParams(f1, f2, f3, x0=args.x0)
    a, b, count = args.grid
    xs = np.linspace(a, b, int(count))
    rows = []
    for x in xs:
        jet = elliptic.cnoidal_profile(params, x)
        rows.append([x, *jet.values])
    out = Path(args.out)
    _write_csv(out / "profile.csv", ["x", "u", "u1", "u2", "u3", "u4"], rows)
    print(f"period={_fmt(elliptic.period(params))}")
    print(f"modulus={_fmt(params.m)}")
    if args.plot:
        plt = _plot_backend()
        data = np.array(rows)
        fig, ax = plt.subplots(figsize=(8, 3.2))
        ax.plot(data[:, 0], data[:, 1], label="u")
        ax.plot(data[:, 0], data[:, 2], label="u'", lw=0.8)
        ax.set_xlabel("x")
        ax.legend(loc="best")
        fig.tight_layout()
        fig.savefig(out / "profile.png", dpi=140)
        plt.close(fig)
    return 0


# -- parser ---------------------------------------------------------------------


def _range_triple(text: str) -> tuple[float, float, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected a,b,count")
    return float(parts[0]), float(parts[1]), int(parts[2])


def _pair(text: str) -> tuple[float, float]:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected a,b")
    return parts[0], parts[1]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    for flag, kwargs in (
        ("--config", {"type": Path, "help": "JSON file with default flag values"}),
        ("--seed", {"type": int, "help": "seed for randomized suites"}),
        ("--out", {"help": "output directory for files"}),
        ("--threads", {"type": int, "help": "worker threads (overrides env)"}),
    ):
        common.add_argument(flag, default=argparse.SUPPRESS, **kwargs)

    parser = argparse.ArgumentParser(
        prog="soliton-forge",
        parents=[common],
        description="Exact hierarchy recursions, spectral curves and "
        "auxiliary-spectrum flows for integrable wave equations.",
        epilog="exit codes: 0 ok; 1 failed verification checks; "
        "2 bad flags/config; 3 degenerate curve or trajectory collision. "
        "Environment: SOLITON_FORGE_THREADS sets the worker fan-out.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    kdv = sub.add_parser("kdv", help="KdV-side commands")
    kdv_sub = kdv.add_subparsers(dest="subcommand", required=True)

    p = kdv_sub.add_parser("hierarchy", parents=[common], help="print one hierarchy level")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=("text", "latex", "json"), default="text")
    p.set_defaults(func=cmd_kdv_hierarchy)

    def add_scenario_flags(p, with_start=True):
        p.add_argument("--cnoidal", help="f1,f2,f3 roots of the travelling cubic")
        p.add_argument("--sech", type=float, help="sech soliton speed c")
        p.add_argument("--x0", type=float, default=0.0)
        p.add_argument("--branch-points", help="e1,e2,... curve branch points")
        p.add_argument("--genus", type=int, default=1)
        if with_start:
            p.add_argument("--start", help="lam1,lam2,... start points (default: gap midpoints)")

    p = kdv_sub.add_parser("curve", parents=[common], help="spectral curve from a profile or branch points")
    add_scenario_flags(p, with_start=False)
    p.add_argument("--grid", type=_range_triple, default=(0.0, 5.0, 50), help="a,b,count sample window")
    p.set_defaults(func=cmd_kdv_curve)

    p = kdv_sub.add_parser("flow", parents=[common], help="integrate the auxiliary-spectrum flow")
    add_scenario_flags(p)
    p.add_argument("--x-range", type=_pair, default=(0.0, 5.0))
    p.add_argument("--samples", type=int, default=801)
    p.add_argument("--tol", type=float, default=1e-11)
    p.add_argument("--max-step", type=float, default=None)
    p.add_argument("--plot", action="store_true", help="render PNG figures next to the CSVs")
    p.set_defaults(func=cmd_kdv_flow)

    p = kdv_sub.add_parser("evolve", parents=[common], help="advective time flow on a periodic profile")
    p.add_argument("--cnoidal", default="1,0,-1")
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--grid-n", type=int, default=2048)
    p.add_argument("--t-end", type=float, default=0.1)
    p.add_argument("--cfl", type=float, default=0.5)
    p.add_argument("--levels", type=int, default=33)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_kdv_evolve)

    nls_p = sub.add_parser("nls", help="Schrödinger-side commands")
    nls_sub = nls_p.add_subparsers(dest="subcommand", required=True)

    p = nls_sub.add_parser("hierarchy", parents=[common], help="print the degree-n spectral polynomial")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=("text", "latex", "json"), default="text")
    p.set_defaults(func=cmd_nls_hierarchy)

    p = nls_sub.add_parser("conditions", parents=[common], help="print the two closure residuals")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=("text", "latex", "json"), default="text")
    p.set_defaults(func=cmd_nls_conditions)

    p = nls_sub.add_parser("check", parents=[common], help="numeric checks on an analytic profile")
    p.add_argument("--profile", choices=("plane", "sech", "polyexp"), required=True)
    p.add_argument("--amplitude", type=complex, default=1.0 + 0j)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--sigma", type=int, choices=(-1, 1), default=1)
    p.add_argument("--max-degree", type=int, default=4)
    p.add_argument("--window", type=_range_triple, default=(-1.5, 1.5, 40))
    p.set_defaults(func=cmd_nls_check)

    p = sub.add_parser("identity", parents=[common], help="exact fuzz of the rational symmetric identity")
    p.add_argument("--size", type=int, default=8, help="largest vector size")
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(func=cmd_identity)

    ell = sub.add_parser("elliptic", help="elliptic reference functions")
    ell_sub = ell.add_subparsers(dest="subcommand", required=True)

    p = ell_sub.add_parser("K", parents=[common], help="complete elliptic integral")
    p.add_argument("--m", type=float, required=True)
    p.set_defaults(func=cmd_elliptic_k)

    p = ell_sub.add_parser("cn", parents=[common], help="Jacobi cn value")
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--m", type=float, required=True)
    p.set_defaults(func=cmd_elliptic_cn)

    p = ell_sub.add_parser("profile", parents=[common], help="sampled cnoidal profile to CSV")
    p.add_argument("--cnoidal", default="1,0,-1")
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--grid", type=_range_triple, default=(0.0, 8.0, 400))
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_elliptic_profile)

    return parser


def _flatten_config(loaded: dict) -> dict:
    """Accept both flat flag keys and the nested scenario form.

    Nested: ``{"curve": {"branch_points": [...]}}`` or
    ``{"profile": {"kind": "cnoidal", "f1": .., "f2": .., "f3": .., "x0": ..}}``
    plus ``{"start": [{"lam": .., "sign": ..}, ...]}``.
    """
    flat = dict(loaded)
    curve = flat.pop("curve", None)
    if isinstance(curve, dict) and "branch_points" in curve:
        flat["branch_points"] = curve["branch_points"]
    profile = flat.pop("profile", None)
    if isinstance(profile, dict):
        kind = profile.get("kind", "cnoidal")
        if kind == "cnoidal":
            flat["cnoidal"] = [profile["f1"], profile["f2"], profile["f3"]]
        elif kind == "sech":
            flat["sech"] = profile["c"]
        if "x0" in profile:
            flat["x0"] = profile["x0"]
    start = flat.get("start")
    if isinstance(start, list) and start and isinstance(start[0], dict):
        flat["start"] = [pt["lam"] for pt in start]
    return flat


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Read --config JSON (if present) and translate it into leading defaults."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        path = Path(argv[idx + 1])
        loaded = json.loads(path.read_text())
    except (IndexError, OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config: {exc}")
    flags: list[str] = []
    for key, value in _flatten_config(loaded).items():
        if key == "schema":
            continue
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                flags.append(flag)
        elif isinstance(value, list):
            flags.extend([f"{flag}=" + ",".join(str(v) for v in value)])
        else:
            flags.extend([f"{flag}={value}"])
    # config-provided values go right after the subcommand words so that
    # explicit command-line flags still win
    head = argv[:idx] + argv[idx + 2 :]
    insert_at = 0
    for i, token in enumerate(head):
        if token.startswith("-"):
            break
        insert_at = i + 1
    return head[:insert_at] + flags + head[insert_at:]


_GLOBAL_DEFAULTS = {"seed": 1234, "out": "out", "threads": None, "config": None}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = _apply_config(parser, argv)
    args = parser.parse_args(argv)
    for key, value in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    try:
        return args.func(args)
    except (DegenerateCurve, CollisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_FLAGS
    except SolitonForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
