"""Command-line entry point: ``choreo8 <command> [options]``.

Exit codes: 0 success, 2 validation failure (bad input, failed --check),
3 numeric failure (integration or analysis breakdown).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import platform
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy

from choreo8 import __version__, analysis, compare, curves, fitting, kernels
from choreo8.dynamics import (
    BodyState,
    ConstraintError,
    SingularityError,
    canonical_initial_state,
    denormalize,
    energies,
    first_integrals,
    load_unit_system,
    published_initial_state,
)
from choreo8.integrator import (
    STATE_COLUMNS,
    TWO_PI,
    IntegrationError,
    energy_drift,
    integrate,
    reference_initial_state,
    verify_periodicity,
)
from choreo8.io import to_json_text, write_csv, write_json, write_text

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
DEFAULT_TOL = 1e-12
CLOSURE_LIMIT = 1e-5


class ValidationFailure(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    parameters: dict
    tolerance: float | None
    outputs: list = field(default_factory=list)
    versions: dict = field(default_factory=dict)
    wall_time_s: float = 0.0

    def add(self, path) -> Path:
        self.outputs.append(str(path))
        return Path(path)


def _versions() -> dict:
    return {
        "choreo8": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
        "kernel_backend": kernels.BACKEND,
    }


def _default_tol() -> float:
    env = os.environ.get("CHOREO8_TOL")
    if env is None:
        return DEFAULT_TOL
    try:
        return float(env)
    except ValueError:
        raise ValidationFailure(f"CHOREO8_TOL={env!r} is not a number") from None


def _load_state(path) -> BodyState:
    """State file: JSON with ``r`` and ``v`` (3x2 lists) and optional ``tau``."""
    try:
        data = json.loads(Path(path).read_text())
        return BodyState(float(data.get("tau", 0.0)), data["r"], data["v"])
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise ValidationFailure(f"cannot read state file {path}: {exc}") from None


def _initial_state(args) -> BodyState:
    if getattr(args, "state", None):
        return _load_state(args.state)
    initial = getattr(args, "initial", "canonical")
    if initial == "published":
        return published_initial_state()
    if initial == "reference":
        return reference_initial_state()
    return canonical_initial_state()


def _full_period(args, tol) -> "analysis.Trajectory":
    s0 = _initial_state(args)
    return integrate(s0, s0.tau + TWO_PI, tol=tol)


def _out_paths(out: str, stem: str, fmt: str):
    base = Path(out)
    if base.suffix:
        return base, base.with_suffix("")
    base.mkdir(parents=True, exist_ok=True)
    return base / f"{stem}.{fmt}", base / stem


def _sibling(prefix: Path, suffix: str) -> Path:
    return prefix.with_name(prefix.name + suffix)


def _write_table(path: Path, fmt: str, header, rows):
    if fmt == "csv":
        write_csv(path, header, rows)
    else:
        write_json(path, [dict(zip(header, row)) for row in rows])


def _si_block(config_path, quantities: dict) -> dict | None:
    if not config_path:
        return None
    units = load_unit_system(config_path)
    out = {"R_m": units.R, "m_total_kg": units.m_total, "G": units.G, "period_s": units.period_s,
           "period_days": units.period_s / 86400.0}
    for name, (kind, value) in quantities.items():
        out[name] = denormalize(units, kind, value)
    return out


def cmd_simulate(args, manifest: RunManifest) -> int:
    s0 = _initial_state(args)
    tau_end = s0.tau + math.radians(args.tau_end_deg)
    traj = integrate(s0, tau_end, tol=args.tol)
    main, prefix = _out_paths(args.out, "trajectory", args.format)
    taus = traj.grid(args.grid_step_deg)
    taus[-1] = min(taus[-1], traj.tau_end)
    ys = traj.flat(taus).reshape(-1, 12)
    _write_table(manifest.add(main), args.format, ("tau",) + STATE_COLUMNS,
                 np.column_stack([np.degrees(taus), ys]))
    per = verify_periodicity(traj)
    node_dev = max(first_integrals(s).max_deviation() for s in traj.node_states())
    e0 = energies(s0)
    report = {
        "tol": args.tol,
        "tau_end_deg": args.tau_end_deg,
        "nodes": len(traj),
        "closure_r": per.closure_r,
        "closure_v": per.closure_v,
        "closure": per.closure,
        "cyclic_deviation": per.cyclic,
        "energy_drift": energy_drift(traj),
        "max_first_integral_deviation": node_dev,
        "energy_initial": first_integrals(s0).energy,
        "pk_ratio_initial": e0.pk_ratio,
        "full_period": bool(abs(traj.span - TWO_PI) < 1e-9),
    }
    si = _si_block(args.config, {"energy_initial_J_per_kg": ("energy", report["energy_initial"])})
    if si:
        report["si"] = si
    write_json(manifest.add(_sibling(prefix, ".report.json")), report)
    if args.check:
        bad = []
        if report["full_period"] and per.closure >= CLOSURE_LIMIT:
            bad.append(f"closure {per.closure:.3e} >= {CLOSURE_LIMIT}")
        if node_dev >= 1e-10:
            bad.append(f"first integrals drift {node_dev:.3e}")
        if report["energy_drift"] >= 1e-10:
            bad.append(f"energy drift {report['energy_drift']:.3e}")
        if bad:
            raise ValidationFailure("; ".join(bad))
    return EXIT_OK


def event_checks(traj, events) -> dict:
    """Invariant checks on the configuration events; each entry (value, limit, passed)."""
    checks = {}

    def put(name, value, limit):
        checks[name] = {"value": value, "limit": limit, "passed": bool(value < limit)}

    spacing = max(abs((b.tau - a.tau) - 30.0) for a, b in zip(events, events[1:]))
    put("spacing_deg_error", spacing, 0.05)
    put("schedule_deg_error", max(abs(e.tau - 30.0 * n) for n, e in enumerate(events)), 0.05)
    col = [e for e in events if e.kind is analysis.ConfigKind.COLLINEAR]
    iso = [e for e in events if e.kind is analysis.ConfigKind.ISOSCELES]
    put("collinear_area", max(abs(float(analysis.signed_area(traj.state(e.tau_rad).r))) for e in col), 1e-8)
    reports = [analysis.collinear_geometry(e, traj) for e in col]
    put("collinear_tangent_spread_deg", max(r.tangent_spread for r in reports), 0.01)
    put("collinear_velocity_ratio", max(r.velocity_ratio_error for r in reports), 1e-6)
    put("collinear_speed_ratio", max(r.speed_ratio_error for r in reports), 1e-6)
    eq = []
    for e in iso:
        r = traj.state(e.tau_rad).r
        a = e.special_particle - 1
        b1, b2 = (a + 1) % 3, (a + 2) % 3
        eq.append(abs(float(np.hypot(*(r[a] - r[b1])) - np.hypot(*(r[a] - r[b2])))))
    put("isosceles_equal_sides", max(eq), 1e-8)
    return checks


def cmd_events(args, manifest: RunManifest) -> int:
    traj = _full_period(args, args.tol)
    try:
        events = analysis.find_configurations(traj)
    except analysis.AnalysisError as exc:
        raise ValidationFailure(f"off-orbit input: {exc}") from None
    main, prefix = _out_paths(args.out, "events", "json")
    col = [analysis.collinear_geometry(e, traj) for e in events if e.kind is analysis.ConfigKind.COLLINEAR]
    iso = [analysis.isosceles_geometry(e, traj) for e in events if e.kind is analysis.ConfigKind.ISOSCELES]
    checks = event_checks(traj, events)
    payload = {
        "events": [e.to_dict() for e in events],
        "collinear": [_report_dict(r) for r in col],
        "isosceles": [_report_dict(r) for r in iso],
        "checks": checks,
    }
    write_json(manifest.add(main), payload)
    if args.check:
        failed = [k for k, c in checks.items() if not c["passed"]]
        if failed:
            raise ValidationFailure("invariant checks failed: " + ", ".join(failed))
    return EXIT_OK


def _report_dict(rep) -> dict:
    d = asdict(rep)
    for k, v in list(d.items()):
        if isinstance(v, np.ndarray):
            d[k] = v.tolist()
    if isinstance(rep, analysis.CollinearReport):
        d["speed_is_max"] = rep.speed_is_max()
    if isinstance(rep, analysis.IsoscelesReport):
        d["base_ratio"] = rep.base_ratio
    return d


def _parse_multipliers(text: str) -> list[int]:
    text = text.strip().strip("[]")
    if not text:
        return []
    try:
        return [int(p) for p in text.replace(" ", "").split(",") if p]
    except ValueError:
        raise ValidationFailure(f"bad multiplier list {text!r}") from None


def cmd_fit(args, manifest: RunManifest) -> int:
    mults = _parse_multipliers(args.multipliers) if args.multipliers is not None else (
        [6, 12] if args.series == "perimeter" else [2])
    traj = _full_period(args, args.tol)
    sep = analysis.separations(traj, args.grid_step_deg)
    series = sep.perimeter if args.series == "perimeter" else getattr(sep, args.series)
    tau, values = fitting.periodic_samples(series, sep.tau - sep.tau[0])
    try:
        fit = fitting.fit_cosine_series(tau, values, mults, name=args.series, method=args.method)
    except fitting.FitError as exc:
        raise ValidationFailure(str(exc)) from None
    main, prefix = _out_paths(args.out, f"fit_{args.series}", "json")
    write_json(manifest.add(main), fit.to_dict())
    res = fitting.residual(fit, tau, values)
    write_csv(manifest.add(_sibling(prefix, ".residual.csv")), ("tau_deg", "residual"),
              np.column_stack([res.tau_deg, res.residual]))
    return EXIT_OK


def _curve_spec(args) -> curves.CurveSpec:
    try:
        fam = curves.Family.parse(args.family)
    except ValueError:
        raise ValidationFailure(f"unknown family {args.family!r}") from None
    try:
        return curves.CurveSpec(fam, a=args.a, b=args.b, k=args.k, a_prime=args.a_prime)
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from None


def cmd_curves(args, manifest: RunManifest) -> int:
    spec = _curve_spec(args)
    if spec.family is curves.Family.RING:
        raise ValidationFailure("the ring-potential curve is implicit only; nothing to sample")
    pts = curves.sample_curve(spec, args.samples)
    main, prefix = _out_paths(args.out, f"curve_{spec.family.name.lower()}", "csv")
    if args.format == "csv":
        curves.write_samples(manifest.add(main), pts)
    else:
        write_json(manifest.add(main), [{"t": p.t, "x": p.point[0], "y": p.point[1], "r": p.r,
                                         "theta_deg": p.theta_deg} for p in pts])
    write_json(manifest.add(_sibling(prefix, ".report.json")), curves.curve_report(spec))
    if args.fit_tangent is not None:
        fit = curves.fit_hippopede(args.fit_tangent, args.fit_collinear, a=args.a)
        write_json(manifest.add(_sibling(prefix, ".hippopede_fit.json")), fit.to_dict())
    return EXIT_OK


def cmd_compare(args, manifest: RunManifest) -> int:
    lb = compare.lemniscate_features(1.0)
    if args.against == "lb":
        other = compare.lemniscate_features(1.0)
    else:
        other = compare.orbit_features(_full_period(args, args.tol))
    main, _ = _out_paths(args.out, "compare", "json")
    write_json(manifest.add(main), {
        "features": [compare.features_dict(lb), compare.features_dict(other)],
        "rows": compare.compare(lb, other),
    })
    return EXIT_OK


DIAGRAMS = ("separations", "hodograph", "acceleration", "cog", "relative", "pk_ratio", "pedal",
            "angular_momentum", "energies", "arclength", "chords", "ds_dr")


def cmd_diagrams(args, manifest: RunManifest) -> int:
    traj = _full_period(args, args.tol)
    kinds = DIAGRAMS if args.kind == "all" else (args.kind,)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    step = args.grid_step_deg
    marks = {}
    for kind in kinds:
        if kind == "separations":
            s = analysis.separations(traj, step)
            s.to_csv(manifest.add(out / "separations.csv"))
            marks[kind] = {"l_max": s.l_max, "tau_l_max": s.tau_l_max, "l_min": s.l_min, "tau_l_min": s.tau_l_min}
        elif kind in ("hodograph", "acceleration", "cog", "pk_ratio", "pedal"):
            fn = {"hodograph": analysis.hodograph, "acceleration": analysis.acceleration_diagram,
                  "cog": analysis.cog_curve, "pk_ratio": analysis.energy_ratio_series,
                  "pedal": analysis.pedal_ratio_series}[kind]
            curve = fn(traj, grid_step_deg=step) if kind == "pk_ratio" else fn(traj, args.particle, grid_step_deg=step)
            curve.to_csv(manifest.add(out / f"{kind}.csv"))
            if kind == "acceleration":
                write_csv(manifest.add(out / "acceleration_modulus.csv"), ("tau_deg", "modulus"),
                          np.column_stack([curve.tau_deg, curve.marks["modulus"]]))
            marks[kind] = {k: v for k, v in curve.marks.items() if k != "modulus"}
            marks[kind]["winding"] = curve.winding
        elif kind == "relative":
            for name, curve in analysis.relative_motion(traj, args.particle, step).items():
                curve.to_csv(manifest.add(out / f"relative_{name}.csv"))
        elif kind == "angular_momentum":
            tau, lm = analysis.angular_momentum_series(traj, step)
            write_csv(manifest.add(out / "angular_momentum.csv"), ("tau_deg", "L1", "L2", "L3", "L_total"),
                      np.column_stack([np.degrees(tau), lm, lm.sum(axis=1)]))
        elif kind == "energies":
            taus = traj.grid(step)
            taus[-1] = min(taus[-1], traj.tau_end)
            rows = []
            for t in taus:
                e = energies(traj.state(t))
                rows.append((math.degrees(t - traj.tau_start),) + tuple(e.kinetic_per_particle)
                            + (e.kinetic_total, e.potential_total, e.total))
            write_csv(manifest.add(out / "energies.csv"),
                      ("tau_deg", "K1", "K2", "K3", "K_total", "P_total", "E_total"), rows)
        elif kind == "arclength":
            arc = analysis.arclength(traj, args.particle, grid_step_deg=step)
            write_csv(manifest.add(out / "arclength.csv"), ("tau_deg", "s"),
                      np.column_stack([np.degrees(arc.tau), arc.s]))
            marks[kind] = {"total": arc.total, "a": arc.a, "per_2a": arc.normalized,
                           "resolution_gap": arc.resolution_gap}
        elif kind == "chords":
            write_csv(manifest.add(out / "chords.csv"),
                      ("tau_deg", "body_a", "body_b", "ax", "ay", "bx", "by", "degenerate"),
                      analysis.chords_to_rows(analysis.chord_envelope(traj)))
        elif kind == "ds_dr":
            rows = []
            for m in (1.0, 1.1, 1.2, 1.3):
                c = analysis.ds_dr_comparison(traj, m, grid_step_deg=step)
                rows += [(m, t, r, meas, mod, int(b)) for t, r, meas, mod, b in
                         zip(c.tau_deg, c.r, c.measured, c.model, c.breakdown)]
            write_csv(manifest.add(out / "ds_dr.csv"),
                      ("m", "tau_deg", "r", "measured", "model", "breakdown"), rows)
            best_m, err = analysis.best_radical_m(traj)
            marks[kind] = {"best_m": best_m, "max_abs_residual": err}
    write_json(manifest.add(out / "diagram_marks.json"), marks)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "events": cmd_events,
    "fit": cmd_fit,
    "curves": cmd_curves,
    "compare": cmd_compare,
    "diagrams": cmd_diagrams,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="integrator rtol = atol (default 1e-12, or $CHOREO8_TOL)")
    common.add_argument("--grid-step-deg", type=float, default=0.1, help="output grid step in degrees of tau")
    common.add_argument("--out", default="out", help="output file or directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--check", action="store_true", help="exit 2 unless the built-in checks pass")
    common.add_argument("--config", help="JSON unit system (R_m, m_total_kg, G) for SI values")
    common.add_argument("--state", help="JSON initial state with r and v (3x2)")
    common.add_argument("--initial", choices=("canonical", "published", "reference"), default="canonical",
                        help="canonical: six-decimal positions with consistent velocities; published: the "
                             "six decimals as printed; reference: 8-digit literature start (precision oracle)")

    p = argparse.ArgumentParser(prog="choreo8", description="Figure-8 three-body orbit toolkit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="integrate and write the trajectory")
    s.add_argument("--tau-end-deg", type=float, default=360.0)

    sub.add_parser("events", parents=[common], help="configuration events and their geometry")

    f = sub.add_parser("fit", parents=[common], help="cosine-series fit of a separation series")
    f.add_argument("series", choices=("perimeter", "r12", "r23", "r31"))
    f.add_argument("--multipliers", help="comma list, e.g. 6,12 (empty for the mean only)")
    f.add_argument("--method", choices=("lsq", "collocation"), default="lsq")

    c = sub.add_parser("curves", parents=[common], help="sample a catalog curve and report its properties")
    c.add_argument("family", help="lb, lg, hp, ghp")
    c.add_argument("--a", type=float, default=1.0)
    c.add_argument("--b", type=float, default=None)
    c.add_argument("--k", type=float, default=None)
    c.add_argument("--a-prime", type=float, default=None)
    c.add_argument("--samples", type=int, default=721)
    c.add_argument("--fit-tangent", type=float, default=None, help="also fit a hippopede to this origin tangent")
    c.add_argument("--fit-collinear", type=float, default=None)

    m = sub.add_parser("compare", parents=[common], help="lemniscate vs three-body comparison table")
    m.add_argument("--against", choices=("fig8", "lb"), default="fig8")

    d = sub.add_parser("diagrams", parents=[common], help="derived curves of the orbit as CSV")
    d.add_argument("--kind", choices=("all",) + DIAGRAMS, default="all")
    d.add_argument("--particle", type=int, choices=(1, 2, 3), default=1)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        if args.tol is None:
            args.tol = _default_tol()
        manifest = RunManifest(args.command, {k: v for k, v in vars(args).items() if k != "command"},
                               args.tol, versions=_versions())
        code = COMMANDS[args.command](args, manifest)
    except ValidationFailure as exc:
        print(f"choreo8: validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ConstraintError, SingularityError, curves.DomainError, curves.UnsupportedFormError) as exc:
        print(f"choreo8: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (IntegrationError, analysis.AnalysisError, ArithmeticError) as exc:
        print(f"choreo8: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"choreo8: validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"choreo8: cannot write output: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    manifest.wall_time_s = time.perf_counter() - t0
    out = Path(args.out)
    mpath = (out.with_suffix("") if out.suffix else out / args.command)
    mpath = mpath.with_name(mpath.name + ".manifest.json")
    try:
        mpath.parent.mkdir(parents=True, exist_ok=True)
        write_text(mpath, to_json_text(asdict(manifest)))
    except OSError as exc:
        print(f"choreo8: cannot write manifest: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return code


if __name__ == "__main__":
    sys.exit(main())
