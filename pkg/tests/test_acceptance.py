"""Acceptance checks, one printed PASS/FAIL line per criterion.

Each criterion runs on the six-decimal start (the `traj` fixture). Values
from the 8-digit start are printed alongside where they tell input rounding
apart from code error, but they never decide a verdict.
"""
import math

import numpy as np
import pytest

from choreo8 import analysis as A
from choreo8 import compare, curves, fitting
from choreo8.dynamics import (
    BodyState,
    acceleration,
    canonical_initial_state,
    energies,
    first_integrals,
)
from choreo8.integrator import energy_drift, integrate, verify_periodicity

TWO_PI = 2 * math.pi
ISO, COL = A.ConfigKind.ISOSCELES, A.ConfigKind.COLLINEAR


class Criterion:
    def __init__(self):
        self.rows = []

    def near(self, label, value, target, tol):
        self.rows.append((label, f"{value:.10g} vs {target:.10g} +- {tol:g}", bool(abs(value - target) <= tol)))

    def below(self, label, value, limit):
        self.rows.append((label, f"{value:.3e} < {limit:g}", bool(value < limit)))

    def within(self, label, value, lo, hi):
        self.rows.append((label, f"{value:.6g} in [{lo:g}, {hi:g}]", bool(lo <= value <= hi)))

    def true(self, label, ok, detail=""):
        self.rows.append((label, detail, bool(ok)))

    def note(self, label, detail):
        self.rows.append((label, detail, None))

    @property
    def passed(self):
        return all(ok for _, _, ok in self.rows if ok is not None)


@pytest.fixture
def verdict(capsys, request):
    c = Criterion()
    yield c
    n = request.node.name.split("_")[1]
    bad = [f"{label}: {detail}" for label, detail, ok in c.rows if ok is False]
    head = f"ACCEPTANCE {n:>2} {'PASS' if c.passed else 'FAIL'}"
    with capsys.disabled():
        print(f"\n{head}  " + ("; ".join(bad) if bad else f"{len(c.rows)} checks"))
        for label, detail, ok in c.rows:
            mark = "note" if ok is None else ("ok" if ok else "MISS")
            print(f"    [{mark}] {label}: {detail}")


def _finish(c: Criterion):
    misses = [f"{label}: {detail}" for label, detail, ok in c.rows if ok is False]
    assert not misses, "; ".join(misses)


def test_01_periodicity(verdict, canonical, traj):
    rep = verify_periodicity(traj)
    verdict.below("closure at tol 1e-12", rep.closure, 1e-5)
    coarse = verify_periodicity(integrate(canonical, TWO_PI, tol=1e-10)).closure
    verdict.true("tol 1e-10 closure within 2x of tol 1e-12", coarse <= 2 * rep.closure,
                 f"{coarse:.6e} vs {rep.closure:.6e}")
    _finish(verdict)


def test_02_conservation(verdict, canonical, traj):
    r = traj.states[:, :6].reshape(-1, 3, 2)
    v = traj.states[:, 6:].reshape(-1, 3, 2)
    verdict.below("|COM| at nodes", np.abs(r.sum(axis=1)).max() / 3, 1e-10)
    verdict.below("|sum v| at nodes", np.abs(v.sum(axis=1)).max(), 1e-10)
    ang = np.abs((r[..., 0] * v[..., 1] - r[..., 1] * v[..., 0]).sum(axis=1)).max()
    verdict.below("|L_total| at nodes", ang, 1e-10)
    verdict.below("energy drift", energy_drift(traj), 1e-10)
    verdict.near("E(0)", first_integrals(canonical).energy, -0.6215955544, 1e-5)
    _finish(verdict)


def test_03_configuration_schedule(verdict, traj, events):
    verdict.true("12 events", len(events) == 12, str(len(events)))
    kinds = [e.kind for e in events]
    verdict.true("alternating, isosceles first", kinds == [ISO, COL] * 6)
    verdict.below("max |tau - 30 n| (deg)", max(abs(e.tau - 30.0 * n) for n, e in enumerate(events)), 0.05)
    st = traj.state(events[1].tau_rad)
    verdict.near("collinear x at 30 deg", abs(st.r[0, 0]), 0.669531, 1e-4)
    verdict.near("collinear y at 30 deg", abs(st.r[0, 1]), 0.167788, 1e-4)
    verdict.below("outer bodies opposite", float(np.abs(st.r[0] + st.r[2]).max()), 1e-4)
    _finish(verdict)


def test_04_angles(verdict, traj, events):
    col = [e for e in events if e.kind is COL]
    iso = [e for e in events if e.kind is ISO]
    verdict.below("collinear line |angle - 14.0688|", max(abs(abs(e.line_angle) - 14.0688) for e in col), 0.01)
    reps = [A.collinear_geometry(e, traj) for e in col]
    worst = max(abs(abs(t) - 42.8434) for r in reps for t in r.tangent_angles)
    verdict.below("collinear tangent |angle - 42.8434|", worst, 0.02)
    verdict.below("tangents parallel (deg)", max(r.tangent_spread for r in reps), 0.01)
    for e in iso:
        verdict.within(f"isosceles side angle at {e.tau:.2f}", A.isosceles_geometry(e, traj).side_angle, 12.00, 12.06)
    _finish(verdict)


def test_05_separations(verdict, traj, seps, events):
    verdict.near("l_M", seps.l_max, 1.38047, 1e-4)
    verdict.near("l_m", seps.l_min, 0.476626, 1e-4)
    l_max, outer = A.collinear_radius_identity(traj, seps, events)
    verdict.below("l_M vs sum of collinear outer radii", abs(l_max - outer), 1e-6)
    _finish(verdict)


def test_06_energy_ratio(verdict, traj):
    c = A.energy_ratio_series(traj)
    tmin, vmin, _ = c.marks["min"]
    tmax, vmax, _ = c.marks["max"]
    verdict.near("P/K min", vmin, 1.94131, 1e-4)
    verdict.true("min at an isosceles instant", round(tmin / 30) % 2 == 0, f"tau {tmin:.3f}")
    verdict.near("P/K max", vmax, 2.06125, 1e-4)
    verdict.true("max at a collinear instant", round(tmax / 30) % 2 == 1, f"tau {tmax:.3f}")
    # energies per unit body mass (each body has mass 1/3 of the total)
    t_row = energies(traj.state(0.0))
    c_row = energies(traj.state(math.radians(30)))
    verdict.near("T row E_p", t_row.specific_potential, -1.28195, 1e-3)
    verdict.near("T row E_k", t_row.specific_kinetic, 0.66305, 1e-3)
    verdict.near("C row E_p", c_row.specific_potential, -1.20732, 1e-3)
    verdict.near("C row E_k", c_row.specific_kinetic, 0.585722, 1e-3)
    verdict.note("T row E_k + E_p", f"{t_row.specific_kinetic + t_row.specific_potential:.10f}")
    _finish(verdict)


def test_07_fits(verdict, seps):
    t, p = fitting.periodic_samples(seps.perimeter, seps.tau - seps.tau[0])
    fit = fitting.fit_cosine_series(t, p, [6, 12])
    verdict.near("perimeter c0", fit.c0, 2.763093, 1e-5)
    verdict.near("perimeter c6", fit.coefficients[0], 0.0021667, 1e-5)
    verdict.near("perimeter c12", fit.coefficients[1], 1.586e-5, 1e-6)
    t, r = fitting.periodic_samples(seps.r23, seps.tau - seps.tau[0])
    col = fitting.fit_cosine_series(t, r, [2], method="collocation")
    verdict.near("r23 c0 (through the extremes)", col.c0, 0.928549, 1e-3)
    verdict.near("r23 c2 (through the extremes)", col.coefficients[0], -0.451923, 1e-3)
    lsq = fitting.fit_cosine_series(t, r, [2])
    verdict.note("r23 least squares", f"c0 {lsq.c0:.6f}, c2 {lsq.coefficients[0]:.6f}")
    _finish(verdict)


def test_08_hodograph_and_acceleration(verdict, traj, ref_traj):
    h = A.hodograph(traj, 1)
    first = min(t for t in h.marks["horizontal"] if t > 1.0)
    verdict.near("v1 horizontal (deg)", first, 53.66, 0.1)
    a90 = float(np.hypot(*acceleration(traj.state(math.pi / 2))[0]))
    verdict.below("|a1(90 deg)|", a90, 1e-8)
    ref90 = float(np.hypot(*acceleration(ref_traj.state(math.pi / 2))[0]))
    verdict.note("|a1(90 deg)| from the 8-digit start", f"{ref90:.3e}")
    verdict.true("hodograph winds 0", h.winding == 0, str(h.winding))
    acc = A.acceleration_diagram(traj, 1)
    verdict.true("acceleration winds 0", acc.winding == 0, str(acc.winding))
    (_, ang), _ = A.cog_curve(traj, 1).marks["asymptotes"]
    verdict.near("COG asymptote (deg)", ang, -51.5693, 0.01)
    _finish(verdict)


def test_09_arclength(verdict, traj):
    arc = A.arclength(traj, 1)
    verdict.near("normalized length", arc.normalized, 2.5596817440, 1e-5)
    verdict.below("two-resolution gap", arc.resolution_gap, 1e-8)
    _finish(verdict)


def test_10_curve_catalog(verdict, traj, events):
    tri = curves.triangular_property(curves.lemniscate())
    verdict.near("LB theta_T", tri.theta_T, 34.26465, 1e-4)
    verdict.below("LB |H - 3/2|", abs(tri.H - 1.5), 1e-9)
    k = curves.elliptic_K(1 / math.sqrt(2))
    verdict.near("K(1/sqrt 2)", k, 1.8540746773, 1e-9)
    # series oracle, independent of the AGM
    total, term, n = 1.0, 1.0, 1
    while term > 1e-18:
        term *= ((2 * n - 1) / (2 * n)) ** 2 * 0.5
        total += term
        n += 1
    verdict.below("AGM vs series", abs(k - math.pi / 2 * total), 1e-9)
    verdict.near("sqrt2 K(1/sqrt2)", math.sqrt(2) * k, 2.622057, 1e-5)
    f2 = curves.fit_hippopede(42.8434)
    verdict.near("tangent-fit hippopede collinear angle", f2.collinear_angle, 14.9532, 1e-3)
    verdict.near("tangent-fit hippopede r", f2.collinear_r, 0.690351, 1e-3)
    verdict.near("tangent-fit hippopede y", f2.base_point_y, 0.24294, 1e-3)
    verdict.near("tangent-fit hippopede tangent", f2.base_tangent, 13.2732, 1e-3)
    verdict.near("tangent-fit hippopede height / a", f2.height, 1.38025, 1e-3)
    f3 = curves.fit_hippopede(42.8434, 14.0688)
    verdict.near("two-angle hippopede k", f3.k, 1.4204, 1e-3)
    verdict.near("two-angle hippopede a'", f3.a_prime, 0.697886, 1e-3)
    verdict.near("two-angle hippopede tangent", f3.base_tangent, 12.0473, 1e-3)
    verdict.near("two-angle hippopede height / a", f3.height, 1.4855, 1e-3)
    verdict.near("two-angle hippopede r", f3.collinear_r, 0.691006, 1e-3)
    rows = {r["row"]: r for r in compare.compare(compare.lemniscate_features(),
                                                  compare.orbit_features(traj, events))}
    verdict.near("length ratio LB / fig-8", rows["length_a1"]["ratio"], 1.024368, 1e-4)
    _finish(verdict)


def test_11_pedal(verdict, traj):
    lb = curves.lemniscate()
    worst = 0.0
    for t in np.linspace(-math.pi, math.pi, 2001):
        if curves.eval_parametric(lb, t).r > 1e-3:
            ped = curves.pedal_curve(lb, t)
            worst = max(worst, abs(ped.p - ped.r ** 3))
    verdict.below("LB |p - r^3|", worst, 1e-10)
    c = A.pedal_ratio_series(traj)
    tmin, vmin, _ = c.marks["min"]
    tmax, vmax, _ = c.marks["relative_max"]
    verdict.near("fig-8 p/r^3 min", vmin, 0.9775, 5e-4)
    verdict.near("at tau", tmin, 35.72, 0.2)
    verdict.near("fig-8 p/r^3 relative max", vmax, 0.99893, 5e-4)
    verdict.near("at tau", tmax, 65.87, 0.2)
    _finish(verdict)


def test_12_property_suites(verdict, traj, seps, ref_traj):
    rng = np.random.default_rng(12)
    worst_rot = worst_sum = 0.0
    for _ in range(200):
        s = BodyState(0.0, rng.uniform(-2, 2, (3, 2)), rng.uniform(-1, 1, (3, 2)))
        phi = rng.uniform(0, TWO_PI)
        q = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
        a = acceleration(s)
        rot = acceleration(BodyState(0.0, s.r @ q.T, s.v @ q.T))
        scale = max(1.0, np.abs(a).max())
        worst_rot = max(worst_rot, np.abs(rot - a @ q.T).max() / scale)
        worst_sum = max(worst_sum, np.abs(a.sum(axis=0)).max() / scale)
    verdict.below("acceleration rotation equivariance", worst_rot, 1e-10)
    verdict.below("accelerations sum to zero", worst_sum, 1e-10)

    verdict.below("cyclic 2pi/3 relabeling", verify_periodicity(traj).cyclic, 1e-5)

    dr, dv = A.point_reflection_deviation(traj, n=121)
    verdict.below("point reflection, positions", dr, 1e-6)
    verdict.below("point reflection, velocities", dv, 1e-6)
    rr, rv = A.point_reflection_deviation(ref_traj, n=61)
    verdict.note("point reflection from the 8-digit start", f"r {rr:.2e}, v {rv:.2e}")

    hp, lb = curves.hippopede(math.sqrt(2.0)), curves.lemniscate()
    gap = max(abs((curves.polar_radius(hp, th) or 0.0) ** 2 - (curves.polar_radius(lb, th) or 0.0) ** 2)
              for th in np.linspace(-math.pi, math.pi, 3601))
    verdict.below("HP(k^2 = 2) vs LB, r^2", gap, 1e-12)

    t, p = fitting.periodic_samples(seps.perimeter, seps.tau - seps.tau[0])
    full = fitting.fit_cosine_series(t, p, list(range(1, 19)))
    stray = max(abs(c) for m, c in zip(full.multipliers, full.coefficients) if m % 6)
    verdict.below("perimeter harmonics off multiples of 6", stray, 1e-10)
    sep_ref = A.separations(ref_traj)
    tr_, pr_ = fitting.periodic_samples(sep_ref.perimeter, sep_ref.tau - sep_ref.tau[0])
    full_ref = fitting.fit_cosine_series(tr_, pr_, list(range(1, 19)))
    stray_ref = max(abs(c) for m, c in zip(full_ref.multipliers, full_ref.coefficients) if m % 6)
    verdict.note("same from the 8-digit start", f"{stray_ref:.2e}")

    rms = [fitting.fit_cosine_series(t, p, list(range(6, 6 * n + 1, 6))).residual_rms for n in range(5)]
    verdict.true("residual rms non-increasing as harmonics are added",
                 all(b <= a * (1 + 1e-12) for a, b in zip(rms, rms[1:])),
                 ", ".join(f"{x:.2e}" for x in rms))
    _finish(verdict)


def test_flagged_discrepancies(capsys):
    from choreo8.dynamics import UnitSystem
    days = UnitSystem(1.0, 1.0).period_s / 86400
    seps = A.separations(integrate(canonical_initial_state(), TWO_PI, tol=1e-12))
    with capsys.disabled():
        print(f"\nFLAGGED 1 kg / 1 m period: {days:.4f} days (printed figure 28.153)")
        print(f"FLAGGED separation range: {seps.l_min:.6f} to {seps.l_max:.6f} (printed 0.47 to 1.12)")
    assert days == pytest.approx(8.9017, abs=1e-3)
