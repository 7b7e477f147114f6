"""Configuration events, measured geometry and derived curves of the figure-8.

All public functions take a full-period :class:`~choreo8.integrator.Trajectory`
and 1-based particle labels. Angles in returned records are degrees; line
directions are folded into (-90, 90].
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.optimize import brentq, minimize_scalar

from choreo8.dynamics import (
    BodyState,
    acceleration,
    center_of_gravity,
    jerk,
    line_angle_deg,
    pair_distances,
    particle_index,
)
from choreo8.integrator import TWO_PI, EventLocator, Trajectory, locate_event
from choreo8.io import write_csv

DEFAULT_GRID_DEG = 0.1
# bodies 1..3 -> pairs (1,2), (2,3), (3,1) in pair_distances order
PAIRS = ((0, 1), (1, 2), (2, 0))
PAIR_NAMES = ("r12", "r23", "r31")


class AnalysisError(RuntimeError):
    """The trajectory does not show the figure-8 event structure."""


class DomainError(ValueError):
    pass


class ConfigKind(str, enum.Enum):
    ISOSCELES = "Isosceles"
    COLLINEAR = "Collinear"


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _angle_between_lines(u, w) -> float:
    """Acute angle in degrees between the lines spanned by u and w."""
    c = abs(float(np.dot(u, w))) / (np.hypot(*u) * np.hypot(*w))
    return math.degrees(math.acos(min(1.0, c)))


def _require_period(traj: Trajectory):
    if traj.span < TWO_PI - 1e-9:
        raise AnalysisError("analysis needs a trajectory spanning one full period (2 pi)")


def _period_window(traj: Trajectory):
    return traj.tau_start, traj.tau_start + TWO_PI


@dataclass(frozen=True)
class ConfigurationEvent:
    """A detected isosceles or collinear instant.

    ``special_particle`` is the apex (isosceles) or the body at the origin
    (collinear). ``line_angle`` is the base direction (isosceles) or the line
    of the three bodies (collinear); ``tangent_angle`` the velocity line of the
    special body. ``side_angle`` is the half apex angle of the isosceles
    triangle, i.e. the angle between its equal sides and its symmetry axis.
    """

    kind: ConfigKind
    tau: float
    special_particle: int
    line_angle: float
    tangent_angle: float
    side_angle: float | None = None
    tau_rad: float = field(default=math.nan, repr=False)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "tau_deg": self.tau,
            "particle": self.special_particle,
            "line_angle_deg": self.line_angle,
            "tangent_angle_deg": self.tangent_angle,
            "side_angle_deg": self.side_angle,
        }


def signed_area(r) -> np.ndarray:
    """Twice the signed triangle area for positions of shape (..., 3, 2)."""
    r = np.asarray(r)
    return _cross(r[..., 1, :] - r[..., 0, :], r[..., 2, :] - r[..., 0, :])


def _isosceles_predicate(apex: int):
    j, k = (apex + 1) % 3, (apex + 2) % 3

    def pred(s: BodyState):
        return float(np.hypot(*(s.r[j] - s.r[apex])) - np.hypot(*(s.r[k] - s.r[apex])))

    return pred


def _measure_event(kind: ConfigKind, state: BodyState) -> ConfigurationEvent:
    r, v = state.r, state.v
    if kind is ConfigKind.COLLINEAR:
        s = int(np.argmin(np.hypot(r[:, 0], r[:, 1])))
        other = (s + 1) % 3
        return ConfigurationEvent(kind, math.degrees(state.tau), s + 1,
                                  line_angle_deg(r[other]), line_angle_deg(v[s]), None, state.tau)
    d = pair_distances(r)  # r12, r23, r31
    # sides meeting at body 1: r12, r31; body 2: r12, r23; body 3: r23, r31
    diffs = [abs(d[0] - d[2]), abs(d[0] - d[1]), abs(d[1] - d[2])]
    apex = int(np.argmin(diffs))
    j, k = (apex + 1) % 3, (apex + 2) % 3
    axis = -r[apex]
    side = _angle_between_lines(r[j] - r[apex], axis)
    return ConfigurationEvent(kind, math.degrees(state.tau), apex + 1,
                              line_angle_deg(r[k] - r[j]), line_angle_deg(v[apex]), side, state.tau)


def _events_on_period(traj: Trajectory, pred, lo: float, hi: float, seam: float = 1e-3):
    """Events of ``pred`` on [lo, hi] plus one straddling the seam hi == lo.

    A root a hair before ``lo`` leaves both ends on the same side; it is found
    by bracketing across [hi - seam, hi] followed by [lo, lo + seam].
    """
    out = locate_event(traj, EventLocator(pred), lo, hi)
    near = [t for t, _ in out if t < lo + seam or t > hi - seam]
    if near:
        return out
    ga, gb = float(pred(traj.state(hi - seam))), float(pred(traj.state(lo + seam)))
    if ga * gb >= 0:
        return out

    def g(u):  # u in [-seam, seam] around the seam
        return float(pred(traj.state(hi + u if u <= 0 else lo + u)))

    u = brentq(g, -seam, seam, xtol=1e-13, rtol=4 * np.finfo(float).eps)
    t = hi + u if u <= 0 else lo + u
    return sorted(out + [(t, traj.state(t))], key=lambda p: p[0])


def find_configurations(traj: Trajectory, expected: int = 12) -> list[ConfigurationEvent]:
    """The isosceles and collinear instants of one period, in time order.

    Collinear instants are zeros of the signed area; isosceles instants are
    zeros of r_ij - r_ik for each apex i that are not collinear (the same
    function also vanishes when body i sits at the midpoint of the line).
    Raises AnalysisError unless exactly ``expected`` events alternate in kind.
    """
    _require_period(traj)
    lo, hi = _period_window(traj)
    hi = min(hi, traj.tau_end)
    found: list[tuple[float, ConfigKind, BodyState]] = []
    area = lambda s: float(signed_area(s.r))  # noqa: E731
    for tau, st in _events_on_period(traj, area, lo, hi):
        found.append((tau, ConfigKind.COLLINEAR, st))
    for apex in range(3):
        for tau, st in _events_on_period(traj, _isosceles_predicate(apex), lo, hi):
            if abs(float(signed_area(st.r))) < 1e-4:
                continue
            found.append((tau, ConfigKind.ISOSCELES, st))
    events = [_measure_event(kind, st) for _, kind, st in found]
    # one period is reported as (-15, 345] degrees past the start; an event
    # just before the start shows up near the end of the run
    start_deg = math.degrees(lo)
    shifted = []
    for e in events:
        if e.tau - start_deg > 345.0:
            e = replace(e, tau=e.tau - 360.0)
        shifted.append(e)
    shifted.sort(key=lambda e: e.tau)
    events = []
    for e in shifted:
        # a run that closes only to ~1e-6 can see the start event on both sides of the seam
        if events and e.kind == events[-1].kind and abs(e.tau - events[-1].tau) < 0.01:
            if abs(e.tau) < abs(events[-1].tau):
                events[-1] = e
            continue
        events.append(e)
    if len(events) != expected:
        raise AnalysisError(f"expected {expected} configuration events per period, found {len(events)}")
    for a, b in zip(events, events[1:]):
        if a.kind == b.kind:
            raise AnalysisError(f"configuration kinds do not alternate at tau = {b.tau:.4f} deg")
    return events


@dataclass(frozen=True)
class CollinearReport:
    tau: float
    origin_particle: int
    origin_distance: float
    line_angle: float
    tangent_angles: tuple[float, float, float]
    tangent_spread: float
    velocity_ratio_error: float
    origin_acceleration: float
    speed: float
    max_speed: float
    tau_max_speed: float
    outer_radii: tuple[float, float]
    # max | |v_origin| - 2 |v_other| | over the two other bodies
    speed_ratio_error: float

    def speed_is_max(self, rtol: float = 1e-6) -> bool:
        """Origin body's speed equals its largest speed over the period.

        The two passages of a body through the origin agree only to the
        accuracy of the initial state, hence the relative tolerance.
        """
        return self.speed >= self.max_speed * (1.0 - rtol)


def collinear_geometry(event: ConfigurationEvent, traj: Trajectory) -> CollinearReport:
    """Line direction, common tangent, v_origin = -2 v_other and maximal-speed checks."""
    if event.kind is not ConfigKind.COLLINEAR:
        raise ValueError("collinear_geometry needs a collinear event")
    st = traj.state(event.tau_rad)
    s = particle_index(event.special_particle)
    others = [i for i in range(3) if i != s]
    tangents = tuple(line_angle_deg(v) for v in st.v)
    spread = max(_angle_between_lines(st.v[a], st.v[b]) for a, b in ((0, 1), (0, 2), (1, 2)))
    ratio_err = max(float(np.hypot(*(st.v[s] + 2.0 * st.v[o]))) for o in others)
    speeds = _speed_extrema(traj, s)
    tau_max, vmax = max(speeds, key=lambda p: p[1])
    return CollinearReport(
        tau=event.tau,
        origin_particle=event.special_particle,
        origin_distance=float(np.hypot(*st.r[s])),
        line_angle=event.line_angle,
        tangent_angles=tangents,
        tangent_spread=spread,
        velocity_ratio_error=ratio_err,
        origin_acceleration=float(np.hypot(*acceleration(st)[s])),
        speed=float(np.hypot(*st.v[s])),
        max_speed=vmax,
        tau_max_speed=math.degrees(tau_max),
        outer_radii=tuple(float(np.hypot(*st.r[o])) for o in others),
        speed_ratio_error=max(abs(float(np.hypot(*st.v[s])) - 2.0 * float(np.hypot(*st.v[o]))) for o in others),
    )


def _speed_extrema(traj: Trajectory, i: int):
    """(tau, speed) at every zero of d|v_i|^2/dtau over the trajectory."""
    def pred(s: BodyState):
        return float(s.v[i] @ acceleration(s)[i])

    return [(t, float(np.hypot(*s.v[i]))) for t, s in locate_event(traj, EventLocator(pred))]


@dataclass(frozen=True)
class IsoscelesReport:
    tau: float
    apex: int
    side_angle: float
    side_line_angles: tuple[float, float]
    tangent_misalignment: float
    apex_distance: float
    base_projection: float
    base_half_width: float

    @property
    def base_ratio(self) -> float:
        """Base projection on the symmetry axis over apex distance (-1/2 by the COM)."""
        return self.base_projection / self.apex_distance


def isosceles_geometry(event: ConfigurationEvent, traj: Trajectory) -> IsoscelesReport:
    """Side angle, the side-tangent property of the base bodies, and the axis-frame layout."""
    if event.kind is not ConfigKind.ISOSCELES:
        raise ValueError("isosceles_geometry needs an isosceles event")
    st = traj.state(event.tau_rad)
    a = particle_index(event.special_particle)
    base = [(a + 1) % 3, (a + 2) % 3]
    r, v = st.r, st.v
    misalign = max(_angle_between_lines(v[b], r[a] - r[b]) for b in base)
    u = r[a] / np.hypot(*r[a])
    normal = np.array([-u[1], u[0]])
    proj = [float(r[b] @ u) for b in base]
    return IsoscelesReport(
        tau=event.tau,
        apex=event.special_particle,
        side_angle=event.side_angle,
        side_line_angles=tuple(line_angle_deg(r[b] - r[a]) for b in base),
        tangent_misalignment=misalign,
        apex_distance=float(np.hypot(*r[a])),
        base_projection=float(np.mean(proj)),
        base_half_width=float(np.mean([abs(r[b] @ normal) for b in base])),
    )


@dataclass(frozen=True)
class SeparationSeries:
    tau: np.ndarray
    r12: np.ndarray
    r23: np.ndarray
    r31: np.ndarray
    l_max: float
    tau_l_max: float
    l_min: float
    tau_l_min: float

    @property
    def perimeter(self) -> np.ndarray:
        return self.r12 + self.r23 + self.r31

    @property
    def tau_deg(self) -> np.ndarray:
        return np.degrees(self.tau)

    def to_csv(self, path):
        write_csv(path, ("tau_deg", "r12", "r23", "r31", "perimeter"),
                  np.column_stack([self.tau_deg, self.r12, self.r23, self.r31, self.perimeter]))


def separations(traj: Trajectory, grid_step_deg: float = DEFAULT_GRID_DEG) -> SeparationSeries:
    """Pair separations on a uniform grid with refined extremes.

    Extremes are zeros of (r_i - r_j).(v_i - v_j), located per pair.
    """
    _require_period(traj)
    tau = traj.grid(grid_step_deg)
    d = pair_distances(traj.positions(tau))
    extrema = []
    for i, j in PAIRS:
        def pred(s: BodyState, i=i, j=j):
            return float((s.r[i] - s.r[j]) @ (s.v[i] - s.v[j]))

        for t, s in locate_event(traj, EventLocator(pred)):
            extrema.append((float(np.hypot(*(s.r[i] - s.r[j]))), t))
    lmax, tmax = max(extrema)
    lmin, tmin = min(extrema)
    return SeparationSeries(tau, d[:, 0], d[:, 1], d[:, 2], lmax, math.degrees(tmax), lmin, math.degrees(tmin))


@dataclass(frozen=True)
class DiagramCurve:
    """A sampled derived curve.

    ``values`` is (n,) for scalar curves or (n, 2) for vector curves; rows of
    NaN mark punctures. ``marks`` maps names to refined special instants,
    ``(tau_deg, value)`` pairs or lists of them.
    """

    label: str
    particle: int | tuple | None
    tau: np.ndarray
    values: np.ndarray
    winding: int | None = None
    total_rotation_deg: float | None = None
    marks: dict = field(default_factory=dict)

    @property
    def tau_deg(self) -> np.ndarray:
        return np.degrees(self.tau)

    def to_csv(self, path):
        vals = np.asarray(self.values)
        if vals.ndim == 1:
            header = ("tau_deg", self.label)
            rows = np.column_stack([self.tau_deg, vals])
        else:
            header = ("tau_deg", f"{self.label}_x", f"{self.label}_y")
            rows = np.column_stack([self.tau_deg, vals])
        write_csv(path, header, rows)


def winding(vectors, tau=None, punctures=()) -> tuple[int, float]:
    """(net turns about the origin, total rotation in degrees) of a sampled vector curve.

    ``punctures`` are instants (same unit as ``tau``) where the curve passes
    through the origin. The vector reverses there; the sign of every sample
    after a puncture is flipped so that the rotation counts the turning of the
    curve's direction and not the reversal.
    """
    vec = np.asarray(vectors, dtype=float).copy()
    if len(punctures):
        tau = np.asarray(tau, dtype=float)
        flips = np.searchsorted(np.sort(punctures), tau)
        vec[flips % 2 == 1] *= -1.0
    norm = np.hypot(vec[:, 0], vec[:, 1])
    ok = np.isfinite(norm) & (norm > 1e-12)
    ang = np.unwrap(np.arctan2(vec[ok, 1], vec[ok, 0]))
    total = float(ang[-1] - ang[0])
    return int(round(total / TWO_PI)), math.degrees(total)


def _events(traj, pred, direction=0, lo=None, hi=None):
    return [(math.degrees(t), s) for t, s in locate_event(traj, EventLocator(pred, direction), lo, hi)]


def hodograph(traj: Trajectory, particle: int = 1, grid_step_deg: float = DEFAULT_GRID_DEG) -> DiagramCurve:
    """Velocity diagram of one body; marks where the velocity is horizontal or vertical."""
    _require_period(traj)
    i = particle_index(particle)
    tau = traj.grid(grid_step_deg)
    vel = traj.velocities(tau)[:, i]
    w, rot = winding(vel)
    marks = {
        "horizontal": [t for t, _ in _events(traj, lambda s: s.v[i, 1])],
        "vertical": [t for t, _ in _events(traj, lambda s: s.v[i, 0])],
    }
    return DiagramCurve("hodograph", particle, tau, vel, w, rot, marks)


def _acc_modulus_rate(i):
    def pred(s: BodyState):
        return float(acceleration(s)[i] @ jerk(s)[i])

    return pred


def origin_passages(traj: Trajectory, particle: int) -> list[float]:
    """Refined tau (degrees) at which the body passes through the origin."""
    i = particle_index(particle)
    out = []
    for t, s in _events(traj, lambda s: float(s.r[i] @ s.v[i])):
        if np.hypot(*s.r[i]) < 1e-3:
            out.append(t)
    return out


def acceleration_diagram(traj: Trajectory, particle: int = 1,
                         grid_step_deg: float = DEFAULT_GRID_DEG) -> DiagramCurve:
    """Acceleration diagram of one body with its modulus in ``marks['modulus']``.

    Marks: ``horizontal`` (a_y = 0), ``vertical`` (a_x = 0), ``equal_y_next``
    (same y as the next body label), ``max_modulus`` / ``min_modulus`` as
    (tau, |a|) pairs, and ``zero`` (origin passages, |a| = 0).
    """
    _require_period(traj)
    i = particle_index(particle)
    nxt = (i + 1) % 3
    tau = traj.grid(grid_step_deg)
    acc = np.array([acceleration(BodyState.from_flat(t, y))[i] for t, y in zip(tau, traj.flat(tau))])
    passages = origin_passages(traj, particle)
    w, rot = winding(acc, tau, np.radians(passages))
    maxima, minima = [], []
    for t, s in _events(traj, _acc_modulus_rate(i)):
        mag = float(np.hypot(*acceleration(s)[i]))
        (maxima if _is_local_max(traj, _acc_mag(i), math.radians(t)) else minima).append((t, mag))
    zero = []
    for t in passages:
        zero.append((t, float(np.hypot(*acceleration(traj.state(math.radians(t)))[i]))))
    marks = {
        "horizontal": [t for t, _ in _events(traj, lambda s: acceleration(s)[i][1])],
        "vertical": [t for t, _ in _events(traj, lambda s: acceleration(s)[i][0])],
        "equal_y_next": [t for t, _ in _events(traj, lambda s: s.r[i, 1] - s.r[nxt, 1])],
        "max_modulus": maxima,
        "min_modulus": minima,
        "zero": zero,
        "modulus": np.hypot(acc[:, 0], acc[:, 1]),
    }
    return DiagramCurve("acceleration", particle, tau, acc, w, rot, marks)


def _acc_mag(i):
    return lambda s: float(np.hypot(*acceleration(s)[i]))


def _is_local_max(traj: Trajectory, f, tau: float, h: float = 1e-4) -> bool:
    lo, hi = max(traj.tau_start, tau - h), min(traj.tau_end, tau + h)
    mid = f(traj.state(tau))
    return mid >= f(traj.state(lo)) and mid >= f(traj.state(hi))


def cog_curve(traj: Trajectory, particle: int = 1, grid_step_deg: float = DEFAULT_GRID_DEG) -> DiagramCurve:
    """Locus of the center of gravity seen by one body.

    Grid points where |a| is below the COG zero threshold are NaN. The
    origin passages are marked in ``marks['asymptotes']`` as
    (tau_deg, asymptote line angle) pairs; the asymptote follows the jerk,
    since a ~ jerk * dt next to the passage. No winding is reported: the locus
    runs off to infinity.
    """
    _require_period(traj)
    tau = traj.grid(grid_step_deg)
    pts = np.full((len(tau), 2), np.nan)
    for n, (t, y) in enumerate(zip(tau, traj.flat(tau))):
        c = center_of_gravity(BodyState.from_flat(t, y), particle)
        if not c.at_infinity:
            pts[n] = c.point
    i = particle_index(particle)
    asym = []
    for t in origin_passages(traj, particle):
        asym.append((t, line_angle_deg(jerk(traj.state(math.radians(t)))[i])))
    return DiagramCurve("cog", particle, tau, pts, marks={"asymptotes": asym})


def _mirror_y(p):
    return np.asarray(p) * np.array([-1.0, 1.0])


def _best_match(f_target, traj: Trajectory, guess: float, halfwidth: float = math.radians(0.5)):
    """Minimize ||f(tau') - target|| over tau' near ``guess`` (wrapped into the period)."""
    lo_, hi_ = traj.tau_start, traj.tau_start + TWO_PI

    def wrap(t):
        return lo_ + (t - lo_) % (hi_ - lo_)

    def obj(t):
        t = min(max(wrap(t), traj.tau_start), traj.tau_end)
        return f_target(traj.state(t))

    res = minimize_scalar(obj, bounds=(guess - halfwidth, guess + halfwidth), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.fun), float(res.x)


def cog_mirror_deviation(traj: Trajectory, particle: int = 1, n: int = 61,
                         max_distance: float = 10.0) -> float:
    """Largest distance between COG(tau + pi) and the y-mirror of COG(tau).

    Compares loci: for each sample tau in the first half period the closest
    point of the second-half locus near tau + pi is used. Points farther than
    ``max_distance`` from the origin (near the asymptotes) are skipped.
    """
    _require_period(traj)
    taus = traj.tau_start + np.linspace(0.0, math.pi, n)
    worst = 0.0
    for t in taus:
        c = center_of_gravity(traj.state(t), particle)
        if c.at_infinity or np.hypot(*c.point) > max_distance:
            continue
        target = _mirror_y(c.point)

        def dist(s, target=target):
            cc = center_of_gravity(s, particle)
            return math.inf if cc.at_infinity else float(np.hypot(*(cc.point - target)))

        d, _ = _best_match(dist, traj, t + math.pi)
        worst = max(worst, d)
    return worst


def relative_motion(traj: Trajectory, reference_particle: int = 1,
                    grid_step_deg: float = DEFAULT_GRID_DEG) -> dict[str, DiagramCurve]:
    """Motion of the other two bodies and of their midpoint seen from the reference body.

    Keys: ``rel_<j>`` for each other body, ``midpoint_relative`` (equals
    -3/2 r_ref) and ``midpoint_inertial`` (equals -1/2 r_ref).
    """
    _require_period(traj)
    i = particle_index(reference_particle)
    tau = traj.grid(grid_step_deg)
    r = traj.positions(tau)
    others = [j for j in range(3) if j != i]
    out = {}
    for j in others:
        out[f"rel_{j + 1}"] = DiagramCurve("relative", (reference_particle, j + 1), tau, r[:, j] - r[:, i])
    mid = 0.5 * (r[:, others[0]] + r[:, others[1]])
    out["midpoint_relative"] = DiagramCurve("relative", (reference_particle, tuple(o + 1 for o in others)),
                                            tau, mid - r[:, i])
    out["midpoint_inertial"] = DiagramCurve("midpoint", tuple(o + 1 for o in others), tau, mid)
    return out


def relative_reflection_deviation(traj: Trajectory, reference_particle: int = 1, n: int = 181) -> float:
    """max |(r_j - r_ref)(tau) + (r_k - r_ref)(tau')| with tau' chosen near 2*t0 - tau.

    t0 is the reference body's first origin passage; the two relative curves
    are point reflections of each other through the reference body.
    """
    i = particle_index(reference_particle)
    j, k = [m for m in range(3) if m != i]
    t0 = math.radians(origin_passages(traj, reference_particle)[0])
    worst = 0.0
    for t in traj.tau_start + np.linspace(0.0, TWO_PI, n, endpoint=False):
        s = traj.state(t)
        target = -(s.r[j] - s.r[i])
        d, _ = _best_match(lambda q, target=target: float(np.hypot(*(q.r[k] - q.r[i] - target))), traj,
                           2 * t0 - t)
        worst = max(worst, d)
    return worst


@dataclass(frozen=True)
class Chord:
    tau: float
    pair: tuple[int, int]
    p: np.ndarray
    q: np.ndarray
    degenerate: bool = False


def _lobe_signs(state: BodyState, tie_tol: float = 1e-9) -> list[int]:
    """Lobe of each body: sign of x; a body on the y-axis joins the lobe it is entering."""
    signs = []
    for rx, vx in zip(state.r[:, 0], state.v[:, 0]):
        if abs(rx) > tie_tol:
            signs.append(1 if rx > 0 else -1)
        else:
            signs.append(1 if vx > 0 else -1)
    return signs


def chord_envelope(traj: Trajectory, grid_step_deg: float = 1.0) -> list[Chord]:
    """Segments joining the two bodies that share a lobe, one per grid instant.

    Their envelope is the curve drawn by the chord family; only the chords are
    produced. A chord is ``degenerate`` when one end is at the origin, which
    happens at the collinear instants where the lobe pair switches over.
    """
    _require_period(traj)
    chords = []
    for t in traj.grid(grid_step_deg):
        st = traj.state(t)
        signs = _lobe_signs(st)
        for a, b in ((0, 1), (0, 2), (1, 2)):
            if signs[a] == signs[b]:
                degenerate = min(np.hypot(*st.r[a]), np.hypot(*st.r[b])) < 1e-6
                chords.append(Chord(math.degrees(t), (a + 1, b + 1), st.r[a].copy(), st.r[b].copy(), degenerate))
                break
    return chords


def chords_to_rows(chords):
    return [(c.tau, c.pair[0], c.pair[1], *c.p, *c.q, int(c.degenerate)) for c in chords]


def _pk_rate(s: BodyState) -> float:
    """Numerator of d(P/K)/dtau, specific units: P'K - P K'."""
    acc = acceleration(s)
    kin = 0.5 * float(np.sum(s.v * s.v))
    pot = 0.0
    dpot = 0.0
    for i, j in ((0, 1), (0, 2), (1, 2)):
        d = s.r[i] - s.r[j]
        w = s.v[i] - s.v[j]
        dist = float(np.hypot(*d))
        pot -= 1.0 / (3.0 * dist)
        dpot += float(d @ w) / (3.0 * dist ** 3)
    dkin = float(np.sum(s.v * acc))
    return dpot * kin - pot * dkin


def pk_ratio(r, v) -> np.ndarray:
    """|potential| / kinetic for arrays of positions/velocities (..., 3, 2)."""
    r = np.asarray(r)
    v = np.asarray(v)
    kin = 0.5 * np.sum(v * v, axis=(-1, -2))
    pot = np.sum(1.0 / pair_distances(r), axis=-1) / 3.0
    return pot / kin


def energy_ratio_series(traj: Trajectory, grid_step_deg: float = DEFAULT_GRID_DEG) -> DiagramCurve:
    """P/K on the grid; refined extrema in ``marks['extrema']`` as (tau_deg, value, 'min'|'max')."""
    _require_period(traj)
    tau = traj.grid(grid_step_deg)
    ys = traj.flat(tau)
    ratio = pk_ratio(ys[:, :6].reshape(-1, 3, 2), ys[:, 6:].reshape(-1, 3, 2))
    lo, hi = _period_window(traj)
    extrema = []
    for t, s in locate_event(traj, EventLocator(_pk_rate), lo, min(hi, traj.tau_end)):
        val = float(pk_ratio(s.r, s.v))
        # _pk_rate is the derivative of -|P|/K up to a positive factor
        kind = "max" if _pk_rate(traj.state(min(t + 1e-4, traj.tau_end))) > 0 else "min"
        extrema.append((math.degrees(t), val, kind))
    marks = {
        "extrema": extrema,
        "min": min((e for e in extrema), key=lambda e: e[1]),
        "max": max((e for e in extrema), key=lambda e: e[1]),
    }
    return DiagramCurve("pk_ratio", None, tau, ratio, marks=marks)


def angular_momentum_series(traj: Trajectory, grid_step_deg: float = DEFAULT_GRID_DEG):
    """(tau, L) with L of shape (n, 3): r_i x v_i per unit body mass."""
    tau = traj.grid(grid_step_deg)
    ys = traj.flat(tau)
    r = ys[:, :6].reshape(-1, 3, 2)
    v = ys[:, 6:].reshape(-1, 3, 2)
    return tau, _cross(r, v)


def max_radius(traj: Trajectory, particle: int = 1) -> tuple[float, float]:
    """(largest |r| over the run, tau in degrees), refined at the zeros of r.v."""
    i = particle_index(particle)
    best = (float(np.hypot(*traj.state(traj.tau_start).r[i])), math.degrees(traj.tau_start))
    for t, s in _events(traj, lambda s: float(s.r[i] @ s.v[i])):
        best = max(best, (float(np.hypot(*s.r[i])), t))
    return best


@dataclass(frozen=True)
class ArclengthResult:
    total: float
    a: float
    tau: np.ndarray
    s: np.ndarray
    total_coarse: float

    @property
    def normalized(self) -> float:
        """Length per 2a, a being the largest distance from the origin."""
        return self.total / (2.0 * self.a)

    @property
    def resolution_gap(self) -> float:
        return abs(self.total - self.total_coarse)


def _speed(traj: Trajectory, i: int, tau) -> np.ndarray:
    v = traj.velocities(tau)[:, i]
    return np.hypot(v[:, 0], v[:, 1])


def arclength(traj: Trajectory, particle: int = 1, n: int = 7200,
              grid_step_deg: float = DEFAULT_GRID_DEG) -> ArclengthResult:
    """Length of the curve traced by one body over one period.

    The total is the trapezoid rule on ``n`` uniform points of the period
    (spectrally accurate for a periodic integrand); ``total_coarse`` repeats
    it with n/2 points. ``s`` is the cumulative Simpson integral on the grid.
    """
    _require_period(traj)
    i = particle_index(particle)
    lo = traj.tau_start

    def periodic_trapezoid(m):
        t = lo + np.arange(m) * (TWO_PI / m)
        return float(np.sum(_speed(traj, i, t)) * TWO_PI / m)

    total = periodic_trapezoid(n)
    coarse = periodic_trapezoid(n // 2)
    tau = traj.grid(grid_step_deg)
    s = cumulative_simpson(_speed(traj, i, tau), x=tau, initial=0.0)
    a, _ = max_radius(traj, particle)
    return ArclengthResult(total, a, tau, s, coarse)


def partial_arclength(traj: Trajectory, particle: int, from_deg: float, to_deg: float, n: int = 2001) -> float:
    """Length travelled by one body between two instants (composite Simpson)."""
    i = particle_index(particle)
    t = np.linspace(math.radians(from_deg), math.radians(to_deg), n)
    from scipy.integrate import simpson

    return float(simpson(_speed(traj, i, t), x=t))


def _pedal_ratio_at(state: BodyState, i: int, a: float, puncture_radius: float = 0.0) -> float:
    x, y = state.r[i] / a
    vx, vy = state.v[i]
    r = math.hypot(x, y)
    if r < max(puncture_radius, 1e-6):
        return math.nan
    p = abs(x * vy - y * vx) / math.hypot(vx, vy)
    return p / r ** 3


def pedal_ratio_series(traj: Trajectory, particle: int = 1, grid_step_deg: float = DEFAULT_GRID_DEG,
                       window_deg=(0.0, 90.0), puncture_radius: float = 0.05) -> DiagramCurve:
    """p / r^3 on the orbit rescaled so that the largest |r| is 1.

    p is the distance from the origin to the tangent line. Samples with
    rescaled r below ``puncture_radius`` are NaN: both p and r^3 vanish at the
    origin passage and their ratio is lost in rounding there. Within
    ``window_deg`` the refined global minimum and the interior relative maxima
    are stored in ``marks`` as (tau_deg, value, polar angle deg) triples.
    """
    _require_period(traj)
    i = particle_index(particle)
    a, _ = max_radius(traj, particle)
    tau = traj.grid(grid_step_deg)
    ys = traj.flat(tau)
    vals = np.array([_pedal_ratio_at(BodyState.from_flat(t, y), i, a, puncture_radius) for t, y in zip(tau, ys)])

    def f(t):
        return _pedal_ratio_at(traj.state(t), i, a)

    lo, hi = (traj.tau_start + math.radians(w) for w in window_deg)
    sel = np.where((tau > lo) & (tau < hi) & np.isfinite(vals))[0]
    minima, maxima = [], []
    for k in sel:
        if k - 1 not in sel or k + 1 not in sel:
            continue
        left, mid, right = vals[k - 1], vals[k], vals[k + 1]
        if mid < left and mid <= right:
            res = minimize_scalar(f, bounds=(tau[k - 1], tau[k + 1]), method="bounded", options={"xatol": 1e-11})
            minima.append(_pedal_mark(traj, i, res.x, res.fun))
        elif mid > left and mid >= right:
            res = minimize_scalar(lambda t: -f(t), bounds=(tau[k - 1], tau[k + 1]), method="bounded",
                                  options={"xatol": 1e-11})
            maxima.append(_pedal_mark(traj, i, res.x, -res.fun))
    marks = {
        "minima": minima,
        "maxima": maxima,
        "min": min(minima, key=lambda m: m[1]) if minima else None,
        "relative_max": max(maxima, key=lambda m: m[1]) if maxima else None,
        "a": a,
    }
    return DiagramCurve("pedal_ratio", particle, tau, vals, marks=marks)


def _pedal_mark(traj, i, t, value):
    r = traj.state(t).r[i]
    return (math.degrees(t), float(value), math.degrees(math.atan2(r[1], r[0])))


@dataclass(frozen=True)
class DsDrComparison:
    m: float
    tau: np.ndarray
    r: np.ndarray
    measured: np.ndarray
    model: np.ndarray
    breakdown: np.ndarray

    @property
    def residual(self) -> np.ndarray:
        return self.measured - self.model

    @property
    def max_abs_residual(self) -> float:
        """Largest |residual| away from the flagged breakdown zone."""
        return float(np.max(np.abs(self.residual[~self.breakdown])))

    @property
    def tau_deg(self):
        return np.degrees(self.tau)


def ds_dr_comparison(traj: Trajectory, m: float, from_deg: float = 90.0, to_deg: float = 180.0,
                     particle: int = 1, grid_step_deg: float = DEFAULT_GRID_DEG,
                     breakdown_ratio: float = 0.2) -> DsDrComparison:
    """ds/dr measured on the orbit against the radical-family model for parameter m.

    Measured: ds/dr = |v| r / (x vx + y vy). The orbit is rescaled so the
    largest |r| is 1. Endpoints are dropped (r = 0 and dr = 0); samples whose
    radial speed is below ``breakdown_ratio`` times the speed are flagged.
    Raises DomainError if r is not monotone on the window.
    """
    from choreo8.curves import radical_family_ds_dr

    i = particle_index(particle)
    a, _ = max_radius(traj, particle)
    n = int(round((to_deg - from_deg) / grid_step_deg))
    tau = np.radians(np.linspace(from_deg, to_deg, n + 1))[1:-1] + traj.tau_start
    ys = traj.flat(tau)
    pos = ys[:, 2 * i:2 * i + 2] / a
    vel = ys[:, 6 + 2 * i:8 + 2 * i]
    r = np.hypot(pos[:, 0], pos[:, 1])
    dr = np.diff(r)
    if not (np.all(dr > 0) or np.all(dr < 0)):
        raise DomainError("r is not monotone on the requested window")
    speed = np.hypot(vel[:, 0], vel[:, 1])
    radial = np.sum(pos * vel, axis=1) / r
    measured = speed / radial
    if np.all(dr < 0):
        measured = -measured
    if np.any(r >= 1.0):
        raise DomainError("window reaches r = 1 where ds/dr diverges")
    model = np.array([radical_family_ds_dr(m, x) for x in r])
    breakdown = np.abs(radial) < breakdown_ratio * speed
    return DsDrComparison(m, tau, r, measured, model, breakdown)


def best_radical_m(traj: Trajectory, m_values=None, **kwargs) -> tuple[float, float]:
    """(m, max |residual|) minimizing the unflagged residual over a scan of m."""
    if m_values is None:
        m_values = np.round(np.arange(1.0, 1.5 + 5e-4, 1e-3), 6)
    base = ds_dr_comparison(traj, 1.0, **kwargs)
    from choreo8.curves import radical_family_ds_dr

    best = (math.inf, math.nan)
    keep = ~base.breakdown
    for m in m_values:
        model = np.array([radical_family_ds_dr(m, x) for x in base.r[keep]])
        err = float(np.max(np.abs(base.measured[keep] - model)))
        best = min(best, (err, float(m)))
    return best[1], best[0]


def collinear_radius_identity(traj: Trajectory, series: SeparationSeries | None = None,
                              events=None) -> tuple[float, float]:
    """(l_max, twice the outer radius at the nearest collinear event).

    The outer radius is the mean distance of the two end bodies from the
    origin; the origin lies between them on the line.
    """
    series = separations(traj) if series is None else series
    events = find_configurations(traj) if events is None else events
    col = [e for e in events if e.kind is ConfigKind.COLLINEAR]
    ev = min(col, key=lambda e: abs(((e.tau - series.tau_l_max + 180.0) % 360.0) - 180.0))
    st = traj.state(ev.tau_rad)
    s = ev.special_particle - 1
    radii = [float(np.hypot(*st.r[o])) for o in range(3) if o != s]
    return series.l_max, float(sum(radii))


def point_reflection_deviation(traj: Trajectory, n: int = 121) -> tuple[float, float]:
    """(worst position, worst velocity) mismatch of the orbit with its point reflection.

    The figure-8 maps onto itself under (x, y) -> (-x, -y) with time reversed
    and bodies 2, 3 swapped: r(pi - tau) = -r(tau), v(pi - tau) = v(tau). For
    each sample tau, tau' is the instant near pi - tau that best matches the
    reflected positions; the position and velocity differences there are
    recorded.
    """
    _require_period(traj)
    worst_r = worst_v = 0.0
    perm = [0, 2, 1]
    for t in traj.tau_start + np.linspace(0.0, TWO_PI, n, endpoint=False):
        s = traj.state(t)
        target_r = -s.r[perm]

        def dist(q, target_r=target_r):
            return float(np.abs(q.r - target_r).max())

        d, tp = _best_match(dist, traj, 2 * traj.tau_start + math.pi - t)
        lo = traj.tau_start
        q = traj.state(min(lo + (tp - lo) % TWO_PI, traj.tau_end))
        worst_r = max(worst_r, d)
        worst_v = max(worst_v, float(np.abs(q.v - s.v[perm]).max()))
    return worst_r, worst_v
