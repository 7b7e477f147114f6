"""Dense-output integration of the figure-8 and root-refined event location."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from choreo8 import kernels
from choreo8.dynamics import BodyState, reference_collinear_state, specific_energy
from choreo8.io import write_csv

TWO_PI = 2.0 * math.pi
# Caps the DOP853 step so the 7th-order interpolant stays within ~10*tol of the
# equations of motion at tol 1e-12; uncapped steps (~0.05) give ~5e-10.
DEFAULT_MAX_STEP = 0.02
STATE_COLUMNS = ("r1x", "r1y", "r2x", "r2y", "r3x", "r3y",
                 "v1x", "v1y", "v2x", "v2y", "v3x", "v3y")


class IntegrationError(RuntimeError):
    """The adaptive integrator stopped early (usually a near-collision)."""

    def __init__(self, message: str, tau_reached: float):
        super().__init__(f"{message} (reached tau = {tau_reached:.9g})")
        self.tau_reached = tau_reached


@dataclass(frozen=True)
class Trajectory:
    """Adaptive nodes plus a continuous evaluator over [tau_start, tau_end].

    ``taus`` are strictly increasing; ``states`` has one flat 12-vector per node.
    """

    taus: np.ndarray
    states: np.ndarray
    tol: float
    _dense: Callable | None = None

    @property
    def tau_start(self) -> float:
        return float(self.taus[0])

    @property
    def tau_end(self) -> float:
        return float(self.taus[-1])

    @property
    def span(self) -> float:
        return self.tau_end - self.tau_start

    def __len__(self):
        return len(self.taus)

    def flat(self, tau) -> np.ndarray:
        """Interpolated flat state(s); shape (12,) for scalar tau, (n, 12) for arrays."""
        tau_arr = np.asarray(tau, dtype=float)
        lo, hi = self.tau_start, self.tau_end
        slack = 1e-12 * max(1.0, abs(hi))
        if np.any(tau_arr < lo - slack) or np.any(tau_arr > hi + slack):
            raise ValueError(f"tau outside trajectory span [{lo}, {hi}]")
        if self._dense is None:
            out = np.broadcast_to(self.states[0], tau_arr.shape + (12,)).copy()
        else:
            out = np.asarray(self._dense(np.clip(tau_arr, lo, hi)))
            out = np.moveaxis(out, 0, -1) if tau_arr.ndim else out
        return out

    def state(self, tau: float) -> BodyState:
        return BodyState.from_flat(tau, self.flat(float(tau)))

    def positions(self, tau) -> np.ndarray:
        """Positions (n, 3, 2) on an array of taus."""
        return self.flat(np.atleast_1d(tau))[:, :6].reshape(-1, 3, 2)

    def velocities(self, tau) -> np.ndarray:
        return self.flat(np.atleast_1d(tau))[:, 6:].reshape(-1, 3, 2)

    def node_states(self):
        for t, y in zip(self.taus, self.states):
            yield BodyState.from_flat(t, y)

    def grid(self, step_deg: float = 0.1) -> np.ndarray:
        """Uniform tau grid (radians) of the given step in degrees, endpoints included."""
        n = int(round(math.degrees(self.span) / step_deg))
        if n == 0:
            return np.array([self.tau_start])
        return self.tau_start + np.arange(n + 1) * math.radians(step_deg)

    def to_csv(self, path, grid_step_deg: float = 0.1):
        """Write ``tau`` (degrees) plus the 12 state columns on a uniform grid."""
        taus = self.grid(grid_step_deg)
        # last row exactly at the trajectory end
        taus[-1] = min(taus[-1], self.tau_end)
        ys = self.flat(taus).reshape(-1, 12)
        rows = np.column_stack([np.degrees(taus), ys])
        write_csv(path, ("tau",) + STATE_COLUMNS, rows)


def integrate(initial: BodyState, tau_end: float, tol: float = 1e-12,
              max_step: float = DEFAULT_MAX_STEP) -> Trajectory:
    """Integrate with the 8th-order Dormand-Prince pair (DOP853) and dense output.

    ``tol`` is used as both relative and absolute tolerance.
    """
    if not (1e-14 <= tol <= 1e-6):
        raise ValueError("tol must lie in [1e-14, 1e-6]")
    t0 = initial.tau
    y0 = initial.flat
    if tau_end == t0:
        return Trajectory(np.array([t0]), y0[None, :], tol)
    sol = solve_ivp(kernels.derivative, (t0, tau_end), y0, method="DOP853",
                    rtol=tol, atol=tol, dense_output=True, max_step=max_step)
    if sol.status != 0:
        raise IntegrationError(sol.message, float(sol.t[-1]))
    taus, states = sol.t, sol.y.T
    if tau_end < t0:
        taus, states = taus[::-1], states[::-1]
    return Trajectory(np.ascontiguousarray(taus), np.ascontiguousarray(states), tol, sol.sol)


def integrate_rk4(initial: BodyState, tau_end: float, h: float = 1e-5, stride: int = 1) -> Trajectory:
    """Fixed-step classical RK4 reference run.

    The step is shrunk so an integer number of steps lands exactly on ``tau_end``.
    Returned nodes are every ``stride``-th step plus the final one; between
    nodes the state is a cubic Hermite interpolant using the exact derivative.
    """
    span = tau_end - initial.tau
    nsteps = max(1, int(math.ceil(abs(span) / h)))
    step = span / nsteps
    ys = kernels.rk4_fixed(np.ascontiguousarray(initial.flat), step, nsteps, stride)
    idx = np.arange(0, nsteps + 1, stride)
    if nsteps % stride:
        idx = np.append(idx, nsteps)
    taus = initial.tau + idx * step
    if span < 0:
        taus, ys = taus[::-1], ys[::-1]
    taus, ys = np.ascontiguousarray(taus), np.ascontiguousarray(ys)
    dense = None
    if len(taus) > 1:
        dys = np.array([kernels.derivative(0.0, y) for y in ys])
        spline = CubicHermiteSpline(taus, ys, dys, axis=0)
        dense = lambda t: np.moveaxis(spline(t), -1, 0)  # noqa: E731  match OdeSolution layout
    return Trajectory(taus, ys, 0.0, dense)


def reference_initial_state(tol: float = 1e-13) -> BodyState:
    """The 8-digit reference start carried back from its collinear instant to tau = 0."""
    s = reference_collinear_state()
    return integrate(s, 0.0, tol=tol).state(0.0)


@dataclass(frozen=True)
class EventLocator:
    """A scalar predicate of a BodyState whose sign change marks an event.

    ``direction``: +1 rising only, -1 falling only, 0 any.
    """

    predicate: Callable[[BodyState], float]
    direction: int = 0
    refinement_tol: float = 1e-13

    def __post_init__(self):
        if not self.refinement_tol > 0:
            raise ValueError("refinement_tol must be positive")
        if self.direction not in (-1, 0, 1):
            raise ValueError("direction must be -1, 0 or 1")


def _scan_grid(traj: Trajectory, lo: float, hi: float, per_step: int) -> np.ndarray:
    nodes = traj.taus[(traj.taus > lo) & (traj.taus < hi)]
    knots = np.concatenate([[lo], nodes, [hi]])
    pieces = [np.linspace(a, b, per_step, endpoint=False) for a, b in zip(knots[:-1], knots[1:])]
    return np.concatenate(pieces + [[hi]])


def locate_event(traj: Trajectory, locator: EventLocator, from_tau: float | None = None,
                 to_tau: float | None = None, per_step: int = 8):
    """All sign changes of the predicate in [from_tau, to_tau], refined by Brent's method.

    The predicate is scanned on ``per_step`` points per integration step, each
    bracket is refined to ``locator.refinement_tol``. Exact zeros on scan points
    (e.g. at the window edge) count as events. Returns (tau, BodyState) pairs in
    increasing tau.
    """
    lo = traj.tau_start if from_tau is None else from_tau
    hi = traj.tau_end if to_tau is None else to_tau
    if lo < traj.tau_start - 1e-12 or hi > traj.tau_end + 1e-12 or hi < lo:
        raise ValueError("event window outside trajectory span")

    def g(t):
        return float(locator.predicate(traj.state(t)))

    ts = _scan_grid(traj, lo, hi, per_step)
    vals = np.array([g(t) for t in ts])
    found = []
    for k in range(len(ts)):
        fa = vals[k]
        if fa == 0.0:
            before = vals[k - 1] if k > 0 else None
            after = vals[k + 1] if k + 1 < len(ts) else None
            slope = (after if after is not None else 0.0) - (before if before is not None else 0.0)
            if _direction_ok(locator.direction, slope):
                found.append(ts[k])
            continue
        if k + 1 == len(ts):
            break
        fb = vals[k + 1]
        if fb == 0.0 or fa * fb > 0:
            continue
        if not _direction_ok(locator.direction, fb - fa):
            continue
        found.append(brentq(g, ts[k], ts[k + 1], xtol=locator.refinement_tol, rtol=4 * np.finfo(float).eps))
    found = sorted(set(float(t) for t in found))
    return [(t, traj.state(t)) for t in found]


def _direction_ok(direction: int, slope: float) -> bool:
    return direction == 0 or (direction > 0 and slope > 0) or (direction < 0 and slope < 0)


@dataclass(frozen=True)
class PeriodicityReport:
    closure_r: float
    closure_v: float
    cyclic_r: float | None
    cyclic_v: float | None
    span: float

    @property
    def closure(self) -> float:
        return max(self.closure_r, self.closure_v)

    @property
    def cyclic(self) -> float | None:
        if self.cyclic_r is None:
            return None
        return max(self.cyclic_r, self.cyclic_v)


def verify_periodicity(traj: Trajectory, n_check: int = 721) -> PeriodicityReport:
    """Closure of the run after its span and the one-third-period relabeling check.

    Closure is the largest per-body distance between start and end positions
    (and velocities). The cyclic check compares state(tau + 2pi/3), with body
    i + 1 relabeled as body i, against state(tau) on ``n_check`` points of
    [tau_start, tau_end - 2pi/3]; None when the span is shorter than 2pi/3.
    """
    a = traj.flat(traj.tau_start)
    b = traj.flat(traj.tau_end)
    closure_r = float(np.max(np.linalg.norm((b[:6] - a[:6]).reshape(3, 2), axis=1)))
    closure_v = float(np.max(np.linalg.norm((b[6:] - a[6:]).reshape(3, 2), axis=1)))
    third = TWO_PI / 3.0
    if traj.span < third - 1e-12:
        return PeriodicityReport(closure_r, closure_v, None, None, traj.span)
    taus = np.linspace(traj.tau_start, traj.tau_end - third, n_check)
    now = traj.flat(taus).reshape(-1, 2, 3, 2)  # (n, r/v, body, xy)
    later = traj.flat(np.minimum(taus + third, traj.tau_end)).reshape(-1, 2, 3, 2)
    later = later[:, :, [1, 2, 0], :]
    diff = np.linalg.norm(later - now, axis=-1)
    return PeriodicityReport(closure_r, closure_v, float(diff[:, 0].max()), float(diff[:, 1].max()), traj.span)


def energy_drift(traj: Trajectory) -> float:
    """Max |E(node) - E(start)| over the stored nodes (specific energy)."""
    r = traj.states[:, :6].reshape(-1, 3, 2)
    v = traj.states[:, 6:].reshape(-1, 3, 2)
    e = specific_energy(r, v)
    return float(np.max(np.abs(e - e[0])))
