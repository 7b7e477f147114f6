"""Equal-mass planar three-body dynamics in normalized units.

Units: lengths in fractions of a reference length R, time as the angle
tau = sqrt(G m / R^3) t (one period of the figure-8 is 2 pi), G * m_total = 1,
each body has mass 1/3.

Two energy conventions are used and kept apart:

* ``EnergyBreakdown`` holds system totals with the masses (1/3 each) included.
* ``IntegralReport`` and the ``specific_*`` accessors are per unit body mass,
  which is the energy in units of G m / R. The tabulated figure-8 energy
  E = -0.6215955544 is in this convention (3x the system total).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from choreo8 import kernels

BODY_MASS = 1.0 / 3.0
G_SI = 6.674e-11

# Published isosceles start, 6 decimals.
PUBLISHED_R = ((0.746156, 0.0), (-0.373078, 0.238313), (-0.373078, -0.238313))
PUBLISHED_V = ((0.0, 0.324677), (0.764226, -0.162339), (-0.764226, -0.162339))
PUBLISHED_ENERGY = -0.6215955544


class SingularityError(ValueError):
    """Two bodies share a position."""


class ConstraintError(ValueError):
    """Inputs violate the zero angular momentum relation of the isosceles family."""


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


@dataclass(frozen=True)
class BodyState:
    """Positions and velocities of the three bodies at normalized time ``tau``.

    ``r`` and ``v`` are (3, 2) arrays; they are copied and made read-only.
    """

    tau: float
    r: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        r = np.array(self.r, dtype=float).reshape(3, 2)
        v = np.array(self.v, dtype=float).reshape(3, 2)
        r.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "tau", float(self.tau))

    @classmethod
    def from_flat(cls, tau, y) -> BodyState:
        y = np.asarray(y, dtype=float)
        return cls(tau, y[:6].reshape(3, 2), y[6:12].reshape(3, 2))

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate([self.r.ravel(), self.v.ravel()])

    def relabel(self, shift: int) -> BodyState:
        """Cyclically relabel bodies: new body i is old body i + shift (mod 3)."""
        idx = [(i + shift) % 3 for i in range(3)]
        return BodyState(self.tau, self.r[idx], self.v[idx])

    def reflect(self) -> BodyState:
        """Point reflection through the origin."""
        return BodyState(self.tau, -self.r, -self.v)


@dataclass(frozen=True)
class IntegralReport:
    """First integrals per unit body mass."""

    com: np.ndarray
    momentum: np.ndarray
    ang_momentum: float
    energy: float

    def max_deviation(self) -> float:
        """Largest violation among the three quantities that must vanish."""
        return max(
            float(np.linalg.norm(self.com)),
            float(np.linalg.norm(self.momentum)),
            abs(self.ang_momentum),
        )


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic_per_particle: tuple[float, float, float]
    kinetic_total: float
    potential_total: float
    total: float
    pk_ratio: float

    @property
    def specific_kinetic(self) -> float:
        return self.kinetic_total / BODY_MASS

    @property
    def specific_potential(self) -> float:
        return self.potential_total / BODY_MASS

    @property
    def specific_total(self) -> float:
        return self.total / BODY_MASS


@dataclass(frozen=True)
class UnitSystem:
    """Physical scale for the normalized solution.

    Attributes
    ----------
    R : float
        Reference length in meters.
    m_total : float
        Total mass of the three bodies in kg (each body carries a third).
    G : float
        Gravitational constant in m^3 kg^-1 s^-2.
    """

    R: float
    m_total: float
    G: float = G_SI

    def __post_init__(self):
        if not (self.R > 0 and self.m_total > 0 and self.G > 0):
            raise ValueError("R, m_total and G must be positive")

    @classmethod
    def from_gm(cls, R: float, gm: float, G: float = G_SI) -> UnitSystem:
        """Build from a gravitational parameter G*m_total (m^3/s^2)."""
        return cls(R=R, m_total=gm / G, G=G)

    @property
    def gm(self) -> float:
        return self.G * self.m_total

    @property
    def particle_mass(self) -> float:
        return self.m_total / 3.0

    @property
    def period_s(self) -> float:
        return denormalize(self, "time", 2 * math.pi)


def load_unit_system(path) -> UnitSystem:
    """Read a UnitSystem from JSON with keys ``R_m``, ``m_total_kg`` and optional ``G``."""
    data = json.loads(Path(path).read_text())
    try:
        return UnitSystem(R=float(data["R_m"]), m_total=float(data["m_total_kg"]),
                          G=float(data.get("G", G_SI)))
    except KeyError as exc:
        raise ValueError(f"unit system config missing key {exc}") from None


_SCALES = {
    "length": lambda u: u.R,
    "time": lambda u: math.sqrt(u.R ** 3 / u.gm),
    "velocity": lambda u: math.sqrt(u.gm / u.R),
    "acceleration": lambda u: u.gm / u.R ** 2,
    "angular momentum": lambda u: math.sqrt(u.gm * u.R),
    "energy": lambda u: u.gm / u.R,
}
QUANTITY_KINDS = tuple(_SCALES)


def denormalize(unit_system: UnitSystem, quantity_kind: str, normalized_value):
    """Convert a normalized value to SI.

    Angular momentum and energy come out per unit mass (m^2/s and J/kg).
    """
    kind = quantity_kind.replace("_", " ").lower()
    if kind not in _SCALES:
        raise ValueError(f"unknown quantity kind {quantity_kind!r}; expected one of {QUANTITY_KINDS}")
    return normalized_value * _SCALES[kind](unit_system)


def isosceles_family_state(x0, y0, v0, vx0, delta=0.0, delta_v=0.0, tol=1e-6) -> BodyState:
    """Isosceles-type start with body 1 on the +x axis moving along +y.

    Body 1 at (x0, 0) with velocity (0, v0); bodies 2 and 3 at
    (-x0/2 +- delta, +-y0) with velocities (+-vx0, -v0/2 +- delta_v).
    Zero angular momentum requires ``vx0*y0 = 3*(v0/2)*(x0/2) + delta*delta_v``.
    A violation larger than ``tol`` raises ConstraintError; a smaller one is
    absorbed by recomputing vx0 from the relation, so the returned state has
    zero angular momentum to rounding.
    """
    if y0 == 0:
        raise ConstraintError("y0 must be nonzero")
    target = 3.0 * (v0 / 2.0) * (x0 / 2.0) + delta * delta_v
    residual = vx0 * y0 - target
    if abs(residual) > tol:
        raise ConstraintError(
            f"angular momentum relation violated: vx0*y0 - 3(v0/2)(x0/2) - delta*delta_v = {residual:.3e}"
        )
    vx0 = target / y0
    r = [(x0, 0.0), (-x0 / 2 + delta, y0), (-x0 / 2 - delta, -y0)]
    v = [(0.0, v0), (vx0, -v0 / 2 + delta_v), (-vx0, -v0 / 2 - delta_v)]
    return BodyState(0.0, r, v)


def published_initial_state() -> BodyState:
    """The six-decimal start exactly as printed (inconsistent in v2x/v3x, see canonical)."""
    return BodyState(0.0, PUBLISHED_R, PUBLISHED_V)


def canonical_initial_state() -> BodyState:
    """Isosceles start of the figure-8 at tau = 0.

    Positions are the published six-decimal values. The printed
    vx0 = .764226 violates zero angular momentum by 4e-4, so both velocity
    magnitudes are solved from the two published constraints instead:
    zero angular momentum and the specific energy -0.6215955544. This gives
    v0 = .3246779 (printed .324677) and vx0 = .7624228.
    """
    x0, _ = PUBLISHED_R[0]
    _, y0 = PUBLISHED_R[1]
    r = np.array(PUBLISHED_R)
    potential = -sum(1.0 / np.linalg.norm(r[i] - r[j]) for i, j in ((0, 1), (0, 2), (1, 2))) / 3.0
    kinetic = PUBLISHED_ENERGY - potential
    # kinetic = (3/4) v0^2 + vx0^2 with vx0 = c v0
    c = 3.0 * x0 / (4.0 * y0)
    v0 = math.sqrt(kinetic / (0.75 + c * c))
    return isosceles_family_state(x0, y0, v0, c * v0)


# widely used 8-digit figure-8 values in G = m = 1 units (each body mass 1):
# collinear instant: bodies at +REF_X1, 0, -REF_X1, the middle one with velocity REF_V2
REF_X1 = (0.97000436, -0.24308753)
REF_V2 = (-0.93240737, -0.86473146)
REF_PERIOD = 6.32591398


def reference_collinear_state() -> BodyState:
    """The 8-digit literature start, rescaled to period 2 pi and total mass 1.

    Placed at tau = pi / 6 and mirrored in x so that integrating back to
    tau = 0 lands on an isosceles start with body 1 near (+.746, 0) moving
    along +y, like the canonical state. Used as a higher-precision oracle.
    """
    mu = 2.0 * math.pi / REF_PERIOD
    lam = (mu * mu / 3.0) ** (1.0 / 3.0)  # length scale for G m_total = 1
    mirror = np.array([1.0, -1.0])
    x1 = np.array(REF_X1) * mirror
    v2 = np.array(REF_V2) * mirror
    r = np.array([x1, np.zeros(2), -x1]) * lam
    v = np.array([v2 / 2.0, -v2, v2 / 2.0]) * lam / mu
    return BodyState(math.pi / 6.0, r, v)


def particle_index(particle: int) -> int:
    """0-based array index for a body label 1, 2 or 3."""
    if particle not in (1, 2, 3):
        raise ValueError(f"particle label must be 1, 2 or 3, got {particle!r}")
    return particle - 1


def _check_distinct(r):
    for i, j in ((0, 1), (0, 2), (1, 2)):
        if r[i, 0] == r[j, 0] and r[i, 1] == r[j, 1]:
            raise SingularityError(f"bodies {i + 1} and {j + 1} coincide")


def acceleration(state: BodyState) -> np.ndarray:
    """(3, 2) gravitational accelerations, a_i = sum_j (1/3)(r_j - r_i)/|r_j - r_i|^3."""
    _check_distinct(state.r)
    return kernels.accelerations(np.ascontiguousarray(state.r.ravel())).reshape(3, 2)


def jerk(state: BodyState) -> np.ndarray:
    """(3, 2) time derivative of the accelerations."""
    _check_distinct(state.r)
    j = np.zeros((3, 2))
    for a, b in ((0, 1), (0, 2), (1, 2)):
        d = state.r[b] - state.r[a]
        w = state.v[b] - state.v[a]
        d2 = d @ d
        term = BODY_MASS * (w / d2 ** 1.5 - 3.0 * (d @ w) * d / d2 ** 2.5)
        j[a] += term
        j[b] -= term
    return j


def pair_distances(r) -> np.ndarray:
    """Separations (r12, r23, r31) for positions of shape (..., 3, 2)."""
    r = np.asarray(r)
    return np.stack([
        np.linalg.norm(r[..., 0, :] - r[..., 1, :], axis=-1),
        np.linalg.norm(r[..., 1, :] - r[..., 2, :], axis=-1),
        np.linalg.norm(r[..., 2, :] - r[..., 0, :], axis=-1),
    ], axis=-1)


def specific_energy(r, v):
    """Energy per unit body mass; vectorized over leading axes of (..., 3, 2) inputs."""
    r = np.asarray(r)
    v = np.asarray(v)
    kinetic = 0.5 * np.sum(v * v, axis=(-1, -2))
    potential = -np.sum(1.0 / pair_distances(r), axis=-1) / 3.0
    return kinetic + potential


def first_integrals(state: BodyState) -> IntegralReport:
    r, v = state.r, state.v
    return IntegralReport(
        com=r.sum(axis=0) / 3.0,
        momentum=v.sum(axis=0),
        ang_momentum=float(np.sum(_cross(r, v))),
        energy=float(specific_energy(r, v)),
    )


def energies(state: BodyState) -> EnergyBreakdown:
    """System-total energies in normalized units (masses 1/3 included).

    pk_ratio is inf for a state at rest.
    """
    _check_distinct(state.r)
    kin = tuple(float(0.5 * BODY_MASS * (vi @ vi)) for vi in state.v)
    kinetic = sum(kin)
    potential = -float(np.sum(BODY_MASS * BODY_MASS / pair_distances(state.r)))
    return EnergyBreakdown(
        kinetic_per_particle=kin,
        kinetic_total=kinetic,
        potential_total=potential,
        total=kinetic + potential,
        pk_ratio=-potential / kinetic if kinetic > 0 else math.inf,
    )


@dataclass(frozen=True)
class CenterOfGravity:
    """Point where a mass 2*m_total/3 reproduces the acceleration of one body.

    When the acceleration vanishes the point is at infinity and
    ``direction`` is the unit vector of the asymptote along which it escapes.
    """

    point: np.ndarray | None
    direction: np.ndarray
    at_infinity: bool = False
    distance: float = field(default=math.inf)

    @property
    def direction_deg(self) -> float:
        return math.degrees(math.atan2(self.direction[1], self.direction[0]))

    @property
    def asymptote_deg(self) -> float:
        """Direction of the asymptote as a line angle in (-90, 90]."""
        return line_angle_deg(self.direction)


def line_angle_deg(vec) -> float:
    """Angle of the undirected line along ``vec`` in (-90, 90] degrees."""
    ang = math.degrees(math.atan2(vec[1], vec[0]))
    if ang > 90.0:
        ang -= 180.0
    elif ang <= -90.0:
        ang += 180.0
    return ang


def center_of_gravity(state: BodyState, particle: int, zero_tol: float = 1e-8) -> CenterOfGravity:
    """COG seen by body ``particle`` (labels 1, 2, 3).

    P = r_i + d * a_hat with d = sqrt((2/3) / |a_i|). Below ``zero_tol`` the
    acceleration is treated as zero and the asymptote direction is taken from
    the jerk: just before the zero, a ~ -jerk * dt.
    """
    i = particle_index(particle)
    a = acceleration(state)[i]
    mag = float(np.hypot(*a))
    if mag < zero_tol:
        j = jerk(state)[i]
        direction = -j / np.hypot(*j)
        return CenterOfGravity(point=None, direction=direction, at_infinity=True)
    unit = a / mag
    d = math.sqrt((2.0 / 3.0) / mag)
    return CenterOfGravity(point=state.r[i] + d * unit, direction=unit, distance=d)


def acceleration_from_cog(position, cog_point) -> np.ndarray:
    """Acceleration a mass 2/3 at ``cog_point`` exerts at ``position``."""
    d = np.asarray(cog_point) - np.asarray(position)
    return (2.0 / 3.0) * d / np.hypot(*d) ** 3
