"""Classical figure-eight curves and the tools used to compare them with the orbit.

Families: lemniscate of Bernoulli (LB), lemniscate of Gerono (LG),
hippopede of Proclus (HP), the hippopede with rescaled y (GHP) and the
ring-potential curve. ``a`` is always the largest |x| on the curve.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from choreo8.io import write_csv

# largest |x| of the three-body curve in normalized units
FIG8_A = 0.746156


class UnsupportedFormError(ValueError):
    """The family has no representation of the requested kind."""


class DomainError(ValueError):
    pass


class Family(str, enum.Enum):
    LB = "BernoulliLemniscate"
    LG = "GeronoLemniscate"
    HP = "Hippopede"
    GHP = "GeneralizedHippopede"
    RING = "RingPotential"

    @classmethod
    def parse(cls, name: str) -> "Family":
        aliases = {"lb": cls.LB, "lg": cls.LG, "hp": cls.HP, "ghp": cls.GHP, "ring": cls.RING}
        key = name.strip()
        if key.lower() in aliases:
            return aliases[key.lower()]
        return cls(key)


@dataclass(frozen=True)
class CurveSpec:
    """One member of a family.

    b is the y amplitude of the Gerono curve x = a cos t, y = b sin 2t
    (b = a/2 gives the lemniscate proper); k > 1 the hippopede shape; a_prime
    the y scale of the generalized hippopede.
    """

    family: Family
    a: float = 1.0
    b: float | None = None
    k: float | None = None
    a_prime: float | None = None

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("a must be positive")
        if self.family in (Family.HP, Family.GHP):
            if self.k is None or not self.k > 1.0:
                raise ValueError("hippopede requires k > 1")
        if self.family is Family.GHP and (self.a_prime is None or not self.a_prime > 0):
            raise ValueError("generalized hippopede requires a_prime > 0")
        if self.family is Family.LG and self.b is not None and not self.b > 0:
            raise ValueError("b must be positive")

    @property
    def rho(self) -> float:
        """y scale factor a'/a (1 except for the generalized hippopede)."""
        return self.a_prime / self.a if self.family is Family.GHP else 1.0

    @property
    def gerono_b(self) -> float:
        return self.a / 2.0 if self.b is None else self.b

    @property
    def branch_limit(self) -> float:
        """Largest polar angle (radians) on the real branch."""
        return math.radians(tangent_at_origin(self))

    @property
    def branch_limit_deg(self) -> float:
        return tangent_at_origin(self)


def lemniscate(a: float = 1.0) -> CurveSpec:
    return CurveSpec(Family.LB, a)


def hippopede(k: float, a: float = 1.0, a_prime: float | None = None) -> CurveSpec:
    if a_prime is None:
        return CurveSpec(Family.HP, a, k=k)
    return CurveSpec(Family.GHP, a, k=k, a_prime=a_prime)


@dataclass(frozen=True)
class CurvePoint:
    """A curve point with its polar form. ``on_branch`` is False at a puncture."""

    t: float
    point: np.ndarray
    r: float
    theta: float
    on_branch: bool = True

    @property
    def theta_deg(self) -> float:
        return math.degrees(self.theta)


def _point(t, x, y, on_branch=True) -> CurvePoint:
    return CurvePoint(float(t), np.array([x, y], dtype=float), math.hypot(x, y), math.atan2(y, x), on_branch)


def _xy(spec: CurveSpec, t: float) -> tuple[float, float] | None:
    a = spec.a
    if spec.family is Family.LB:
        s, c = math.sin(t), math.cos(t)
        den = 1.0 + s * s
        return a * c / den, a * c * s / den
    if spec.family is Family.LG:
        return a * math.cos(t), spec.gerono_b * math.sin(2.0 * t)
    if spec.family in (Family.HP, Family.GHP):
        q = 1.0 - (spec.k * math.sin(t)) ** 2
        if q < 0.0:
            return None
        r = a * math.sqrt(q)
        return r * math.cos(t), spec.rho * r * math.sin(t)
    raise UnsupportedFormError(f"{spec.family.value} has no parametric form")


def eval_parametric(spec: CurveSpec, t: float) -> CurvePoint:
    """Point of the curve for parameter t.

    LB and LG use their standard parameters; for the hippopedes t is the
    polar angle of the unscaled curve, real for |sin t| <= 1/k. Outside that
    range the origin is returned with ``on_branch=False``.
    """
    xy = _xy(spec, t)
    if xy is None:
        return CurvePoint(float(t), np.zeros(2), 0.0, float(t), on_branch=False)
    return _point(t, *xy)


def parameter_range(spec: CurveSpec) -> tuple[float, float]:
    """Parameter interval that traces the whole closed curve once.

    For the hippopedes the curve is traced by the two branches
    |t| <= t_m and |t - pi| <= t_m; use :func:`sample_curve` for those.
    """
    return 0.0, 2.0 * math.pi


def polar_radius(spec: CurveSpec, theta: float) -> float | None:
    """r >= 0 at polar angle theta, or None where the ray misses the curve."""
    a = spec.a
    c, s = math.cos(theta), math.sin(theta)
    if spec.family is Family.LB:
        q = math.cos(2.0 * theta)
        return a * math.sqrt(q) if q >= 0.0 else None
    if spec.family is Family.LG:
        if abs(c) < 1e-15:
            return None
        b = spec.gerono_b
        q = 1.0 - (a * math.tan(theta) / (2.0 * b)) ** 2
        return a * math.sqrt(q) / abs(c) if q >= 0.0 else None
    if spec.family is Family.HP:
        q = 1.0 - (spec.k * s) ** 2
        return a * math.sqrt(q) if q >= 0.0 else None
    if spec.family is Family.GHP:
        # point (R cos phi, rho R sin phi) of the unscaled hippopede
        phi = math.atan2(s, spec.rho * c)
        q = 1.0 - (spec.k * math.sin(phi)) ** 2
        if q < 0.0:
            return None
        big_r = a * math.sqrt(q)
        return big_r * math.hypot(math.cos(phi), spec.rho * math.sin(phi))
    raise UnsupportedFormError("the ring-potential curve has no polar form")


def ring_modulus_sq(x: float, y: float) -> float:
    d2 = (x + 1.0) ** 2 + y * y
    if d2 <= 0.0:
        raise DomainError("ring-potential curve undefined at (-1, 0)")
    k2 = 4.0 * x / d2
    if not 0.0 <= k2 < 1.0:
        raise DomainError(f"modulus k^2 = {k2:.6g} outside [0, 1)")
    return k2


def implicit_value(spec: CurveSpec, point) -> float:
    """Residual of the family's defining equation at ``point`` (0 on the curve)."""
    x, y = (float(v) for v in point)
    a = spec.a
    x2, y2 = x * x, y * y
    if spec.family is Family.LB:
        return (x2 + y2) ** 2 - a * a * (x2 - y2)
    if spec.family is Family.LG:
        b = spec.gerono_b
        # a^2 y^2 = 4 b^2 x^2 (1 - x^2 / a^2), scaled to x^4 - a^2 (x^2 - y^2) at b = a/2
        return (4.0 * b * b / (a * a)) * (x2 * x2 - a * a * x2) + a * a * y2
    if spec.family is Family.HP:
        return (x2 + y2) ** 2 - a * a * (x2 - (spec.k ** 2 - 1.0) * y2)
    if spec.family is Family.GHP:
        ap = spec.a_prime
        rx2 = spec.rho ** 2 * x2
        return (rx2 + y2) ** 2 - ap * ap * (rx2 - (spec.k ** 2 - 1.0) * y2)
    k2 = ring_modulus_sq(x, y)
    return elliptic_K(math.sqrt(k2)) / math.sqrt((x + 1.0) ** 2 + y2) - math.pi / 2.0


def tangent_at_origin(spec: CurveSpec) -> float:
    """Acute angle (degrees) of the two tangents at the double point."""
    if spec.family is Family.LB:
        return 45.0
    if spec.family is Family.LG:
        return math.degrees(math.atan(2.0 * spec.gerono_b / spec.a))
    if spec.family in (Family.HP, Family.GHP):
        return math.degrees(math.atan(spec.rho / math.sqrt(spec.k ** 2 - 1.0)))
    raise UnsupportedFormError("the ring-potential curve has no double point at the origin")


@dataclass(frozen=True)
class TangentDirection:
    """Tangent of LB at polar angle theta: the normal makes 3 theta with the x-axis."""

    slope: float
    normal_deg: float
    tangent_deg: float
    vertical_tangent: bool = False


def lb_tangent_direction(theta: float) -> TangentDirection:
    """Slope -1/tan(3 theta) of the lemniscate tangent; theta in radians.

    When 3 theta is a multiple of pi the normal is horizontal, the tangent
    vertical, and ``slope`` is inf with ``vertical_tangent`` set.
    """
    three = 3.0 * theta
    normal = math.degrees(three)
    t3 = math.tan(three)
    if abs(math.sin(three)) < 1e-15:
        return TangentDirection(math.inf, normal, normal + 90.0, True)
    return TangentDirection(-1.0 / t3, normal, normal + 90.0)


def tan3_identity(x: float) -> tuple[float, float]:
    """(tan 3x, -tan(x - 60 deg) tan x tan(x + 60 deg)); x in radians."""
    d = math.pi / 3.0
    return math.tan(3.0 * x), -math.tan(x - d) * math.tan(x) * math.tan(x + d)


@dataclass(frozen=True)
class CissoidPoint:
    r: float
    theta: float
    t: float
    point: np.ndarray


def cissoid_params(k: float, t_prime: float, a: float = 1.0) -> CissoidPoint:
    """Cissoid parameter t' to (r, theta) and to the standard parameter t.

    r = a cos t', sin theta = sin t' / k, and
    tan t = tan t' / sqrt(k^2 + (k^2 - 2) tan^2 t'), written with sines and
    cosines so that t' = pi/2 is regular. t is NaN where that root is imaginary
    (k^2 < 2 near t' = pi/2).
    """
    if not k > 1.0:
        raise ValueError("k must exceed 1")
    r = a * math.cos(t_prime)
    st = math.sin(t_prime)
    theta = math.asin(st / k)
    q = (k * math.cos(t_prime)) ** 2 + (k * k - 2.0) * st * st
    t = math.atan2(st, math.sqrt(q)) if q >= 0.0 else math.nan
    x = (a / k) * math.sqrt(k * k - st * st) * math.cos(t_prime)
    y = (a / k) * math.cos(t_prime) * st
    return CissoidPoint(r, theta, t, np.array([x, y]))


def _upper_arc(spec: CurveSpec):
    """phi -> point on the right lobe, upper half, for phi in [0, phi_m]."""
    if spec.family is Family.LB:
        k, rho = math.sqrt(2.0), 1.0
    elif spec.family in (Family.HP, Family.GHP):
        k, rho = spec.k, spec.rho
    else:
        raise UnsupportedFormError(f"{spec.family.value} is not a hippopede-type curve")
    phi_m = math.asin(1.0 / k)

    def point(phi):
        r = spec.a * math.sqrt(max(0.0, 1.0 - (k * math.sin(phi)) ** 2))
        return np.array([r * math.cos(phi), rho * r * math.sin(phi)])

    return point, phi_m


def _gradient(spec: CurveSpec, p) -> np.ndarray:
    x, y = p
    h = 1e-7 * spec.a
    gx = (implicit_value(spec, (x + h, y)) - implicit_value(spec, (x - h, y))) / (2 * h)
    gy = (implicit_value(spec, (x, y + h)) - implicit_value(spec, (x, y - h))) / (2 * h)
    return np.array([gx, gy])


def _implicit_coeffs(spec: CurveSpec):
    """(s, A, c) with the curve (s x^2 + y^2)^2 = A (s x^2 - c y^2)."""
    if spec.family is Family.LB:
        return 1.0, spec.a ** 2, 1.0
    if spec.family is Family.HP:
        return 1.0, spec.a ** 2, spec.k ** 2 - 1.0
    if spec.family is Family.GHP:
        return spec.rho ** 2, spec.a_prime ** 2, spec.k ** 2 - 1.0
    raise UnsupportedFormError(f"{spec.family.value} is not a hippopede-type curve")


def _exact_gradient(spec: CurveSpec, p) -> np.ndarray:
    s, big_a, c = _implicit_coeffs(spec)
    x, y = p
    w = s * x * x + y * y
    return np.array([4.0 * w * s * x - 2.0 * big_a * s * x, 4.0 * w * y + 2.0 * big_a * c * y])


@dataclass(frozen=True)
class TriangularProperty:
    theta_T: float
    base_point: np.ndarray
    tangent_angle: float
    H: float
    a: float

    @property
    def holds(self) -> bool:
        """The tangent at the base point meets the x-axis at x = -a (H = 3a/2)."""
        return abs(self.H - 1.5 * self.a) < 1e-9 * self.a

    @property
    def axis_intercept(self) -> float:
        return float(self.base_point[0]) - self.H


def triangular_property(spec: CurveSpec) -> TriangularProperty:
    """Base point at x = a/2 on the upper branch, its tangent, and H.

    H is the horizontal distance from x = a/2 to where that tangent crosses
    the x-axis. Angles in degrees.
    """
    s, big_a, c = _implicit_coeffs(spec)
    x = spec.a / 2.0
    big_x = s * x * x
    # (X + u)^2 = A (X - c u) with u = y^2
    p = 2.0 * big_x + big_a * c
    q = big_x * big_x - big_a * big_x
    disc = p * p - 4.0 * q
    if q >= 0.0 or disc < 0.0:
        raise DomainError("no curve point with x = a/2")
    u = (-p + math.sqrt(disc)) / 2.0
    y = math.sqrt(u)
    g = _exact_gradient(spec, (x, y))
    slope = -g[0] / g[1]
    height = y / slope
    return TriangularProperty(math.degrees(math.atan2(y, x)), np.array([x, y]),
                              math.degrees(math.atan(slope)), height, spec.a)


def collinear_angle(k: float) -> float:
    """Polar angle (degrees) of the point whose tangent is parallel to an origin tangent.

    sin 2 theta_c = sqrt(k^2 - 1) / k^2 for the hippopede with shape k.
    """
    if not k > 1.0:
        raise DomainError("k must exceed 1")
    return 0.5 * math.degrees(math.asin(math.sqrt(k * k - 1.0) / (k * k)))


def k_for_collinear_angle(theta_c_deg: float, branch: str = "low") -> float:
    """Inverse of :func:`collinear_angle`; two k share each angle below 15 deg.

    ``branch='low'`` returns the root with k^2 < 2, ``'high'`` the other.
    """
    s = math.sin(math.radians(2.0 * theta_c_deg))
    disc = 1.0 - 4.0 * s * s
    if not 0.0 < theta_c_deg or disc < 0.0:
        raise DomainError(f"no hippopede has collinear angle {theta_c_deg} deg (max 15)")
    root = math.sqrt(disc)
    q = (1.0 - root) / (2 * s * s) if branch == "low" else (1.0 + root) / (2 * s * s)
    return math.sqrt(q)


@dataclass(frozen=True)
class ParallelTangentPoint:
    theta: float
    r: float
    point: np.ndarray


def parallel_tangent_point(spec: CurveSpec) -> ParallelTangentPoint:
    """Upper right point whose tangent is parallel to the falling origin tangent.

    Found numerically on the arc from the vertex (vertical tangent) towards
    the top of the lobe; theta in degrees. For the three-body curve this is
    where the outer bodies sit at a collinear instant.
    """
    point, phi_m = _upper_arc(spec)
    target = -math.radians(tangent_at_origin(spec))

    def f(phi):
        g = _exact_gradient(spec, point(phi))
        # slope runs from -inf at the vertex to 0 at the top of the lobe
        return math.atan(-g[0] / g[1]) - target

    # bracket between the vertex and the top of the lobe
    top = _lobe_top(spec, point, phi_m)
    phi = brentq(f, 1e-9, top, xtol=1e-14)
    p = point(phi)
    return ParallelTangentPoint(math.degrees(math.atan2(p[1], p[0])), float(np.hypot(*p)), p)


def _lobe_top(spec: CurveSpec, point, phi_m: float) -> float:
    from scipy.optimize import minimize_scalar

    res = minimize_scalar(lambda phi: -point(phi)[1], bounds=(0.0, phi_m), method="bounded",
                          options={"xatol": 1e-13})
    return float(res.x)


@dataclass(frozen=True)
class HippopedeFit:
    """A hippopede matched to the three-body curve; columns of the comparison tables."""

    spec: CurveSpec
    tangent_at_O: float
    collinear_angle: float
    collinear_r: float
    base_point_y: float
    base_tangent: float
    height: float

    @property
    def k(self) -> float:
        return self.spec.k

    @property
    def a_prime(self) -> float:
        return self.spec.a_prime if self.spec.a_prime is not None else self.spec.a

    def to_dict(self) -> dict:
        return {
            "family": self.spec.family.value,
            "a": self.spec.a,
            "k": self.k,
            "a_prime": self.a_prime,
            "tangent_at_O": self.tangent_at_O,
            "collinear_angle": self.collinear_angle,
            "collinear_r": self.collinear_r,
            "base_point_y": self.base_point_y,
            "base_tangent": self.base_tangent,
            "height": self.height,
        }


def comparison_row(spec: CurveSpec) -> HippopedeFit:
    """Tangent at O, parallel-tangent point, base point, base tangent and H / a."""
    par = parallel_tangent_point(spec)
    tri = triangular_property(spec)
    return HippopedeFit(spec, tangent_at_origin(spec), par.theta, par.r, float(tri.base_point[1]),
                        tri.tangent_angle, tri.H / spec.a)


def fit_hippopede(target_tangent_origin: float, target_collinear: float | None = None,
                  a: float = FIG8_A) -> HippopedeFit:
    """Hippopede with the given origin tangent (and collinear angle), degrees.

    One target: k = 1 / sin(tangent). Two targets: the generalized hippopede,
    with a' fixed by the tangent for each k and k found by root bracketing on
    the collinear angle.
    """
    if not 0.0 < target_tangent_origin < 90.0:
        raise DomainError("origin tangent must lie in (0, 90) degrees")
    tan_o = math.tan(math.radians(target_tangent_origin))
    if target_collinear is None:
        return comparison_row(CurveSpec(Family.HP, a, k=1.0 / math.sin(math.radians(target_tangent_origin))))

    def spec_for(k):
        return CurveSpec(Family.GHP, a, k=k, a_prime=a * tan_o * math.sqrt(k * k - 1.0))

    def miss(k):
        return parallel_tangent_point(spec_for(k)).theta - target_collinear

    ks = np.linspace(1.0 + 1e-3, 4.0, 400)
    vals = [miss(k) for k in ks]
    for k0, k1, f0, f1 in zip(ks[:-1], ks[1:], vals[:-1], vals[1:]):
        if f0 == 0.0:
            return comparison_row(spec_for(k0))
        if f0 * f1 < 0.0:
            k = brentq(miss, k0, k1, xtol=1e-13)
            return comparison_row(spec_for(k))
    raise DomainError("no generalized hippopede meets both targets")


def _agm(x: float, y: float) -> float:
    for _ in range(64):
        if abs(x - y) <= 1e-16 * x:
            break
        x, y = 0.5 * (x + y), math.sqrt(x * y)
    return 0.5 * (x + y)


def elliptic_K(k: float) -> float:
    """Complete elliptic integral of the first kind, modulus k, by the AGM."""
    if not 0.0 <= k < 1.0:
        raise DomainError("modulus must lie in [0, 1)")
    return math.pi / (2.0 * _agm(1.0, math.sqrt((1.0 - k) * (1.0 + k))))


@dataclass(frozen=True)
class LemniscateLength:
    """Length of LB: ``per_2a`` is the full length over 2a (the a = 1 figure)."""

    a: float
    closed_form: float
    quadrature: float

    @property
    def per_2a(self) -> float:
        return self.closed_form / (2.0 * self.a)

    @property
    def quadrature_per_2a(self) -> float:
        return self.quadrature / (2.0 * self.a)


def lb_arclength(a: float = 1.0) -> LemniscateLength:
    """Closed form 2 a sqrt(2) K(1/sqrt 2) against quadrature of the parametric speed."""
    if not a > 0:
        raise ValueError("a must be positive")
    closed = 2.0 * a * math.sqrt(2.0) * elliptic_K(1.0 / math.sqrt(2.0))

    def speed(t):  # unit curve; the length scales with a
        s, c = math.sin(t), math.cos(t)
        den = (1.0 + s * s) ** 2
        dx = -s * (3.0 - s * s) / den
        dy = (math.cos(2 * t) * (1.0 + s * s) - 2.0 * s * s * c * c) / den
        return math.hypot(dx, dy)

    quarter, _ = quad(speed, 0.0, math.pi / 2.0, epsabs=1e-14, epsrel=1e-14, limit=200)
    return LemniscateLength(a, closed, 4.0 * a * quarter)


def radical_family_ds_dr(m: float, r: float) -> float:
    """ds/dr of the radical family: sqrt((1 - (1-m) r^2 (1-r^2)) / ((1-r^2)(1+m r^2)))."""
    if not 0.0 <= r < 1.0:
        raise DomainError("r must lie in [0, 1)")
    r2 = r * r
    return math.sqrt((1.0 - (1.0 - m) * r2 * (1.0 - r2)) / ((1.0 - r2) * (1.0 + m * r2)))


def _lb_derivative(a: float, t: float) -> np.ndarray:
    s, c = math.sin(t), math.cos(t)
    den = (1.0 + s * s) ** 2
    return np.array([-a * s * (3.0 - s * s) / den,
                     a * (math.cos(2 * t) * (1.0 + s * s) - 2.0 * s * s * c * c) / den])


@dataclass(frozen=True)
class PedalPoint:
    point: np.ndarray
    foot: np.ndarray
    p: float
    r: float
    theta: float


def pedal_curve(spec: CurveSpec, t: float) -> PedalPoint:
    """Foot of the perpendicular from the origin to the tangent at parameter t.

    LB uses the exact derivative; other families a central difference with
    step 1e-6 a in the parameter.
    """
    pt = eval_parametric(spec, t)
    if not pt.on_branch or pt.r == 0.0:
        raise DomainError("pedal point undefined at the double point")
    if spec.family is Family.LB:
        d = _lb_derivative(spec.a, t)
    else:
        h = 1e-6 * spec.a
        d = (eval_parametric(spec, t + h).point - eval_parametric(spec, t - h).point) / (2 * h)
    u = d / np.hypot(*d)
    foot = pt.point - (pt.point @ u) * u
    return PedalPoint(pt.point, foot, float(np.hypot(*foot)), pt.r, pt.theta)


def project_about_x_axis(spec: CurveSpec, alpha: float) -> Callable[[float], np.ndarray]:
    """Evaluator t -> (x, y cos^2 alpha) of the curve seen after rotating its plane by alpha (radians)."""
    f = math.cos(alpha) ** 2

    def evaluate(t):
        p = eval_parametric(spec, t).point
        return np.array([p[0], p[1] * f])

    return evaluate


def projection_angle(y_target: float, y_source: float) -> float:
    """alpha (degrees) with cos^2 alpha = y_target / y_source."""
    ratio = y_target / y_source
    if not 0.0 <= ratio <= 1.0:
        raise DomainError("projection can only shrink y")
    return math.degrees(math.acos(math.sqrt(ratio)))


def lb_max_y(a: float = 1.0) -> float:
    """Largest y on LB: a / (2 sqrt 2) at polar angle 30 deg."""
    return a / (2.0 * math.sqrt(2.0))


def sample_curve(spec: CurveSpec, n: int = 721) -> list[CurvePoint]:
    """``n`` points along the closed curve.

    LB and LG are sampled uniformly in their parameter over [0, 2 pi]. The
    hippopedes use the cissoid parameter, which covers both lobes without
    punctures: t' in [0, 2 pi] maps to r = a |cos t'| on the lobe of cos t'.
    """
    if n < 2:
        raise ValueError("need at least 2 samples")
    ts = np.linspace(0.0, 2.0 * math.pi, n)
    if spec.family in (Family.LB, Family.LG):
        return [eval_parametric(spec, t) for t in ts]
    if spec.family in (Family.HP, Family.GHP):
        out = []
        for t in ts:
            st, ct = math.sin(t), math.cos(t)
            x = (spec.a / spec.k) * math.sqrt(spec.k ** 2 - st * st) * ct
            y = spec.rho * (spec.a / spec.k) * ct * st
            out.append(_point(t, x, y))
        return out
    raise UnsupportedFormError("the ring-potential curve is implicit only")


def write_samples(path, points):
    write_csv(path, ("t", "x", "y", "r", "theta_deg"),
              [(p.t, p.point[0], p.point[1], p.r, p.theta_deg) for p in points])


def curve_report(spec: CurveSpec) -> dict:
    """Tangent at O, triangular property, collinear angle and length summary."""
    rep = {"family": spec.family.value, "a": spec.a, "k": spec.k, "a_prime": spec.a_prime,
           "b": spec.gerono_b if spec.family is Family.LG else None,
           "tangent_at_O": tangent_at_origin(spec)}
    if spec.family in (Family.LB, Family.HP, Family.GHP):
        tri = triangular_property(spec)
        par = parallel_tangent_point(spec)
        rep.update({
            "theta_T": tri.theta_T,
            "base_point_y": float(tri.base_point[1]),
            "base_tangent": tri.tangent_angle,
            "H_over_a": tri.H / spec.a,
            "collinear_angle": par.theta,
            "collinear_r": par.r,
        })
        if spec.family is Family.HP:
            rep["collinear_angle_formula"] = collinear_angle(spec.k)
    pts = sample_curve(spec, 4001)
    xy = np.array([p.point for p in pts])
    rep["length_polyline"] = float(np.sum(np.hypot(*np.diff(xy, axis=0).T)))
    if spec.family is Family.LB:
        ln = lb_arclength(spec.a)
        rep["length"] = ln.closed_form
        rep["length_per_2a"] = ln.per_2a
        rep["length_quadrature"] = ln.quadrature
    rep["length_polyline_per_2a"] = rep["length_polyline"] / (2.0 * spec.a)
    return rep
