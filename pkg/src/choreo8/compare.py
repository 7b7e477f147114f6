"""Side-by-side shape features of the lemniscate and the three-body curve."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from choreo8 import analysis, curves
from choreo8.integrator import Trajectory


@dataclass(frozen=True)
class ShapeFeatures:
    """Angles in degrees, lengths per a (the largest |x|).

    collinear_theta: polar angle of the point whose tangent is parallel to an
    origin tangent; triangular_theta and base_tangent: polar angle and tangent
    angle at the isosceles base point; ymax_theta, ymax: where y peaks.
    """

    name: str
    collinear_theta: float
    tangent_at_O: float
    triangular_theta: float
    base_tangent: float
    ymax_theta: float
    ymax: float
    length_per_2a: float

    @property
    def tangent_quotient(self) -> float:
        return self.tangent_at_O / self.collinear_theta


def lemniscate_features(a: float = 1.0) -> ShapeFeatures:
    spec = curves.lemniscate(a)
    par = curves.parallel_tangent_point(spec)
    tri = curves.triangular_property(spec)
    # y of LB peaks at polar angle 30 deg
    return ShapeFeatures("LB", par.theta, curves.tangent_at_origin(spec), tri.theta_T, tri.tangent_angle,
                         30.0, curves.lb_max_y(a) / a, curves.lb_arclength(a).per_2a)


def orbit_features(traj: Trajectory, events=None) -> ShapeFeatures:
    """Features measured on a full-period trajectory (body 1 traces the curve)."""
    events = analysis.find_configurations(traj) if events is None else events
    col = [e for e in events if e.kind is analysis.ConfigKind.COLLINEAR]
    iso = [e for e in events if e.kind is analysis.ConfigKind.ISOSCELES]
    collinear_theta = float(np.mean([abs(e.line_angle) for e in col]))
    tangent_o = float(np.mean([abs(e.tangent_angle) for e in col]))
    base_tangent = float(np.mean([e.side_angle for e in iso]))
    # polar angle of a base body, folded to the first quadrant
    thetas = []
    for e in iso:
        st = traj.state(e.tau_rad)
        apex = e.special_particle - 1
        for b in range(3):
            if b != apex:
                x, y = st.r[b]
                thetas.append(math.degrees(math.atan2(abs(y), abs(x))))
    hod = analysis.hodograph(traj, 1)
    a, _ = analysis.max_radius(traj, 1)
    ys, angles = [], []
    for t in hod.marks["horizontal"]:
        x, y = traj.state(math.radians(t)).r[0]
        ys.append(abs(y) / a)
        angles.append(math.degrees(math.atan2(abs(y), abs(x))))
    arc = analysis.arclength(traj, 1)
    return ShapeFeatures("3B", collinear_theta, tangent_o, float(np.mean(thetas)), base_tangent,
                         float(np.mean(angles)), float(np.mean(ys)), arc.normalized)


ROWS = (
    ("collinear", "collinear_theta"),
    ("tangent_at_O", "tangent_at_O"),
    ("triangular", "triangular_theta"),
    ("triangular_tangent", "base_tangent"),
    ("extrem_y_theta", "ymax_theta"),
    ("extrem_y_value", "ymax"),
    ("length_a1", "length_per_2a"),
    ("tanO_over_tanC", "tangent_quotient"),
)


def compare(lhs: ShapeFeatures, rhs: ShapeFeatures) -> list[dict]:
    """Rows (quantity, lhs, rhs, lhs / rhs)."""
    out = []
    for label, attr in ROWS:
        x, y = getattr(lhs, attr), getattr(rhs, attr)
        out.append({"row": label, lhs.name: x, rhs.name if rhs.name != lhs.name else rhs.name + "_2": y,
                    "ratio": x / y})
    return out


def features_dict(f: ShapeFeatures) -> dict:
    d = asdict(f)
    d["tangent_quotient"] = f.tangent_quotient
    return d
