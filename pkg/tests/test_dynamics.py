import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from choreo8.dynamics import (
    BodyState,
    ConstraintError,
    PUBLISHED_ENERGY,
    SingularityError,
    UnitSystem,
    acceleration,
    acceleration_from_cog,
    canonical_initial_state,
    center_of_gravity,
    denormalize,
    energies,
    first_integrals,
    isosceles_family_state,
    load_unit_system,
    published_initial_state,
    reference_collinear_state,
)

coord = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
vel = st.floats(-2, 2, allow_nan=False, allow_infinity=False)


@st.composite
def states(draw):
    """Random non-singular states (pairwise separation >= 0.05)."""
    r = np.array([[draw(coord), draw(coord)] for _ in range(3)])
    v = np.array([[draw(vel), draw(vel)] for _ in range(3)])
    for i, j in ((0, 1), (1, 2), (0, 2)):
        if np.hypot(*(r[i] - r[j])) < 0.05:
            r[j] = r[i] + np.array([0.3 + 0.1 * j, -0.2])
    return BodyState(0.0, r, v)


def _rot(phi):
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s], [s, c]])


def test_canonical_positions():
    s = canonical_initial_state()
    assert s.r[0, 0] == 0.746156
    assert_allclose(s.r.sum(axis=0), 0.0, atol=0)
    assert_allclose(s.r[1], (-0.373078, 0.238313))


def test_canonical_has_zero_integrals_and_published_energy():
    rep = first_integrals(canonical_initial_state())
    assert rep.max_deviation() < 1e-14
    assert rep.energy == pytest.approx(PUBLISHED_ENERGY, abs=1e-12)
    assert rep.energy < 0


def test_canonical_velocities_close_to_printed():
    s, p = canonical_initial_state(), published_initial_state()
    assert_allclose(s.v, p.v, atol=2e-3)
    assert s.v[0, 1] == pytest.approx(0.324677, abs=2e-6)


def test_printed_state_is_inconsistent():
    # the printed velocities do not give zero angular momentum
    rep = first_integrals(published_initial_state())
    assert abs(rep.ang_momentum) > 1e-4
    assert rep.energy == pytest.approx(PUBLISHED_ENERGY, abs=5e-3)


def test_acceleration_at_start_points_left():
    a = acceleration(canonical_initial_state())
    assert a[0, 0] < 0
    assert abs(a[0, 1]) < 1e-15
    assert_allclose(a.sum(axis=0), 0.0, atol=1e-15)


def test_acceleration_singular():
    s = BodyState(0.0, [(0, 0), (0, 0), (1, 0)], np.zeros((3, 2)))
    with pytest.raises(SingularityError):
        acceleration(s)
    with pytest.raises(SingularityError):
        energies(s)


@settings(max_examples=200, deadline=None)
@given(states())
def test_acceleration_sums_to_zero(s):
    a = acceleration(s)
    assert_allclose(a.sum(axis=0), 0.0, atol=1e-10 * max(1.0, np.abs(a).max()))


@settings(max_examples=150, deadline=None)
@given(states(), coord, coord)
def test_acceleration_translation_equivariant(s, dx, dy):
    shifted = BodyState(0.0, s.r + np.array([dx, dy]), s.v)
    a0, a1 = acceleration(s), acceleration(shifted)
    assert_allclose(a1, a0, rtol=1e-8, atol=1e-8 * np.abs(a0).max())


@settings(max_examples=150, deadline=None)
@given(states(), st.floats(0, 2 * math.pi))
def test_acceleration_rotation_equivariant(s, phi):
    q = _rot(phi)
    rotated = BodyState(0.0, s.r @ q.T, s.v @ q.T)
    assert_allclose(acceleration(rotated), acceleration(s) @ q.T, atol=1e-10 * np.abs(acceleration(s)).max())


@settings(max_examples=150, deadline=None)
@given(states())
def test_integrals_invariant_under_point_reflection(s):
    a, b = first_integrals(s), first_integrals(s.reflect())
    assert_allclose(b.com, -a.com, atol=1e-15)
    assert_allclose(b.momentum, -a.momentum, atol=1e-15)
    assert b.ang_momentum == pytest.approx(a.ang_momentum, abs=1e-14)
    assert b.energy == pytest.approx(a.energy, rel=1e-14)


@settings(max_examples=150, deadline=None)
@given(states())
def test_energy_breakdown_consistent(s):
    e = energies(s)
    assert e.total == pytest.approx(e.kinetic_total + e.potential_total, rel=1e-14, abs=1e-14)
    assert e.potential_total < 0
    assert e.pk_ratio > 0
    assert e.specific_total == pytest.approx(first_integrals(s).energy, rel=1e-12, abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(states(), st.integers(1, 3))
def test_cog_round_trip(s, particle):
    cog = center_of_gravity(s, particle)
    a = acceleration(s)[particle - 1]
    if cog.at_infinity:
        assert np.hypot(*a) < 1e-8
        return
    assert_allclose(acceleration_from_cog(s.r[particle - 1], cog.point), a, rtol=1e-12, atol=1e-14)


def test_cog_on_negative_x_axis_at_start():
    cog = center_of_gravity(canonical_initial_state(), 1)
    assert not cog.at_infinity
    assert cog.point[0] < 0
    assert abs(cog.point[1]) < 1e-12


def test_cog_at_infinity_when_acceleration_vanishes():
    # body 2 at the midpoint of a symmetric line feels no force
    s = BodyState(0.0, [(1, 0.2), (0, 0), (-1, -0.2)], [(0.1, 0.3), (-0.2, -0.6), (0.1, 0.3)])
    cog = center_of_gravity(s, 2)
    assert cog.at_infinity and cog.point is None
    assert abs(np.hypot(*cog.direction) - 1) < 1e-12


@settings(max_examples=150, deadline=None)
@given(st.floats(0.2, 2), st.floats(0.05, 1.5), st.floats(0.05, 1.5),
       st.floats(-0.2, 0.2), st.floats(-0.2, 0.2))
def test_isosceles_family_integrals_vanish(x0, y0, v0, delta, delta_v):
    vx0 = (3 * (v0 / 2) * (x0 / 2) + delta * delta_v) / y0
    s = isosceles_family_state(x0, y0, v0, vx0, delta, delta_v)
    assert first_integrals(s).max_deviation() < 1e-14 * max(1.0, vx0 * y0 * 10)


def test_isosceles_family_rejects_violation():
    with pytest.raises(ConstraintError):
        isosceles_family_state(0.746156, 0.238313, 0.324677, 0.764226)
    with pytest.raises(ConstraintError):
        isosceles_family_state(1.0, 0.0, 0.3, 0.5)


def test_isosceles_family_side_tangent_property():
    # with y0/(3x0/2) = (v0/2)/vx0, body 2 moves along the side 2 -> 1
    x0, y0, v0 = 0.746156, 0.238313, 0.3
    s = isosceles_family_state(x0, y0, v0, 3 * x0 * v0 / (4 * y0))
    side = s.r[0] - s.r[1]
    cross = side[0] * s.v[1][1] - side[1] * s.v[1][0]
    assert abs(cross) < 1e-14
    assert side @ s.v[1] > 0


def test_reference_state_is_collinear_with_zero_integrals():
    s = reference_collinear_state()
    assert_allclose(s.r[1], 0.0)
    assert_allclose(s.v[0], s.v[2])
    assert_allclose(s.v[1], -2 * s.v[0])
    rep = first_integrals(s)
    assert rep.max_deviation() < 1e-15
    assert rep.energy == pytest.approx(PUBLISHED_ENERGY, abs=1e-8)


def test_denormalize_earth_units():
    earth = UnitSystem.from_gm(6378.1e3, 398600.44e9)
    assert denormalize(earth, "time", 2 * math.pi) / 60 == pytest.approx(84.486, abs=0.01)
    assert denormalize(earth, "length", 0.746156) / 1e3 == pytest.approx(4758.9, abs=1)
    assert denormalize(earth, "length", 0.476626) / 1e3 == pytest.approx(3039.9, abs=1)
    assert denormalize(earth, "angular_momentum", 1.0) == pytest.approx(math.sqrt(earth.gm * earth.R))
    assert denormalize(earth, "energy", 2.0) == pytest.approx(2 * earth.gm / earth.R)


def test_one_kg_one_meter_period_in_days():
    # 2 pi sqrt(R^3 / G m) for 1 kg and 1 m
    days = UnitSystem(1.0, 1.0).period_s / 86400
    assert days == pytest.approx(8.9017, abs=1e-3)


def test_denormalize_rejects_unknown_kind():
    with pytest.raises(ValueError):
        denormalize(UnitSystem(1.0, 1.0), "pressure", 1.0)


def test_unit_system_validation_and_json(tmp_path):
    with pytest.raises(ValueError):
        UnitSystem(-1.0, 1.0)
    p = tmp_path / "u.json"
    p.write_text(json.dumps({"R_m": 2.0, "m_total_kg": 3.0}))
    u = load_unit_system(p)
    assert u.particle_mass == 1.0 and u.G == 6.674e-11
    p.write_text(json.dumps({"R_m": 2.0}))
    with pytest.raises(ValueError):
        load_unit_system(p)


def test_body_state_is_immutable():
    s = canonical_initial_state()
    with pytest.raises(ValueError):
        s.r[0, 0] = 1.0
    assert_allclose(s.relabel(1).r[0], s.r[1])
    assert_allclose(BodyState.from_flat(0.0, s.flat).v, s.v)
