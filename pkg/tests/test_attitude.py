import math

import numpy as np
import pytest

from magballoon import attitude, quat
from magballoon.attitude import (AttitudeState3D, BalloonBody, Coil, CoilSet,
                                 InertiaModel, PendulumParams,
                                 ScalarAttitudeState)
from magballoon.errors import CountMismatch, InactiveCoil, ZeroQuaternion
from magballoon.geomag import FieldSample

AREA = math.pi * 15.0**2           # 706.858 m^2
FIELD = 1.375e-5                   # T
INERTIA = 11250.0                  # kg m^2, 50 kg ring at 15 m about its axis
BASELINE = PendulumParams(current=1.0, area=AREA, field_magnitude=FIELD,
                          inertia=INERTIA)


def test_inertia_models():
    body = BalloonBody(mass=50.0, radius=15.0)
    assert body.inertia == pytest.approx(11250.0)
    assert BalloonBody(50.0, 15.0, InertiaModel.RING_DIAMETER).inertia == \
        pytest.approx(5625.0)
    assert BalloonBody(50.0, 15.0, InertiaModel.SPHERICAL_SHELL).inertia == \
        pytest.approx(7500.0)
    np.testing.assert_allclose(body.inertia_tensor(), 11250.0 * np.eye(3))


def test_explicit_inertia():
    tensor = np.diag([11250.0, 9000.0, 7000.0])
    body = BalloonBody(50.0, 15.0, InertiaModel.EXPLICIT,
                       explicit_inertia=tensor)
    np.testing.assert_array_equal(body.inertia_tensor(), tensor)
    with pytest.raises(ValueError):
        body.inertia
    with pytest.raises(ValueError):
        BalloonBody(50.0, 15.0, InertiaModel.EXPLICIT,
                    explicit_inertia=np.diag([1.0, 1.0, -1.0]))


def test_coilset_construction():
    single = CoilSet.single(15.0)
    assert len(single) == 1
    assert single.coils[0].area == pytest.approx(AREA)
    triad = CoilSet.orthogonal_triad(15.0)
    assert len(triad) == 3
    np.testing.assert_allclose(triad.normals() @ triad.normals().T, np.eye(3),
                               atol=1e-12)
    with pytest.raises(ValueError):
        CoilSet((Coil(AREA, (0, 0, 1)), Coil(AREA, (0, 0, 1)),
                 Coil(AREA, (1, 0, 0))))
    with pytest.raises(ValueError):
        Coil(area=AREA, normal=(1.0, 1.0, 0.0))


def test_magnetic_moment_single_coil():
    coils = CoilSet.single(15.0)
    m = attitude.magnetic_moment(coils, [1.0])
    np.testing.assert_allclose(m, [0.0, 0.0, AREA], rtol=1e-12)
    np.testing.assert_array_equal(attitude.magnetic_moment(coils, [0.0]),
                                  np.zeros(3))


def test_magnetic_moment_triad_and_rotation():
    coils = CoilSet.orthogonal_triad(15.0)
    m = attitude.magnetic_moment(coils, [1.0, 1.0, 1.0])
    assert np.linalg.norm(m) == pytest.approx(math.sqrt(3.0) * AREA, rel=1e-12)
    # a +90 deg body rotation about x maps the z coil normal onto -y
    q = quat.from_axis_angle(np.array([1.0, 0.0, 0.0]), math.pi / 2.0)
    m_rot = attitude.magnetic_moment(coils, [0.0, 0.0, 1.0], orientation=q)
    np.testing.assert_allclose(m_rot, [0.0, -AREA, 0.0], atol=1e-10)


def test_magnetic_moment_count_mismatch():
    with pytest.raises(CountMismatch):
        attitude.magnetic_moment(CoilSet.single(15.0), [1.0, 2.0])


def test_magnetic_torque_values():
    m = np.array([0.0, 0.0, AREA])
    B = np.array([FIELD, 0.0, 0.0])  # normal perpendicular to field
    tau = attitude.magnetic_torque(m, B)
    assert np.linalg.norm(tau) == pytest.approx(AREA * FIELD, rel=1e-12)
    assert AREA * FIELD == pytest.approx(9.7193e-3, rel=1e-4)
    np.testing.assert_array_equal(
        attitude.magnetic_torque(m, np.array([0.0, 0.0, FIELD])), np.zeros(3))


def test_magnetic_torque_perpendicular_to_field():
    rng = np.random.default_rng(11)
    for _ in range(50):
        m = rng.normal(size=3) * 700.0
        B = rng.normal(size=3) * 1e-5
        tau = attitude.magnetic_torque(m, B)
        assert abs(float(tau @ B)) < 1e-18


def test_pendulum_rhs():
    state = ScalarAttitudeState(theta=math.pi / 2.0, theta_dot=0.0)
    theta_dot, theta_dd = attitude.pendulum_rhs(state, BASELINE)
    assert theta_dot == 0.0
    assert theta_dd == pytest.approx(-8.6394e-7, rel=1e-4)
    for theta in (0.0, math.pi):
        _, acc = attitude.pendulum_rhs(
            ScalarAttitudeState(theta=theta, theta_dot=0.0), BASELINE)
        assert acc == pytest.approx(0.0, abs=1e-20)


def test_torque_coefficient_scaling():
    assert BASELINE.torque_coefficient == pytest.approx(8.639e-7, rel=1e-3)
    quadruple = PendulumParams(4.0, AREA, FIELD, INERTIA)
    assert quadruple.torque_coefficient == pytest.approx(
        4.0 * BASELINE.torque_coefficient, rel=1e-12)


def test_small_angle_formulas():
    k = BASELINE.torque_coefficient
    t30 = attitude.small_angle_slew_time(math.radians(30.0), BASELINE)
    assert t30 == pytest.approx(1100.96, rel=1e-4)
    assert attitude.small_angle_theta(t30, BASELINE) == pytest.approx(
        math.radians(30.0), rel=1e-12)
    assert attitude.final_slew_rate(math.radians(30.0), BASELINE) == \
        pytest.approx(math.sqrt(2.0 * k * math.radians(30.0)), rel=1e-12)
    assert attitude.final_slew_rate(math.radians(30.0), BASELINE) == \
        pytest.approx(9.51e-4, rel=1e-2)


def test_small_angle_current_scaling():
    t_1a = attitude.small_angle_slew_time(0.5, BASELINE)
    t_4a = attitude.small_angle_slew_time(
        0.5, PendulumParams(4.0, AREA, FIELD, INERTIA))
    assert t_1a / t_4a == pytest.approx(2.0, rel=1e-12)


def test_inactive_coil():
    dead = PendulumParams(0.0, AREA, FIELD, INERTIA)
    with pytest.raises(InactiveCoil):
        attitude.small_angle_slew_time(0.5, dead)
    with pytest.raises(InactiveCoil):
        attitude.final_slew_rate(0.5, dead)


def test_body_rhs_equilibrium():
    """Moment aligned with the field and zero rate: all derivatives vanish."""
    body = BalloonBody(50.0, 15.0)
    coils = CoilSet.single(15.0)
    state = AttitudeState3D(orientation=np.array([1.0, 0.0, 0.0, 0.0]),
                            omega_body=np.zeros(3))
    field = FieldSample(B=np.array([0.0, 0.0, FIELD]), magnitude=FIELD)
    q_dot, w_dot = attitude.body_rhs_3d(state, body, coils, [1.0], field)
    np.testing.assert_allclose(q_dot, np.zeros(4), atol=1e-18)
    np.testing.assert_allclose(w_dot, np.zeros(3), atol=1e-18)


def test_body_rhs_matches_scalar_pendulum():
    """At 90 deg normal-to-field the 3-D angular acceleration equals k."""
    body = BalloonBody(50.0, 15.0)
    coils = CoilSet.single(15.0)
    state = AttitudeState3D(orientation=np.array([1.0, 0.0, 0.0, 0.0]),
                            omega_body=np.zeros(3))
    field = FieldSample(B=np.array([FIELD, 0.0, 0.0]), magnitude=FIELD)
    _, w_dot = attitude.body_rhs_3d(state, body, coils, [1.0], field)
    assert np.linalg.norm(w_dot) == pytest.approx(
        BASELINE.torque_coefficient, rel=1e-12)


def test_body_rhs_torque_free_spin():
    """Principal-axis spin with zero current is steady."""
    tensor = np.diag([11250.0, 9000.0, 7000.0])
    body = BalloonBody(50.0, 15.0, InertiaModel.EXPLICIT,
                       explicit_inertia=tensor)
    coils = CoilSet.single(15.0)
    state = AttitudeState3D(orientation=np.array([1.0, 0.0, 0.0, 0.0]),
                            omega_body=np.array([0.0, 0.0, 0.02]))
    field = FieldSample(B=np.array([FIELD, 0.0, 0.0]), magnitude=FIELD)
    _, w_dot = attitude.body_rhs_3d(state, body, coils, [0.0], field)
    np.testing.assert_allclose(w_dot, np.zeros(3), atol=1e-18)


def test_renormalize():
    q = np.array([2.0, 0.0, 0.0, 0.0])
    state = AttitudeState3D(orientation=q, omega_body=np.array([0.1, 0, 0]),
                            time=3.0)
    out = attitude.renormalize(state)
    np.testing.assert_allclose(out.orientation, [1.0, 0.0, 0.0, 0.0])
    assert out.time == 3.0
    with pytest.raises(ZeroQuaternion):
        attitude.renormalize(AttitudeState3D(orientation=np.zeros(4),
                                             omega_body=np.zeros(3)))


def test_quaternion_helpers():
    axis = np.array([0.0, 0.0, 1.0])
    q = quat.from_axis_angle(axis, math.pi / 2.0)
    v = quat.rotate(q, np.array([1.0, 0.0, 0.0]))
    np.testing.assert_allclose(v, [0.0, 1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(quat.rotate_inverse(q, v), [1.0, 0.0, 0.0],
                               atol=1e-15)
    # twist about the commanded axis recovers the rotation angle
    assert quat.twist_angle(q, axis) == pytest.approx(math.pi / 2.0, rel=1e-12)
    # composition of two quarter turns is a half turn
    q2 = quat.multiply(q, q)
    assert quat.twist_angle(q2, axis) == pytest.approx(math.pi, rel=1e-12)


def test_quat_between():
    a = np.array([0.0, 0.0, 1.0])
    b = np.array([1.0, 0.0, 0.0])
    q = quat.between(a, b)
    np.testing.assert_allclose(quat.rotate(q, a), b, atol=1e-15)
    # antipodal input still returns a valid half-turn
    q_flip = quat.between(a, -a)
    np.testing.assert_allclose(quat.rotate(q_flip, a), -a, atol=1e-12)
