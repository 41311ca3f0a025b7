import math

import numpy as np
import pytest

from magballoon import maneuver
from magballoon.attitude import CoilSet, PendulumParams
from magballoon.errors import InactiveCoil, InsufficientCoils
from magballoon.geomag import DipoleFieldSpec
from magballoon.orbit import EllipticalOrbitSpec
from magballoon.scenario import apply_overrides, builtin_scenario

AREA = math.pi * 15.0**2
BASELINE = PendulumParams(current=1.0, area=AREA, field_magnitude=1.375e-5,
                          inertia=11250.0)
K = BASELINE.torque_coefficient


def scenario(*overrides):
    return apply_overrides(builtin_scenario(), list(overrides))


# --- current decomposition --------------------------------------------------


def test_decompose_triad_axes():
    coils = CoilSet.orthogonal_triad(15.0)
    currents = maneuver.decompose_moment(np.array([0.0, 0.0, AREA]), coils)
    np.testing.assert_allclose(currents, [0.0, 0.0, 1.0], atol=1e-15)


def test_decompose_round_trip():
    coils = CoilSet.orthogonal_triad(15.0)
    rng = np.random.default_rng(42)
    for _ in range(25):
        desired = rng.normal(size=3) * 500.0
        currents = maneuver.decompose_moment(desired, coils)
        rebuilt = (currents * coils.areas()) @ coils.normals()
        np.testing.assert_allclose(rebuilt, desired, rtol=1e-12, atol=1e-12)


def test_decompose_single_coil():
    coils = CoilSet.single(15.0)
    currents = maneuver.decompose_moment(np.array([0.0, 0.0, 2.0 * AREA]),
                                         coils)
    np.testing.assert_allclose(currents, [2.0], rtol=1e-12)
    with pytest.raises(InsufficientCoils):
        maneuver.decompose_moment(np.array([AREA, 0.0, AREA]), coils)


# --- planning ----------------------------------------------------------------


def test_plan_constant_current():
    plan = maneuver.plan_constant_current(math.radians(30.0), 1.0, BASELINE,
                                          resistance=1.6493)
    assert plan.total_duration == pytest.approx(1100.96, rel=1e-4)
    assert plan.final_rate == pytest.approx(
        math.sqrt(2.0 * K * math.radians(30.0)), rel=1e-12)
    assert plan.ohmic_energy == pytest.approx(1.6493 * plan.total_duration,
                                              rel=1e-12)
    assert plan.kinetic_energy == pytest.approx(
        0.5 * 11250.0 * plan.final_rate**2, rel=1e-12)
    assert len(plan.segments) == 1
    assert plan.segments[0].currents == (1.0,)


def test_plan_zero_target():
    plan = maneuver.plan_constant_current(0.0, 1.0, BASELINE)
    assert plan.segments == ()
    assert plan.total_duration == 0.0


def test_plan_current_scaling():
    t1 = maneuver.plan_constant_current(0.5, 1.0, BASELINE).total_duration
    t4 = maneuver.plan_constant_current(0.5, 4.0, BASELINE).total_duration
    assert t1 / t4 == pytest.approx(2.0, rel=1e-12)


def test_plan_bang_bang():
    plan = maneuver.plan_bang_bang(math.radians(30.0), 1.0, BASELINE)
    half = math.sqrt(math.radians(30.0) / K)
    assert plan.total_duration == pytest.approx(2.0 * half, rel=1e-12)
    assert plan.total_duration == pytest.approx(1557.0, rel=1e-3)
    assert plan.final_rate == 0.0
    assert [s.currents for s in plan.segments] == [(1.0,), (-1.0,)]


def test_plan_rejects_bad_inputs():
    with pytest.raises(ValueError):
        maneuver.plan_constant_current(-0.1, 1.0, BASELINE)
    with pytest.raises(ValueError):
        maneuver.plan_bang_bang(0.5, 0.0, BASELINE)
    no_field = PendulumParams(1.0, AREA, 0.0, 11250.0)
    with pytest.raises(InactiveCoil):
        maneuver.plan_constant_current(0.5, 1.0, no_field)


# --- quadrature oracle --------------------------------------------------------


def test_quadrature_descent_time():
    t = maneuver.pendulum_descent_time_quadrature(
        K, math.pi / 2.0, math.radians(40.0))
    assert t == pytest.approx(1439.98, rel=1e-4)
    assert t < 2500.0


def test_quadrature_against_scipy():
    from scipy.integrate import quad

    theta0 = math.pi / 2.0
    theta1 = math.radians(40.0)

    def integrand(u):
        theta = theta0 - u * u
        return 2.0 * u / math.sqrt(
            2.0 * K * (math.cos(theta) - math.cos(theta0)))

    oracle, err = quad(integrand, 0.0, math.sqrt(theta0 - theta1))
    assert err < 1e-6
    assert maneuver.pendulum_descent_time_quadrature(K, theta0, theta1) == \
        pytest.approx(oracle, rel=1e-9)


def test_quadrature_input_validation():
    with pytest.raises(ValueError):
        maneuver.pendulum_descent_time_quadrature(K, 0.5, 0.9)
    with pytest.raises(ValueError):
        maneuver.pendulum_descent_time_quadrature(0.0, 1.0, 0.5)


# --- scalar simulation ---------------------------------------------------------


def test_scalar_constant_matches_quadrature():
    traj, summary = maneuver.simulate_scalar_maneuver(scenario())
    oracle = maneuver.pendulum_descent_time_quadrature(
        K, math.pi / 2.0, math.radians(40.0))
    assert summary.elapsed == pytest.approx(oracle, rel=1e-3)
    assert summary.rotation_achieved == pytest.approx(math.radians(50.0),
                                                      abs=1e-5)
    assert summary.target_met
    assert not summary.max_time_exceeded
    assert traj.times[-1] == summary.elapsed
    assert np.all(np.diff(traj.times) > 0)


def test_scalar_elapsed_scales_with_current():
    elapsed = [maneuver.simulate_scalar_maneuver(
        scenario(f"maneuver.current_A={i}"))[1].elapsed
        for i in (0.5, 1.0, 2.0, 4.0)]
    assert all(a > b for a, b in zip(elapsed, elapsed[1:]))
    # the pendulum equation scales exactly as 1/sqrt(current)
    assert elapsed[1] / elapsed[3] == pytest.approx(2.0, rel=1e-4)


def test_scalar_small_angle_run():
    _, summary = maneuver.simulate_scalar_maneuver(
        scenario("maneuver.small_angle=true", "maneuver.target_deg=30"))
    assert summary.elapsed == pytest.approx(1100.96, rel=1e-4)
    assert summary.residual_rate == pytest.approx(9.5116e-4, rel=1e-3)


def test_scalar_ohmic_energy_accounting():
    _, summary = maneuver.simulate_scalar_maneuver(scenario())
    r = 0.0175 * 2.0 * math.pi * 15.0  # rho L / s with s = 1 mm^2
    assert summary.ohmic_energy == pytest.approx(r * summary.elapsed,
                                                 rel=1e-12)


def test_scalar_peak_quantities():
    _, summary = maneuver.simulate_scalar_maneuver(scenario())
    assert summary.peak_torque == pytest.approx(AREA * 1.375e-5, rel=1e-6)
    # peak kinetic energy at the final (fastest) sample
    assert summary.peak_kinetic_energy == pytest.approx(
        0.5 * 11250.0 * summary.residual_rate**2, rel=1e-6)


def test_scalar_max_time_flag():
    _, summary = maneuver.simulate_scalar_maneuver(
        scenario("sim.max_time_s=100", "sim.dt_s=0.5"))
    assert summary.max_time_exceeded
    assert not summary.target_met
    assert summary.elapsed == pytest.approx(100.0)


def test_bang_bang_small_angle_residual():
    """Under constant-torque dynamics the reversal cancels the rate exactly
    (RK4 is exact on polynomial trajectories), so the residual is far below
    1% of the constant-current terminal rate."""
    _, summary = maneuver.simulate_scalar_maneuver(
        scenario("maneuver.type=bang_bang", "maneuver.small_angle=true",
                 "maneuver.target_deg=30"))
    terminal = math.sqrt(2.0 * K * math.radians(30.0))
    assert summary.residual_rate < 0.01 * terminal
    assert summary.rotation_achieved == pytest.approx(math.radians(30.0),
                                                      rel=1e-6)


def test_bang_bang_full_dynamics_overshoot():
    """With the true sin(theta) torque the open-loop reversal overshoots;
    the miss stays below 5% of the commanded rotation."""
    _, summary = maneuver.simulate_scalar_maneuver(
        scenario("maneuver.type=bang_bang", "maneuver.target_deg=30"))
    target = math.radians(30.0)
    assert abs(summary.rotation_achieved - target) < 0.05 * target
    assert summary.elapsed == pytest.approx(1557.0, rel=1e-3)


# --- 3-D simulation -------------------------------------------------------------


def test_3d_single_coil_matches_scalar():
    base = scenario("maneuver.target_deg=30")
    scalar_elapsed = maneuver.simulate_scalar_maneuver(base)[1].elapsed
    cfg = scenario("maneuver.target_deg=30", "maneuver.mode=3d",
                   "coils.count=1")
    traj, summary = maneuver.simulate_3d_maneuver(cfg)
    assert not summary.underactuated
    assert summary.target_met
    assert summary.elapsed == pytest.approx(scalar_elapsed, rel=1e-3)
    assert summary.rotation_achieved == pytest.approx(math.radians(30.0),
                                                      abs=1e-5)
    # quaternion columns stay normalized without explicit renormalization
    norms = np.linalg.norm(traj.states[:, :4], axis=1)
    assert np.max(np.abs(norms - 1.0)) < 1e-9


def test_3d_triad_matches_scalar():
    base = scenario("maneuver.target_deg=30")
    scalar_elapsed = maneuver.simulate_scalar_maneuver(base)[1].elapsed
    cfg = scenario("maneuver.target_deg=30", "maneuver.mode=3d")
    _, summary = maneuver.simulate_3d_maneuver(cfg)
    assert summary.elapsed == pytest.approx(scalar_elapsed, rel=1e-3)


def test_3d_underactuated_axis():
    cfg = scenario("maneuver.mode=3d", "coils.count=1",
                   "maneuver.commanded_axis=0 0 1")  # parallel to the field
    traj, summary = maneuver.simulate_3d_maneuver(cfg)
    assert summary.underactuated
    assert summary.elapsed == 0.0
    assert len(traj) == 1


def test_3d_dipole_equatorial_orbit():
    """On an equatorial circular orbit the dipole field at the balloon is
    constant, so the slew must land on the uniform-field prediction."""
    cfg = scenario("maneuver.target_deg=30", "maneuver.mode=3d",
                   "field.model=dipole", "orbit.model=circular",
                   "orbit.altitude_km=2000")
    b_start = cfg.field_magnitude_at_start()
    assert b_start == pytest.approx(1.375e-5, rel=5e-3)
    params = PendulumParams(current=1.0, area=AREA, field_magnitude=b_start,
                            inertia=11250.0)
    oracle = maneuver.pendulum_descent_time_quadrature(
        params.torque_coefficient, math.pi / 2.0, math.radians(60.0))
    _, summary = maneuver.simulate_3d_maneuver(cfg)
    assert summary.target_met
    assert summary.elapsed == pytest.approx(oracle, rel=5e-3)


def test_3d_dipole_inclined_orbit_completes():
    """An inclined orbit sweeps a varying field; the slew still completes
    near the frozen-field prediction."""
    cfg = scenario("maneuver.target_deg=30", "maneuver.mode=3d",
                   "field.model=dipole", "orbit.model=circular",
                   "orbit.altitude_km=2000", "orbit.plane_normal=0 1 1")
    b_start = cfg.field_magnitude_at_start()
    params = PendulumParams(current=1.0, area=AREA, field_magnitude=b_start,
                            inertia=11250.0)
    prediction = maneuver.pendulum_descent_time_quadrature(
        params.torque_coefficient, math.pi / 2.0, math.radians(60.0))
    _, summary = maneuver.simulate_3d_maneuver(cfg)
    assert summary.target_met
    assert summary.elapsed == pytest.approx(prediction, rel=0.25)


# --- perigee/apogee field ratio ---------------------------------------------


def test_field_ratio_perigee_apogee():
    re = 6.371e6
    spec = EllipticalOrbitSpec(perigee_radius=re + 5000e3,
                               apogee_radius=re + 40000e3)
    ratio = maneuver.field_ratio_perigee_apogee(spec, DipoleFieldSpec())
    assert ratio == pytest.approx(
        (spec.apogee_radius / spec.perigee_radius) ** 3, rel=1e-9)
    assert ratio == pytest.approx(67.82, rel=1e-3)


def test_field_ratio_degenerate_circle():
    spec = EllipticalOrbitSpec(perigee_radius=1e7, apogee_radius=1e7)
    assert maneuver.field_ratio_perigee_apogee(spec, DipoleFieldSpec()) == \
        pytest.approx(1.0, rel=1e-12)


def test_field_ratio_apogee_scaling():
    base = EllipticalOrbitSpec(perigee_radius=1e7, apogee_radius=2e7)
    tall = EllipticalOrbitSpec(perigee_radius=1e7, apogee_radius=4e7)
    dipole = DipoleFieldSpec()
    assert (maneuver.field_ratio_perigee_apogee(tall, dipole)
            / maneuver.field_ratio_perigee_apogee(base, dipole)) == \
        pytest.approx(8.0, rel=1e-9)
