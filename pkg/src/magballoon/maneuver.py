"""Maneuver planning and simulation.

Plans constant-current and bang-bang (current reversal) slews from the
constant-torque closed forms, then executes them on the propagation
kernels and reports the true residuals. No feedback controller: currents
are fixed per segment. Attitude and orbit are one-way coupled: the orbit
position at the state time selects the field, never the reverse.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import geomag, orbit as orbit_mod, quat
from ._kernels import body_steps, pendulum_steps
from .attitude import CoilSet, PendulumParams
from .coilbudget import WireSpec, coil_resistance
from .errors import InactiveCoil, InsufficientCoils
from .odesolve import Trajectory

_CHUNK = 4096


@dataclass(frozen=True)
class Segment:
    """One constant-current stretch of a plan."""

    duration: float
    currents: Tuple[float, ...]

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError("segment duration must be positive")


@dataclass(frozen=True)
class ManeuverPlan:
    """Open-loop schedule with constant-torque model predictions."""

    segments: Tuple[Segment, ...]
    final_angle: float      # rad, predicted rotation
    final_rate: float       # rad/s, predicted residual
    ohmic_energy: float     # J over all segments (zero if no resistance given)
    kinetic_energy: float   # J at the predicted final rate

    @property
    def total_duration(self) -> float:
        return sum(s.duration for s in self.segments)


@dataclass
class ManeuverSummary:
    rotation_achieved: float   # rad
    elapsed: float             # s
    residual_rate: float       # rad/s
    peak_torque: float         # N m
    ohmic_energy: float        # J
    peak_kinetic_energy: float  # J
    max_time_exceeded: bool = False
    target_met: bool = False
    underactuated: bool = False


def decompose_moment(desired_moment: np.ndarray, coils: CoilSet) -> np.ndarray:
    """Currents producing a desired body-frame magnetic moment.

    For three orthogonal coils i_j = (m . n_j) / A_j exactly; with fewer
    coils the moment must lie in the spanned subspace (relative residual
    below 1e-9) or InsufficientCoils is raised.
    """
    desired = np.asarray(desired_moment, dtype=float)
    normals = coils.normals()
    areas = coils.areas()
    currents = (normals @ desired) / areas
    reconstructed = (currents * areas) @ normals
    residual = np.linalg.norm(reconstructed - desired)
    scale = max(np.linalg.norm(desired), 1e-300)
    if len(coils) < 3 and residual / scale > 1e-9:
        raise InsufficientCoils(
            f"moment outside coil span (relative residual {residual / scale:.2e})")
    return currents


def plan_constant_current(theta_target: float, current: float,
                          params: PendulumParams,
                          resistance: float = 0.0) -> ManeuverPlan:
    """Single-segment slew; arrives moving at sqrt(2 k theta)."""
    if theta_target == 0:
        return ManeuverPlan(segments=(), final_angle=0.0, final_rate=0.0,
                            ohmic_energy=0.0, kinetic_energy=0.0)
    if not (theta_target > 0 and current > 0):
        raise ValueError("theta_target and current must be positive")
    p = PendulumParams(current=current, area=params.area,
                       field_magnitude=params.field_magnitude,
                       inertia=params.inertia)
    k = p.torque_coefficient
    if k == 0:
        raise InactiveCoil("zero torque coefficient")
    duration = math.sqrt(2.0 * theta_target / k)
    rate = k * duration
    return ManeuverPlan(
        segments=(Segment(duration=duration, currents=(current,)),),
        final_angle=theta_target,
        final_rate=rate,
        ohmic_energy=resistance * current**2 * duration,
        kinetic_energy=0.5 * p.inertia * rate**2)


def plan_bang_bang(theta_target: float, current: float,
                   params: PendulumParams,
                   resistance: float = 0.0) -> ManeuverPlan:
    """Accelerate with +i for half the angle, reverse to -i, arrive at rest.

    Under the constant-torque model both segments last sqrt(theta / k).
    """
    if not (theta_target > 0 and current > 0):
        raise ValueError("theta_target and current must be positive")
    p = PendulumParams(current=current, area=params.area,
                       field_magnitude=params.field_magnitude,
                       inertia=params.inertia)
    k = p.torque_coefficient
    if k == 0:
        raise InactiveCoil("zero torque coefficient")
    half = math.sqrt(theta_target / k)
    return ManeuverPlan(
        segments=(Segment(duration=half, currents=(current,)),
                  Segment(duration=half, currents=(-current,))),
        final_angle=theta_target,
        final_rate=0.0,
        ohmic_energy=resistance * current**2 * 2.0 * half,
        kinetic_energy=0.0)


def pendulum_descent_time_quadrature(k: float, theta_start: float,
                                     theta_stop: float, nodes: int = 200) -> float:
    """Descent time of the pendulum from rest at theta_start down to
    theta_stop, by quadrature of the energy integral.

    t = integral dtheta / sqrt(2 k (cos theta - cos theta_start)). The
    inverse-square-root endpoint singularity is removed with the
    substitution u^2 = theta_start - theta before Gauss-Legendre
    quadrature. Serves as the independent check on the integrated
    trajectory.
    """
    if not (0 < theta_stop < theta_start <= math.pi):
        raise ValueError("require 0 < theta_stop < theta_start <= pi")
    if not k > 0:
        raise ValueError("k must be positive")
    c0 = math.cos(theta_start)
    u_max = math.sqrt(theta_start - theta_stop)
    x, w = np.polynomial.legendre.leggauss(nodes)
    u = 0.5 * u_max * (x + 1.0)
    theta = theta_start - u * u
    integrand = 2.0 * u / np.sqrt(2.0 * k * (np.cos(theta) - c0))
    return float(0.5 * u_max * np.sum(w * integrand))


# --- scalar maneuver -------------------------------------------------------


def _pendulum_run_stop(theta0, omega0, k, small_angle, dt, t0, max_time,
                       stop_fn, event_fn, stop_tol):
    """Chunked kernel propagation until stop_fn fires on a sample.

    stop_fn / event_fn take a theta value; the crossing step is refined by
    bisecting its length until |event| < stop_tol. Returns (times, theta,
    omega, exceeded).
    """
    times = [np.array([t0])]
    thetas = [np.array([theta0])]
    omegas = [np.array([omega0])]
    if stop_fn(theta0):
        return np.array([t0]), np.array([theta0]), np.array([omega0]), False
    n_total = int(math.floor(max_time / dt + 1e-9))
    done = 0
    th, om = theta0, omega0
    while done < n_total:
        n = min(_CHUNK, n_total - done)
        th_arr, om_arr = pendulum_steps(th, om, k, dt, n, small_angle)
        hit = np.nonzero(stop_fn(th_arr[1:]))[0]
        if hit.size:
            j = int(hit[0])  # crossing between sample j and j + 1
            times.append(t0 + dt * (done + 1 + np.arange(j)))
            thetas.append(th_arr[1:j + 1])
            omegas.append(om_arr[1:j + 1])
            t_prev = t0 + dt * (done + j)
            t_fin, th_fin, om_fin = _refine_pendulum(
                th_arr[j], om_arr[j], k, small_angle, dt, t_prev,
                stop_fn, event_fn, stop_tol)
            times.append(np.array([t_fin]))
            thetas.append(np.array([th_fin]))
            omegas.append(np.array([om_fin]))
            return (np.concatenate(times), np.concatenate(thetas),
                    np.concatenate(omegas), False)
        times.append(t0 + dt * (done + 1 + np.arange(n)))
        thetas.append(th_arr[1:])
        omegas.append(om_arr[1:])
        th, om = th_arr[-1], om_arr[-1]
        done += n
    return (np.concatenate(times), np.concatenate(thetas),
            np.concatenate(omegas), True)


def _refine_pendulum(th, om, k, small_angle, dt, t_prev, stop_fn, event_fn,
                     stop_tol):
    lo, hi = 0.0, dt
    th_arr, om_arr = pendulum_steps(th, om, k, dt, 1, small_angle)
    th_hi, om_hi = th_arr[1], om_arr[1]
    for _ in range(100):
        if abs(event_fn(th_hi)) < stop_tol:
            break
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        th_m, om_m = pendulum_steps(th, om, k, mid, 1, small_angle)
        if stop_fn(th_m[1]):
            hi, th_hi, om_hi = mid, th_m[1], om_m[1]
        else:
            lo = mid
    return t_prev + hi, th_hi, om_hi


def _pendulum_run_fixed(theta0, omega0, k, small_angle, dt, t0, duration):
    """Fixed-duration kernel propagation (for plan segments)."""
    n = int(math.floor(duration / dt + 1e-9))
    th_arr, om_arr = pendulum_steps(theta0, omega0, k, dt, n, small_angle)
    times = t0 + dt * np.arange(n + 1)
    rem = duration - n * dt
    if rem > 1e-12 * max(dt, 1.0):
        th_last, om_last = pendulum_steps(th_arr[-1], om_arr[-1], k, rem, 1,
                                          small_angle)
        th_arr = np.append(th_arr, th_last[1])
        om_arr = np.append(om_arr, om_last[1])
        times = np.append(times, t0 + duration)
    return times, th_arr, om_arr


def simulate_scalar_maneuver(scenario) -> Tuple[Trajectory, ManeuverSummary]:
    """Integrate the scalar pendulum for a scenario and summarize it.

    The field magnitude is frozen at its t = 0 value (the scalar model has
    no geometry to move through a varying field). Constant-current runs
    stop at the target rotation; bang-bang runs execute the planned
    segments and report residuals.
    """
    body = scenario.body()
    inertia = body.inertia
    area = math.pi * scenario.balloon.radius_m**2 * scenario.coils.turns
    b_mag = scenario.field_magnitude_at_start()
    current = scenario.maneuver.current_A
    params = PendulumParams(current=current, area=area,
                            field_magnitude=b_mag, inertia=inertia)
    k = params.torque_coefficient
    small_angle = scenario.maneuver.small_angle
    theta0 = math.radians(scenario.maneuver.initial_angle_deg)
    target = math.radians(scenario.maneuver.target_deg)
    dt = scenario.sim.dt_s
    wire = WireSpec(resistivity=scenario.coils.resistivity_ohm_mm2_per_m,
                    cross_section=scenario.coils.cross_section_mm2,
                    material_density=scenario.coils.material_density_kg_m3,
                    length=2.0 * math.pi * scenario.balloon.radius_m)
    resistance = coil_resistance(wire)

    if scenario.maneuver.type == "bang_bang":
        plan = plan_bang_bang(target, current, params, resistance)
        times, th, om = _pendulum_run_fixed(
            theta0, 0.0, k, small_angle, dt, 0.0, plan.segments[0].duration)
        t2, th2, om2 = _pendulum_run_fixed(
            th[-1], om[-1], -k, small_angle, dt, times[-1],
            plan.segments[1].duration)
        times = np.concatenate([times, t2[1:]])
        th = np.concatenate([th, th2[1:]])
        om = np.concatenate([om, om2[1:]])
        exceeded = False
        ohmic = plan.ohmic_energy
    else:
        def stop_fn(theta):
            return np.abs(theta - theta0) >= target

        def event_fn(theta):
            return abs(theta - theta0) - target

        times, th, om, exceeded = _pendulum_run_stop(
            theta0, 0.0, k, small_angle, dt, 0.0, scenario.sim.max_time_s,
            stop_fn, event_fn, scenario.sim.stop_tolerance_rad)
        ohmic = resistance * current**2 * times[-1]

    traj = Trajectory(times, np.column_stack([th, om]),
                      max_time_exceeded=exceeded)
    if small_angle:
        torque_series = abs(current * area * b_mag) * np.ones_like(th)
    else:
        torque_series = np.abs(current * area * b_mag * np.sin(th))
    kinetic_series = 0.5 * inertia * om**2
    rotation = abs(th[-1] - theta0)
    summary = ManeuverSummary(
        rotation_achieved=rotation,
        elapsed=float(times[-1]),
        residual_rate=abs(float(om[-1])),
        peak_torque=float(torque_series.max()),
        ohmic_energy=float(ohmic),
        peak_kinetic_energy=float(kinetic_series.max()),
        max_time_exceeded=exceeded,
        target_met=(not exceeded) and rotation >= target - 10 * scenario.sim.stop_tolerance_rad,
    )
    return traj, summary


# --- 3-D maneuver ----------------------------------------------------------


def _field_rows(model, orbit_spec, times):
    """Field vectors at the given times, shape (n, 3)."""
    if isinstance(model, geomag.UniformFieldSpec):
        return geomag.field_at_many(model, np.zeros((len(times), 3)))
    return geomag.field_at_many(model, orbit_mod.positions_at(orbit_spec, times))


def _twists(q_arr, q0_conj, axis):
    """Rotation about `axis` since q0 for an (n, 4) quaternion array."""
    a, b, c, d = q0_conj
    qw, qx, qy, qz = q_arr[:, 0], q_arr[:, 1], q_arr[:, 2], q_arr[:, 3]
    rw = qw * a - qx * b - qy * c - qz * d
    rx = qw * b + qx * a + qy * d - qz * c
    ry = qw * c - qx * d + qy * a + qz * b
    rz = qw * d + qx * c - qy * b + qz * a
    proj = rx * axis[0] + ry * axis[1] + rz * axis[2]
    return 2.0 * np.arctan2(proj, rw)


def simulate_3d_maneuver(scenario) -> Tuple[Trajectory, ManeuverSummary]:
    """Integrate the rigid body with coil torques along the scenario orbit.

    Geometry at t = 0: the reference coil normal starts at the initial
    angle from the field direction, rotated about the commanded axis; the
    commanded currents produce a moment along B_hat x axis so the torque
    acts about the commanded axis. A commanded axis parallel to B is
    physically unactuatable (torque is always perpendicular to B) and is
    reported via the underactuated flag without integrating.
    """
    body = scenario.body()
    inertia = body.inertia_tensor()
    inv_inertia = np.linalg.inv(inertia)
    coils = scenario.coil_set()
    model = scenario.field_model()
    orbit_spec = scenario.orbit_spec()
    dt = scenario.sim.dt_s
    current = scenario.maneuver.current_A
    target = math.radians(scenario.maneuver.target_deg)
    theta0 = math.radians(scenario.maneuver.initial_angle_deg)

    if orbit_spec is None:
        b0 = geomag.field_at(model, np.zeros(3))
    else:
        b0 = geomag.field_at(model, orbit_mod.position_at(orbit_spec, 0.0))
    b_hat = b0.B / b0.magnitude
    axis = np.asarray(scenario.maneuver.commanded_axis, dtype=float)
    axis = axis / np.linalg.norm(axis)

    # Reference coil normal is the last coil (z in the triad, the single
    # coil's normal otherwise).
    n_body = np.asarray(coils.coils[-1].normal)
    q_align = quat.between(n_body, b_hat)
    q0 = quat.multiply(quat.from_axis_angle(axis, theta0), q_align)
    q0 = quat.normalize(q0)

    torque_dir = np.cross(b_hat, axis)
    if np.linalg.norm(torque_dir) < 1e-9:
        summary = ManeuverSummary(
            rotation_achieved=0.0, elapsed=0.0, residual_rate=0.0,
            peak_torque=0.0, ohmic_energy=0.0, peak_kinetic_energy=0.0,
            underactuated=True)
        state0 = np.concatenate([q0, np.zeros(3)])
        return Trajectory(np.array([0.0]), state0[None, :]), summary

    coil_area = coils.coils[0].area * coils.coils[0].turns
    if len(coils) == 1:
        currents = np.array([current])
    else:
        moment_inertial = current * coil_area * torque_dir / np.linalg.norm(torque_dir)
        moment_body_target = quat.rotate_inverse(q0, moment_inertial)
        currents = decompose_moment(moment_body_target, coils)
    moment_body = (currents * coils.areas()) @ coils.normals()

    wire = WireSpec(resistivity=scenario.coils.resistivity_ohm_mm2_per_m,
                    cross_section=scenario.coils.cross_section_mm2,
                    material_density=scenario.coils.material_density_kg_m3,
                    length=2.0 * math.pi * scenario.balloon.radius_m)
    resistance = coil_resistance(wire)
    q0_conj = quat.conjugate(q0)

    def stop_fn(q_arr):
        return np.abs(_twists(q_arr, q0_conj, axis)) >= target

    def event_fn(q_row):
        return abs(_twists(q_row[None, :], q0_conj, axis)[0]) - target

    n_total = int(math.floor(scenario.sim.max_time_s / dt + 1e-9))
    q = q0.copy()
    w = np.zeros(3)
    times = [np.array([0.0])]
    q_parts = [q0[None, :]]
    w_parts = [np.zeros((1, 3))]
    done = 0
    exceeded = True
    while done < n_total:
        n = min(_CHUNK, n_total - done)
        t_start = done * dt
        half_times = t_start + 0.5 * dt * np.arange(2 * n + 1)
        b_rows = _field_rows(model, orbit_spec, half_times)
        q_arr, w_arr = body_steps(q, w, inertia, inv_inertia, moment_body,
                                  b_rows, dt, n)
        hit = np.nonzero(stop_fn(q_arr[1:]))[0]
        if hit.size:
            j = int(hit[0])
            times.append(t_start + dt * (1 + np.arange(j)))
            q_parts.append(q_arr[1:j + 1])
            w_parts.append(w_arr[1:j + 1])
            t_prev = t_start + dt * j
            t_fin, q_fin, w_fin = _refine_body(
                q_arr[j], w_arr[j], inertia, inv_inertia, moment_body,
                model, orbit_spec, dt, t_prev, stop_fn, event_fn,
                scenario.sim.stop_tolerance_rad)
            times.append(np.array([t_fin]))
            q_parts.append(q_fin[None, :])
            w_parts.append(w_fin[None, :])
            exceeded = False
            break
        times.append(t_start + dt * (1 + np.arange(n)))
        q_parts.append(q_arr[1:])
        w_parts.append(w_arr[1:])
        q, w = q_arr[-1], w_arr[-1]
        done += n

    times = np.concatenate(times)
    q_all = np.vstack(q_parts)
    w_all = np.vstack(w_parts)
    traj = Trajectory(times, np.hstack([q_all, w_all]),
                      max_time_exceeded=exceeded)

    # Post-hoc derived series for the summary.
    b_series = _field_rows(model, orbit_spec, times)
    m_inertial = np.array([quat.rotate(quat.normalize(qi), moment_body)
                           for qi in q_all[:: max(1, len(q_all) // 512)]])
    b_sub = b_series[:: max(1, len(q_all) // 512)]
    torque_peak = float(np.max(np.linalg.norm(np.cross(m_inertial, b_sub), axis=1)))
    kinetic = 0.5 * np.einsum("ni,ij,nj->n", w_all, inertia, w_all)
    rotation = abs(float(_twists(q_all[-1][None, :], q0_conj, axis)[0]))
    ohmic = resistance * float(np.sum(currents**2)) * float(times[-1])
    summary = ManeuverSummary(
        rotation_achieved=rotation,
        elapsed=float(times[-1]),
        residual_rate=float(np.linalg.norm(w_all[-1])),
        peak_torque=torque_peak,
        ohmic_energy=ohmic,
        peak_kinetic_energy=float(kinetic.max()),
        max_time_exceeded=exceeded,
        target_met=(not exceeded),
    )
    return traj, summary


def _refine_body(q, w, inertia, inv_inertia, moment_body, model, orbit_spec,
                 dt, t_prev, stop_fn, event_fn, stop_tol):
    lo, hi = 0.0, dt

    def step(h):
        half_times = t_prev + 0.5 * h * np.arange(3)
        b_rows = _field_rows(model, orbit_spec, half_times)
        q_arr, w_arr = body_steps(q, w, inertia, inv_inertia, moment_body,
                                  b_rows, h, 1)
        return q_arr[1], w_arr[1]

    q_hi, w_hi = step(dt)
    for _ in range(100):
        if abs(event_fn(q_hi)) < stop_tol:
            break
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        q_m, w_m = step(mid)
        if stop_fn(q_m[None, :])[0]:
            hi, q_hi, w_hi = mid, q_m, w_m
        else:
            lo = mid
    return t_prev + hi, q_hi, w_hi


def field_ratio_perigee_apogee(orbit_spec: orbit_mod.EllipticalOrbitSpec,
                               dipole: geomag.DipoleFieldSpec) -> float:
    """|B| at perigee over |B| at apogee along the orbit line.

    For an equatorial orbit around an untilted dipole this is exactly the
    inverse-cube radius ratio (r_apogee / r_perigee)^3.
    """
    basis = orbit_mod._perifocal_to_inertial(orbit_spec)
    perigee = basis @ np.array([orbit_spec.perigee_radius, 0.0, 0.0])
    apogee = basis @ np.array([-orbit_spec.apogee_radius, 0.0, 0.0])
    b_p = geomag.dipole_field(dipole, perigee).magnitude
    b_a = geomag.dipole_field(dipole, apogee).magnitude
    return b_p / b_a
