import math

import numpy as np
import pytest

from magballoon import odesolve
from magballoon.errors import NonFiniteDerivative
from magballoon.odesolve import IntegrationSettings, Trajectory


def test_rk4_constant_rhs():
    y = odesolve.rk4_step(lambda t, y: np.zeros(1), np.array([3.0]), 0.0, 0.5)
    np.testing.assert_array_equal(y, [3.0])


def test_rk4_exponential_step():
    """One RK4 step of y' = y matches the 4th-order Taylor value exactly."""
    y = odesolve.rk4_step(lambda t, y: y, np.array([1.0]), 0.0, 0.1)
    taylor = sum(0.1**n / math.factorial(n) for n in range(5))
    assert y[0] == pytest.approx(taylor, rel=1e-15)
    assert y[0] == pytest.approx(1.10517083, abs=5e-9)
    assert y[0] == pytest.approx(math.exp(0.1), abs=1e-7)


def test_rk4_convergence_order():
    """Global error on y' = y over [0, 1] must shrink ~16x per halving."""
    def run(n):
        y = np.array([1.0])
        dt = 1.0 / n
        for i in range(n):
            y = odesolve.rk4_step(lambda t, s: s, y, i * dt, dt)
        return abs(y[0] - math.e)

    order = math.log2(run(64) / run(128))
    assert order > 3.9


def test_rk4_harmonic_oscillator_closure():
    """One full period of y'' = -y at dt = T/1000 returns to the start."""
    def rhs(t, y):
        return np.array([y[1], -y[0]])

    period = 2.0 * math.pi
    n = 1000
    y = np.array([1.0, 0.0])
    for i in range(n):
        y = odesolve.rk4_step(rhs, y, i * period / n, period / n)
    np.testing.assert_allclose(y, [1.0, 0.0], atol=1e-9)


def test_rk4_nonfinite_derivative():
    with pytest.raises(NonFiniteDerivative):
        odesolve.rk4_step(lambda t, y: np.array([math.nan]),
                          np.array([1.0]), 0.0, 0.1)


def test_settings_validation():
    with pytest.raises(ValueError):
        IntegrationSettings(dt=0.0)
    with pytest.raises(ValueError):
        IntegrationSettings(dt=1.0, max_time=0.5)
    with pytest.raises(ValueError):
        IntegrationSettings(stop_tolerance=-1.0)


def test_trajectory_validation():
    with pytest.raises(ValueError):
        Trajectory(times=np.array([]), states=np.zeros((0, 1)))
    with pytest.raises(ValueError):
        Trajectory(times=np.array([0.0, 0.0]), states=np.zeros((2, 1)))


def test_integrate_immediate_stop():
    traj = odesolve.integrate(lambda t, y: y, np.array([1.0]), 0.0,
                              stop=lambda y: True,
                              settings=IntegrationSettings(dt=0.1, max_time=1.0))
    assert len(traj) == 1
    assert not traj.max_time_exceeded


def test_integrate_max_time_flag():
    settings = IntegrationSettings(dt=0.5, max_time=10.0)
    traj = odesolve.integrate(lambda t, y: np.zeros(1), np.array([0.0]), 0.0,
                              stop=lambda y: False, settings=settings)
    assert traj.max_time_exceeded
    assert traj.times[-1] == pytest.approx(10.0)
    np.testing.assert_allclose(np.diff(traj.times), 0.5, rtol=1e-12)


def test_integrate_timestamps():
    settings = IntegrationSettings(dt=0.25, max_time=100.0)
    traj = odesolve.integrate(lambda t, y: np.ones(1), np.array([0.0]), 0.0,
                              stop=lambda y: y[0] >= 2.0, settings=settings)
    # uniform interior steps; only the final (refined) step may differ
    np.testing.assert_allclose(np.diff(traj.times[:-1]), 0.25, rtol=1e-12)
    assert traj.times[-1] > traj.times[-2]
    assert traj.states[-1, 0] == pytest.approx(2.0, abs=1e-9)


def test_integrate_event_refinement():
    """With an event scalar the crossing lands within tolerance."""
    settings = IntegrationSettings(dt=0.3, max_time=50.0, stop_tolerance=1e-9)
    traj = odesolve.integrate(lambda t, y: np.ones(1), np.array([0.0]), 0.0,
                              stop=lambda y: y[0] >= 1.0,
                              settings=settings,
                              event=lambda y: y[0] - 1.0)
    assert abs(traj.states[-1, 0] - 1.0) < 1e-9
    assert traj.times[-1] == pytest.approx(1.0, abs=1e-9)


def _pendulum_rhs(k):
    def rhs(t, y):
        return np.array([y[1], -k * math.sin(y[0])])
    return rhs


def test_pendulum_stop_time_step_insensitive():
    """The refined stop time for a 90->60 deg pendulum descent moves by
    less than 0.1% when the step is halved."""
    k = 8.639379797371932e-7
    target = math.radians(60.0)

    def run(dt):
        settings = IntegrationSettings(dt=dt, max_time=5e3,
                                       stop_tolerance=1e-9)
        traj = odesolve.integrate(_pendulum_rhs(k),
                                  np.array([math.pi / 2.0, 0.0]), 0.0,
                                  stop=lambda y: y[0] <= target,
                                  settings=settings,
                                  event=lambda y: y[0] - target)
        assert not traj.max_time_exceeded
        return traj.times[-1]

    t1, t2 = run(2.0), run(1.0)
    assert abs(t1 - t2) / t2 < 1e-3


def test_pendulum_energy_conserved():
    """RK4 on the undriven pendulum holds 0.5 w^2 - k cos(theta) steady."""
    k = 8.639379797371932e-7
    rhs = _pendulum_rhs(k)
    y = np.array([math.pi / 2.0, 0.0])
    e0 = 0.5 * y[1]**2 - k * math.cos(y[0])
    dt = 1.0
    for i in range(2500):
        y = odesolve.rk4_step(rhs, y, i * dt, dt)
    e1 = 0.5 * y[1]**2 - k * math.cos(y[0])
    assert abs(e1 - e0) < 1e-9 * k
