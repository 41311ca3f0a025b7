"""Fixed-step classical RK4 with event-based stopping.

The dynamics here are smooth and slow (angular accelerations around
1e-6 rad/s^2), so a deterministic fixed step with a bisection-refined
terminal step beats an adaptive controller for testability.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NonFiniteDerivative


@dataclass(frozen=True)
class IntegrationSettings:
    dt: float = 0.1
    max_time: float = 1e6
    stop_tolerance: float = 1e-6  # rad, for angle-crossing events

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.max_time > self.dt:
            raise ValueError("max_time must exceed dt")
        if not self.stop_tolerance > 0:
            raise ValueError("stop_tolerance must be positive")


@dataclass
class Trajectory:
    """Accepted integration samples; times strictly increasing from t0."""

    times: np.ndarray          # (n,)
    states: np.ndarray         # (n, state_dim)
    max_time_exceeded: bool = False

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if len(self.times) == 0:
            raise ValueError("a trajectory needs at least one sample")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must strictly increase")

    def __len__(self):
        return len(self.times)


def rk4_step(rhs: Callable, state: np.ndarray, t: float, dt: float) -> np.ndarray:
    """One classical 4th-order Runge-Kutta update of y' = rhs(t, y)."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    y = np.asarray(state, dtype=float)
    k1 = np.asarray(rhs(t, y), dtype=float)
    k2 = np.asarray(rhs(t + 0.5 * dt, y + 0.5 * dt * k1), dtype=float)
    k3 = np.asarray(rhs(t + 0.5 * dt, y + 0.5 * dt * k2), dtype=float)
    k4 = np.asarray(rhs(t + dt, y + dt * k3), dtype=float)
    if not (np.all(np.isfinite(k1)) and np.all(np.isfinite(k2))
            and np.all(np.isfinite(k3)) and np.all(np.isfinite(k4))):
        raise NonFiniteDerivative(f"non-finite derivative near t = {t}")
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(rhs: Callable, state0, t0: float, stop: Callable,
              settings: IntegrationSettings,
              event: Optional[Callable] = None) -> Trajectory:
    """Step until the stop predicate fires or max_time elapses.

    stop(state) -> bool is tested after each accepted step; on the first
    True the final step is refined by bisecting its length. When an
    `event` scalar (event(state) crosses zero exactly where stop flips) is
    supplied, bisection runs until |event| < settings.stop_tolerance;
    otherwise it bisects the step to machine-level time resolution.

    A never-firing predicate yields a trajectory flagged
    max_time_exceeded rather than an exception.
    """
    y = np.asarray(state0, dtype=float)
    times = [t0]
    states = [y]
    if stop(y):
        return Trajectory(np.array(times), np.array(states))
    n_steps = int(np.floor(settings.max_time / settings.dt + 1e-9))
    for i in range(1, n_steps + 1):
        t_prev = t0 + (i - 1) * settings.dt
        y_next = rk4_step(rhs, y, t_prev, settings.dt)
        if stop(y_next):
            t_stop, y_stop = _refine_crossing(
                rhs, y, t_prev, settings.dt, stop, event,
                settings.stop_tolerance)
            times.append(t_stop)
            states.append(y_stop)
            return Trajectory(np.array(times), np.array(states))
        y = y_next
        times.append(t0 + i * settings.dt)
        states.append(y)
    return Trajectory(np.array(times), np.array(states), max_time_exceeded=True)


def _refine_crossing(rhs, y_prev, t_prev, dt, stop, event, tol):
    """Bisect the final step length so the stop crossing is tightly located."""
    lo, hi = 0.0, dt
    y_hi = rk4_step(rhs, y_prev, t_prev, dt)
    for _ in range(100):
        if event is not None and abs(event(y_hi)) < tol:
            break
        if event is None and (hi - lo) <= 1e-14 * dt:
            break
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        y_mid = rk4_step(rhs, y_prev, t_prev, mid)
        if stop(y_mid):
            hi, y_hi = mid, y_mid
        else:
            lo = mid
    return t_prev + hi, y_hi
