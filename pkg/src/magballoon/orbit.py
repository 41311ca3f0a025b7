"""Two-body orbit propagation (circular and Keplerian elliptical).

The orbit exists only to move the balloon through the field model; it is
one-way coupled (orbit -> field -> torque) and unperturbed.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import NoConvergence

MU_EARTH = 3.986004418e14  # m^3/s^2

_Z_AXIS = (0.0, 0.0, 1.0)


def _unit(v, name):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError(f"{name} must be nonzero")
    return v / n


@dataclass(frozen=True)
class CircularOrbitSpec:
    altitude: float  # m above reference_radius
    reference_radius: float = 6.371e6
    gravitational_parameter: float = MU_EARTH
    plane_normal: tuple = _Z_AXIS
    phase: float = 0.0  # rad at t = 0

    def __post_init__(self):
        if not self.altitude > 0:
            raise ValueError("altitude must be positive")
        if not self.gravitational_parameter > 0:
            raise ValueError("gravitational_parameter must be positive")
        object.__setattr__(self, "plane_normal",
                           tuple(_unit(self.plane_normal, "plane_normal")))

    @property
    def radius(self) -> float:
        return self.reference_radius + self.altitude


@dataclass(frozen=True)
class EllipticalOrbitSpec:
    perigee_radius: float  # m from center
    apogee_radius: float
    gravitational_parameter: float = MU_EARTH
    raan: float = 0.0            # rad, right ascension of ascending node
    inclination: float = 0.0     # rad
    arg_perigee: float = 0.0     # rad
    epoch_mean_anomaly: float = 0.0  # rad at t = 0

    def __post_init__(self):
        if not self.perigee_radius > 0:
            raise ValueError("perigee_radius must be positive")
        if self.apogee_radius < self.perigee_radius:
            raise ValueError("apogee_radius must be >= perigee_radius")
        if not self.gravitational_parameter > 0:
            raise ValueError("gravitational_parameter must be positive")

    @property
    def semi_major_axis(self) -> float:
        return 0.5 * (self.perigee_radius + self.apogee_radius)

    @property
    def eccentricity(self) -> float:
        return ((self.apogee_radius - self.perigee_radius)
                / (self.apogee_radius + self.perigee_radius))


OrbitSpec = Union[CircularOrbitSpec, EllipticalOrbitSpec]


def solve_kepler(mean_anomaly: float, e: float, tol: float = 1e-12,
                 max_iter: int = 50) -> float:
    """Solve E - e sin E = M for the eccentric anomaly.

    Damped Newton iteration started at E0 = M; raises NoConvergence if the
    residual has not dropped below tol after max_iter iterations.
    """
    if not 0.0 <= e < 1.0:
        raise ValueError("eccentricity must be in [0, 1)")
    M = float(mean_anomaly)
    E = M
    for _ in range(max_iter):
        residual = E - e * math.sin(E) - M
        if abs(residual) < tol:
            return E
        step = residual / (1.0 - e * math.cos(E))
        # Damp oversized steps; the derivative can be small near E = 0
        # for high eccentricity.
        if abs(step) > 1.0:
            step = math.copysign(1.0, step)
        E -= step
    raise NoConvergence(
        f"Kepler solve stalled at M={M}, e={e} (residual {residual:.3e})")


def _plane_basis(normal: np.ndarray):
    """Right-handed in-plane basis (e1, e2) with e2 = normal x e1."""
    ref = np.array([1.0, 0.0, 0.0])
    if abs(np.dot(ref, normal)) > 0.9:
        ref = np.array([0.0, 1.0, 0.0])
    e1 = ref - np.dot(ref, normal) * normal
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    return e1, e2


def circular_position(spec: CircularOrbitSpec, t: float) -> np.ndarray:
    """Inertial position on the circular orbit at time t."""
    r = spec.radius
    n = math.sqrt(spec.gravitational_parameter / r**3)
    psi = spec.phase + n * t
    e1, e2 = _plane_basis(np.asarray(spec.plane_normal))
    return r * (math.cos(psi) * e1 + math.sin(psi) * e2)


def _perifocal_to_inertial(spec: EllipticalOrbitSpec) -> np.ndarray:
    """3-1-3 rotation matrix taking perifocal coordinates to inertial."""
    cO, sO = math.cos(spec.raan), math.sin(spec.raan)
    ci, si = math.cos(spec.inclination), math.sin(spec.inclination)
    cw, sw = math.cos(spec.arg_perigee), math.sin(spec.arg_perigee)
    r3_O = np.array([[cO, -sO, 0], [sO, cO, 0], [0, 0, 1]])
    r1_i = np.array([[1, 0, 0], [0, ci, -si], [0, si, ci]])
    r3_w = np.array([[cw, -sw, 0], [sw, cw, 0], [0, 0, 1]])
    return r3_O @ r1_i @ r3_w


def propagate_elliptical(spec: EllipticalOrbitSpec, t: float) -> np.ndarray:
    """Inertial position on the Keplerian ellipse at time t."""
    a = spec.semi_major_axis
    e = spec.eccentricity
    n = math.sqrt(spec.gravitational_parameter / a**3)
    M = spec.epoch_mean_anomaly + n * t
    E = solve_kepler(math.fmod(M, 2.0 * math.pi), e)
    x = a * (math.cos(E) - e)
    y = a * math.sqrt(1.0 - e * e) * math.sin(E)
    return _perifocal_to_inertial(spec) @ np.array([x, y, 0.0])


def position_at(spec: OrbitSpec, t: float) -> np.ndarray:
    """Dispatch to the matching propagator."""
    if isinstance(spec, CircularOrbitSpec):
        return circular_position(spec, t)
    if isinstance(spec, EllipticalOrbitSpec):
        return propagate_elliptical(spec, t)
    raise TypeError(f"unsupported orbit spec {type(spec).__name__}")


def positions_at(spec: OrbitSpec, times: np.ndarray) -> np.ndarray:
    """Positions for an array of times, shape (n, 3)."""
    times = np.asarray(times, dtype=float).ravel()
    if isinstance(spec, CircularOrbitSpec):
        r = spec.radius
        n = math.sqrt(spec.gravitational_parameter / r**3)
        psi = spec.phase + n * times
        e1, e2 = _plane_basis(np.asarray(spec.plane_normal))
        return r * (np.cos(psi)[:, None] * e1 + np.sin(psi)[:, None] * e2)
    return np.array([propagate_elliptical(spec, t) for t in times])


def orbital_period(spec: OrbitSpec) -> float:
    """2 pi sqrt(a^3 / mu), with a = r for the circular case."""
    if isinstance(spec, CircularOrbitSpec):
        a = spec.radius
    elif isinstance(spec, EllipticalOrbitSpec):
        a = spec.semi_major_axis
    else:
        raise TypeError(f"unsupported orbit spec {type(spec).__name__}")
    return 2.0 * math.pi * math.sqrt(a**3 / spec.gravitational_parameter)
