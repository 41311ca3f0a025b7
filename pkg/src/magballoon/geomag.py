"""Magnetic field models: uniform and centered (non-tilted) Earth dipole.

The dipole default is calibrated so the equatorial magnitude at 2000 km
altitude equals 1.375e-5 T, which fixes the surface equatorial field at
3.12e-5 T for a 6371 km reference radius. All positions and field vectors
live in a single non-rotating inertial frame; Earth rotation is ignored.
"""

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import PositionTooDeep

EARTH_RADIUS_M = 6.371e6
DEFAULT_EQUATORIAL_SURFACE_FIELD_T = 3.12e-5

_Z_AXIS = (0.0, 0.0, 1.0)


def _as_unit(v, name):
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector")
    n = np.linalg.norm(v)
    if abs(n - 1.0) > 1e-12:
        raise ValueError(f"{name} must be unit length (|v| = {n})")
    return v


@dataclass(frozen=True)
class UniformFieldSpec:
    """Position-independent field of fixed magnitude along a unit direction."""

    magnitude: float
    direction: tuple = _Z_AXIS

    def __post_init__(self):
        if not self.magnitude > 0:
            raise ValueError("magnitude must be positive")
        object.__setattr__(self, "direction",
                           tuple(_as_unit(self.direction, "direction")))


@dataclass(frozen=True)
class DipoleFieldSpec:
    """Centered point dipole, axis-aligned by default (no tilt).

    equatorial_surface_field is the field magnitude at the magnetic equator
    at reference_radius; the magnitude falls off as (reference_radius/r)^3
    and doubles from equator to pole at equal radius.
    """

    equatorial_surface_field: float = DEFAULT_EQUATORIAL_SURFACE_FIELD_T
    reference_radius: float = EARTH_RADIUS_M
    dipole_axis: tuple = _Z_AXIS

    def __post_init__(self):
        if not self.equatorial_surface_field > 0:
            raise ValueError("equatorial_surface_field must be positive")
        if not self.reference_radius > 0:
            raise ValueError("reference_radius must be positive")
        object.__setattr__(self, "dipole_axis",
                           tuple(_as_unit(self.dipole_axis, "dipole_axis")))


@dataclass(frozen=True)
class FieldSample:
    """A field vector and its magnitude at one query point."""

    B: np.ndarray
    magnitude: float


FieldModel = Union[UniformFieldSpec, DipoleFieldSpec]


def uniform_field(spec: UniformFieldSpec, position) -> FieldSample:
    """Evaluate a uniform field; the position is accepted but irrelevant."""
    B = spec.magnitude * np.asarray(spec.direction)
    return FieldSample(B=B, magnitude=spec.magnitude)


def dipole_field(spec: DipoleFieldSpec, position) -> FieldSample:
    """Evaluate the point-dipole field at an inertial position.

    B(r) = B_eq (R/r)^3 [3 (m.r_hat) r_hat - m], with m the unit dipole
    axis. Polar-angle convention: the magnetic colatitude is the angle
    between r_hat and the dipole axis, so |B| = B_eq (R/r)^3
    sqrt(1 + 3 cos^2(colatitude)); equatorial points (r_hat perpendicular
    to the axis) see exactly B_eq (R/r)^3.

    Queries with |position| <= 0.5 reference_radius are rejected as
    near-singular.
    """
    position = np.asarray(position, dtype=float)
    r = np.linalg.norm(position)
    if r <= 0.5 * spec.reference_radius:
        raise PositionTooDeep(
            f"|position| = {r:.3e} m is inside 0.5 x reference radius")
    r_hat = position / r
    m_hat = np.asarray(spec.dipole_axis)
    scale = spec.equatorial_surface_field * (spec.reference_radius / r) ** 3
    B = scale * (3.0 * np.dot(m_hat, r_hat) * r_hat - m_hat)
    return FieldSample(B=B, magnitude=float(np.linalg.norm(B)))


def field_at(model: FieldModel, position) -> FieldSample:
    """Dispatch to the model-specific evaluator."""
    if isinstance(model, UniformFieldSpec):
        return uniform_field(model, position)
    if isinstance(model, DipoleFieldSpec):
        return dipole_field(model, position)
    raise TypeError(f"unsupported field model {type(model).__name__}")


def field_at_many(model: FieldModel, positions: np.ndarray) -> np.ndarray:
    """Vectorized field evaluation over an (n, 3) array of positions.

    Used by the maneuver integrator to precompute the field along an orbit
    for a block of RK4 stage times.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 3)
    if isinstance(model, UniformFieldSpec):
        B = model.magnitude * np.asarray(model.direction)
        return np.broadcast_to(B, positions.shape).copy()
    if isinstance(model, DipoleFieldSpec):
        r = np.linalg.norm(positions, axis=1)
        if np.any(r <= 0.5 * model.reference_radius):
            raise PositionTooDeep("batch contains near-singular positions")
        r_hat = positions / r[:, None]
        m_hat = np.asarray(model.dipole_axis)
        scale = model.equatorial_surface_field * (model.reference_radius / r) ** 3
        return scale[:, None] * (3.0 * (r_hat @ m_hat)[:, None] * r_hat - m_hat)
    raise TypeError(f"unsupported field model {type(model).__name__}")
