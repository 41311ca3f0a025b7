"""Rotational dynamics of the balloon.

Two models live here:

* the scalar pendulum  I theta_dd = -i A B sin(theta), where theta is the
  angle between the coil NORMAL and the field vector (the complementary
  plane-to-field angle is reported alongside at I/O boundaries); and
* a 3-D rigid body with quaternion kinematics and Euler dynamics, driven
  by the magnetic torque of up to three orthogonal coils.

Angle convention: with theta measured normal-to-field, both the
constant-torque small-angle regime (theta near 90 deg, sin(theta) ~ 1)
and the restoring pendulum equation use the same formula. Radians
throughout; degrees only at I/O boundaries.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from . import quat
from .errors import CountMismatch, InactiveCoil, SingularInertia
from .geomag import FieldSample


class InertiaModel(str, Enum):
    RING_AXIS = "ring_axis"            # I = m R^2
    RING_DIAMETER = "ring_diameter"    # I = m R^2 / 2
    SPHERICAL_SHELL = "spherical_shell"  # I = 2 m R^2 / 3
    EXPLICIT = "explicit"              # caller-supplied 3x3 tensor

_SCALAR_FACTORS = {
    InertiaModel.RING_AXIS: 1.0,
    InertiaModel.RING_DIAMETER: 0.5,
    InertiaModel.SPHERICAL_SHELL: 2.0 / 3.0,
}


@dataclass(frozen=True)
class BalloonBody:
    """Mass, radius, and inertia model of the inflatable structure.

    The baseline convention places the whole mass on a ring of the balloon
    radius spinning about its axis (I = m R^2 = 11250 kg m^2 for 50 kg at
    15 m); alternative models are selectable.
    """

    mass: float
    radius: float
    inertia_model: InertiaModel = InertiaModel.RING_AXIS
    explicit_inertia: Optional[np.ndarray] = None  # 3x3, kg m^2

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.inertia_model is InertiaModel.EXPLICIT:
            tensor = np.asarray(self.explicit_inertia, dtype=float)
            if tensor.shape != (3, 3):
                raise ValueError("explicit inertia must be a 3x3 tensor")
            eigvals = np.linalg.eigvalsh(0.5 * (tensor + tensor.T))
            if np.any(eigvals <= 0):
                raise ValueError("inertia tensor must be positive-definite")
            object.__setattr__(self, "explicit_inertia", tensor)
        elif self.explicit_inertia is not None:
            raise ValueError("explicit_inertia requires inertia_model='explicit'")

    @property
    def inertia(self) -> float:
        """Scalar moment of inertia for the single-axis models."""
        if self.inertia_model is InertiaModel.EXPLICIT:
            raise ValueError("explicit tensor has no scalar inertia")
        return _SCALAR_FACTORS[self.inertia_model] * self.mass * self.radius**2

    def inertia_tensor(self) -> np.ndarray:
        """3x3 inertia for the rigid-body model.

        The single-axis models are used isotropically in 3-D; an
        axis-resolved tensor is available via the explicit model.
        """
        if self.inertia_model is InertiaModel.EXPLICIT:
            return self.explicit_inertia.copy()
        return self.inertia * np.eye(3)


@dataclass(frozen=True)
class Coil:
    """One current loop: area, body-frame unit normal, turn count."""

    area: float
    normal: tuple
    turns: int = 1

    def __post_init__(self):
        if not self.area > 0:
            raise ValueError("coil area must be positive")
        if self.turns < 1:
            raise ValueError("turns must be >= 1")
        n = np.asarray(self.normal, dtype=float)
        if abs(np.linalg.norm(n) - 1.0) > 1e-9:
            raise ValueError("coil normal must be unit length")
        object.__setattr__(self, "normal", tuple(n))


@dataclass(frozen=True)
class CoilSet:
    """One to three current loops; three coils must be mutually orthogonal."""

    coils: Tuple[Coil, ...]

    def __post_init__(self):
        if not 1 <= len(self.coils) <= 3:
            raise ValueError("CoilSet supports 1 to 3 coils")
        if len(self.coils) == 3:
            for i in range(3):
                for j in range(i + 1, 3):
                    dot = abs(np.dot(self.coils[i].normal, self.coils[j].normal))
                    if dot >= 1e-9:
                        raise ValueError(
                            f"coils {i} and {j} are not orthogonal (|dot| = {dot:.2e})")

    def __len__(self):
        return len(self.coils)

    @classmethod
    def single(cls, radius: float, normal=(0.0, 0.0, 1.0)) -> "CoilSet":
        """One great-circle loop of the given balloon radius."""
        return cls((Coil(area=math.pi * radius**2, normal=tuple(normal)),))

    @classmethod
    def orthogonal_triad(cls, radius: float) -> "CoilSet":
        """Three great-circle loops along the body x, y, z axes."""
        area = math.pi * radius**2
        return cls((
            Coil(area=area, normal=(1.0, 0.0, 0.0)),
            Coil(area=area, normal=(0.0, 1.0, 0.0)),
            Coil(area=area, normal=(0.0, 0.0, 1.0)),
        ))

    def normals(self) -> np.ndarray:
        return np.array([c.normal for c in self.coils])

    def areas(self) -> np.ndarray:
        return np.array([c.area * c.turns for c in self.coils])


@dataclass(frozen=True)
class ScalarAttitudeState:
    """Pendulum state: normal-to-field angle and its rate."""

    theta: float
    theta_dot: float
    time: float = 0.0


@dataclass(frozen=True)
class AttitudeState3D:
    """Rigid-body state: body->inertial quaternion and body angular rate."""

    orientation: np.ndarray  # (w, x, y, z), unit
    omega_body: np.ndarray   # rad/s
    time: float = 0.0


@dataclass(frozen=True)
class PendulumParams:
    """Parameters of I theta_dd = -i A B sin(theta)."""

    current: float
    area: float
    field_magnitude: float
    inertia: float

    @property
    def torque_coefficient(self) -> float:
        """k = i A B / I, rad/s^2."""
        return self.current * self.area * self.field_magnitude / self.inertia


def magnetic_moment(coils: CoilSet, currents: Sequence[float],
                    orientation: Optional[np.ndarray] = None) -> np.ndarray:
    """Total magnetic moment, A m^2, in the inertial frame.

    m = sum_j i_j A_j n_j, with coil normals rotated by the body
    orientation (identity if omitted).
    """
    currents = np.asarray(currents, dtype=float)
    if currents.shape != (len(coils),):
        raise CountMismatch(
            f"{len(currents)} currents for {len(coils)} coils")
    m_body = (currents * coils.areas()) @ coils.normals()
    if orientation is None:
        return m_body
    return quat.rotate(orientation, m_body)


def magnetic_torque(m: np.ndarray, B: np.ndarray) -> np.ndarray:
    """tau = m x B; identically perpendicular to B."""
    return np.cross(m, B)


def pendulum_rhs(state: ScalarAttitudeState,
                 params: PendulumParams) -> Tuple[float, float]:
    """(theta_dot, theta_dd) for the restoring pendulum equation."""
    k = params.torque_coefficient
    return state.theta_dot, -k * math.sin(state.theta)


def small_angle_theta(t: float, params: PendulumParams) -> float:
    """Rotation under the constant-torque approximation from rest.

    Near theta = 90 deg the torque magnitude i A B sin(theta) is nearly
    constant, so the rotation grows as theta(t) = k t^2 / 2.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    return 0.5 * params.torque_coefficient * t * t


def small_angle_slew_time(theta_target: float, params: PendulumParams) -> float:
    """Time to rotate theta_target from rest at constant torque."""
    if not theta_target > 0:
        raise ValueError("theta_target must be positive")
    k = params.torque_coefficient
    if k == 0:
        raise InactiveCoil("zero torque coefficient")
    return math.sqrt(2.0 * theta_target / k)


def final_slew_rate(theta_target: float, params: PendulumParams) -> float:
    """Angular rate at the end of a constant-torque slew: sqrt(2 k theta)."""
    if not theta_target > 0:
        raise ValueError("theta_target must be positive")
    k = params.torque_coefficient
    if k == 0:
        raise InactiveCoil("zero torque coefficient")
    return math.sqrt(2.0 * k * theta_target)


def body_rhs_3d(state: AttitudeState3D, body: BalloonBody, coils: CoilSet,
                currents: Sequence[float],
                field: FieldSample) -> Tuple[np.ndarray, np.ndarray]:
    """(q_dot, omega_dot) for the magnetically torqued rigid body.

    Kinematics q_dot = q (0, omega)/2; dynamics I omega_dot =
    tau_body - omega x (I omega), with the torque evaluated in the body
    frame from the coil moments and the field rotated into the body.
    """
    inertia = body.inertia_tensor()
    try:
        inv_inertia = np.linalg.inv(inertia)
    except np.linalg.LinAlgError as exc:
        raise SingularInertia(str(exc)) from None
    currents = np.asarray(currents, dtype=float)
    if currents.shape != (len(coils),):
        raise CountMismatch(f"{len(currents)} currents for {len(coils)} coils")
    q = state.orientation
    w = state.omega_body
    m_body = (currents * coils.areas()) @ coils.normals()
    b_body = quat.rotate_inverse(q, field.B)
    torque_body = np.cross(m_body, b_body)
    q_dot = 0.5 * quat.multiply(q, np.concatenate(([0.0], w)))
    w_dot = inv_inertia @ (torque_body - np.cross(w, inertia @ w))
    return q_dot, w_dot


def renormalize(state: AttitudeState3D) -> AttitudeState3D:
    """Rescale the quaternion to unit norm; rate and time unchanged."""
    return AttitudeState3D(orientation=quat.normalize(state.orientation),
                           omega_body=state.omega_body, time=state.time)
