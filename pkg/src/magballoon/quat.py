"""Minimal scalar-first quaternion helpers (w, x, y, z), body -> inertial."""

import math

import numpy as np

from .errors import ZeroQuaternion

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])


def multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def conjugate(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def normalize(q: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(q)
    if n == 0:
        raise ZeroQuaternion("cannot normalize a zero quaternion")
    return q / n


def rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate a body-frame vector into the inertial frame."""
    w = q[0]
    u = q[1:]
    return (2.0 * np.dot(u, v) * u
            + (w * w - np.dot(u, u)) * np.asarray(v, dtype=float)
            + 2.0 * w * np.cross(u, v))


def rotate_inverse(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate an inertial-frame vector into the body frame."""
    return rotate(conjugate(q), v)


def from_axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n == 0:
        raise ValueError("rotation axis must be nonzero")
    half = 0.5 * angle
    return np.concatenate(([math.cos(half)], math.sin(half) * axis / n))


def between(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minimal rotation taking unit vector a onto unit vector b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.cross(a, b)
    d = float(np.dot(a, b))
    if d < -1.0 + 1e-12:
        # Antipodal: rotate pi about any axis perpendicular to a.
        perp = np.cross(a, [1.0, 0.0, 0.0])
        if np.linalg.norm(perp) < 1e-9:
            perp = np.cross(a, [0.0, 1.0, 0.0])
        return from_axis_angle(perp, math.pi)
    q = np.concatenate(([1.0 + d], c))
    return q / np.linalg.norm(q)


def twist_angle(q: np.ndarray, axis: np.ndarray) -> float:
    """Signed rotation of q about a unit axis (swing-twist decomposition)."""
    w = q[0]
    proj = float(np.dot(q[1:], axis))
    if w == 0.0 and proj == 0.0:
        return 0.0
    return 2.0 * math.atan2(proj, w)
