"""Pure-Python propagation kernels; mirrors the compiled _core signatures.

Both backends advance fixed-step classical RK4 and record every state.
The pendulum kernel works on plain floats (fastest in CPython); the 3-D
kernel uses small numpy vectors.
"""

import math

import numpy as np

BACKEND = "python"


def pendulum_steps(theta0, omega0, k, dt, n, small_angle=False):
    """Advance the scalar pendulum n steps of size dt.

    Dynamics: theta_dd = -k sin(theta), or theta_dd = -k when
    small_angle is set (constant-torque regime). Returns (theta, omega)
    arrays of length n + 1 including the initial state.
    """
    theta = np.empty(n + 1)
    omega = np.empty(n + 1)
    th = float(theta0)
    om = float(omega0)
    theta[0] = th
    omega[0] = om
    sin = math.sin
    half = 0.5 * dt
    sixth = dt / 6.0
    for i in range(1, n + 1):
        if small_angle:
            a1 = a2 = a3 = a4 = -k
            k1t = om
            k2t = om + half * a1
            k3t = om + half * a2
            k4t = om + dt * a3
        else:
            k1t = om
            a1 = -k * sin(th)
            k2t = om + half * a1
            a2 = -k * sin(th + half * k1t)
            k3t = om + half * a2
            a3 = -k * sin(th + half * k2t)
            k4t = om + dt * a3
            a4 = -k * sin(th + dt * k3t)
        th = th + sixth * (k1t + 2.0 * (k2t + k3t) + k4t)
        om = om + sixth * (a1 + 2.0 * (a2 + a3) + a4)
        theta[i] = th
        omega[i] = om
    return theta, omega


def body_steps(q0, w0, inertia, inv_inertia, moment_body, b_half, dt, n):
    """Advance the rigid body n steps of size dt.

    b_half holds the inertial field vector at the RK4 stage times
    t0, t0 + dt/2, t0 + dt, ... (shape (2n + 1, 3)); a constant field is
    passed as a repeated row. moment_body is the fixed body-frame magnetic
    moment for this segment. Quaternions are NOT renormalized (drift is
    measured by callers and stays far below 1e-9 per step).

    Returns (q, w) arrays of shapes (n + 1, 4) and (n + 1, 3).
    """
    q_out = np.empty((n + 1, 4))
    w_out = np.empty((n + 1, 3))
    q = np.array(q0, dtype=float)
    w = np.array(w0, dtype=float)
    inertia = np.asarray(inertia, dtype=float)
    inv_inertia = np.asarray(inv_inertia, dtype=float)
    m = np.asarray(moment_body, dtype=float)
    b_half = np.asarray(b_half, dtype=float)
    q_out[0] = q
    w_out[0] = w
    for i in range(n):
        b0 = b_half[2 * i]
        bm = b_half[2 * i + 1]
        b1 = b_half[2 * i + 2]
        dq1, dw1 = _rhs(q, w, inertia, inv_inertia, m, b0)
        dq2, dw2 = _rhs(q + 0.5 * dt * dq1, w + 0.5 * dt * dw1,
                        inertia, inv_inertia, m, bm)
        dq3, dw3 = _rhs(q + 0.5 * dt * dq2, w + 0.5 * dt * dw2,
                        inertia, inv_inertia, m, bm)
        dq4, dw4 = _rhs(q + dt * dq3, w + dt * dw3,
                        inertia, inv_inertia, m, b1)
        q = q + (dt / 6.0) * (dq1 + 2.0 * (dq2 + dq3) + dq4)
        w = w + (dt / 6.0) * (dw1 + 2.0 * (dw2 + dw3) + dw4)
        q_out[i + 1] = q
        w_out[i + 1] = w
    return q_out, w_out


def _rhs(q, w, inertia, inv_inertia, m, b_inertial):
    qw, qx, qy, qz = q
    u = q[1:]
    # Inertial field into the body frame (rotation by the conjugate).
    d = u[0] * b_inertial[0] + u[1] * b_inertial[1] + u[2] * b_inertial[2]
    uu = u[0] * u[0] + u[1] * u[1] + u[2] * u[2]
    b_body = 2.0 * d * u + (qw * qw - uu) * b_inertial - 2.0 * qw * np.cross(u, b_inertial)
    torque = np.cross(m, b_body)
    w_dot = inv_inertia @ (torque - np.cross(w, inertia @ w))
    wx, wy, wz = w
    q_dot = 0.5 * np.array([
        -qx * wx - qy * wy - qz * wz,
        qw * wx + qy * wz - qz * wy,
        qw * wy - qx * wz + qz * wx,
        qw * wz + qx * wy - qy * wx,
    ])
    return q_dot, w_dot
