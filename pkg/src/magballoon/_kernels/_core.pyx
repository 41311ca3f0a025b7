# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled propagation kernels; mirrors _core_py signatures."""

from libc.math cimport sin

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def pendulum_steps(double theta0, double omega0, double k, double dt,
                   Py_ssize_t n, bint small_angle=False):
    """Advance the scalar pendulum n RK4 steps; see _core_py.pendulum_steps."""
    theta_arr = np.empty(n + 1)
    omega_arr = np.empty(n + 1)
    cdef double[::1] theta = theta_arr
    cdef double[::1] omega = omega_arr
    cdef double th = theta0, om = omega0
    cdef double half = 0.5 * dt, sixth = dt / 6.0
    cdef double a1, a2, a3, a4, k1t, k2t, k3t, k4t
    cdef Py_ssize_t i
    theta[0] = th
    omega[0] = om
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
    return theta_arr, omega_arr


cdef inline void _rhs(double* q, double* w,
                      double* inertia, double* inv_inertia,
                      double* m, const double* b,
                      double* q_dot, double* w_dot) noexcept nogil:
    cdef double qw = q[0], qx = q[1], qy = q[2], qz = q[3]
    cdef double d = qx * b[0] + qy * b[1] + qz * b[2]
    cdef double uu = qx * qx + qy * qy + qz * qz
    cdef double s = qw * qw - uu
    # b rotated into the body frame (conjugate rotation)
    cdef double bbx = 2.0 * d * qx + s * b[0] - 2.0 * qw * (qy * b[2] - qz * b[1])
    cdef double bby = 2.0 * d * qy + s * b[1] - 2.0 * qw * (qz * b[0] - qx * b[2])
    cdef double bbz = 2.0 * d * qz + s * b[2] - 2.0 * qw * (qx * b[1] - qy * b[0])
    # torque = m x b_body
    cdef double tx = m[1] * bbz - m[2] * bby
    cdef double ty = m[2] * bbx - m[0] * bbz
    cdef double tz = m[0] * bby - m[1] * bbx
    # h = inertia @ w
    cdef double hx = inertia[0] * w[0] + inertia[1] * w[1] + inertia[2] * w[2]
    cdef double hy = inertia[3] * w[0] + inertia[4] * w[1] + inertia[5] * w[2]
    cdef double hz = inertia[6] * w[0] + inertia[7] * w[1] + inertia[8] * w[2]
    # g = torque - w x h
    cdef double gx = tx - (w[1] * hz - w[2] * hy)
    cdef double gy = ty - (w[2] * hx - w[0] * hz)
    cdef double gz = tz - (w[0] * hy - w[1] * hx)
    w_dot[0] = inv_inertia[0] * gx + inv_inertia[1] * gy + inv_inertia[2] * gz
    w_dot[1] = inv_inertia[3] * gx + inv_inertia[4] * gy + inv_inertia[5] * gz
    w_dot[2] = inv_inertia[6] * gx + inv_inertia[7] * gy + inv_inertia[8] * gz
    q_dot[0] = 0.5 * (-qx * w[0] - qy * w[1] - qz * w[2])
    q_dot[1] = 0.5 * (qw * w[0] + qy * w[2] - qz * w[1])
    q_dot[2] = 0.5 * (qw * w[1] - qx * w[2] + qz * w[0])
    q_dot[3] = 0.5 * (qw * w[2] + qx * w[1] - qy * w[0])


def body_steps(q0, w0, inertia, inv_inertia, moment_body, b_half,
               double dt, Py_ssize_t n):
    """Advance the rigid body n RK4 steps; see _core_py.body_steps."""
    q_out_arr = np.empty((n + 1, 4))
    w_out_arr = np.empty((n + 1, 3))
    cdef double[:, ::1] q_out = q_out_arr
    cdef double[:, ::1] w_out = w_out_arr
    cdef double[::1] q0_v = np.ascontiguousarray(q0, dtype=float)
    cdef double[::1] w0_v = np.ascontiguousarray(w0, dtype=float)
    cdef double[::1] I_v = np.ascontiguousarray(inertia, dtype=float).ravel()
    cdef double[::1] Iinv_v = np.ascontiguousarray(inv_inertia, dtype=float).ravel()
    cdef double[::1] m_v = np.ascontiguousarray(moment_body, dtype=float)
    cdef double[:, ::1] b = np.ascontiguousarray(b_half, dtype=float)
    cdef double q[4]
    cdef double w[3]
    cdef double qa[4]
    cdef double wa[3]
    cdef double dq1[4]
    cdef double dq2[4]
    cdef double dq3[4]
    cdef double dq4[4]
    cdef double dw1[3]
    cdef double dw2[3]
    cdef double dw3[3]
    cdef double dw4[3]
    cdef double half = 0.5 * dt, sixth = dt / 6.0
    cdef Py_ssize_t i, j
    for j in range(4):
        q[j] = q0_v[j]
        q_out[0, j] = q[j]
    for j in range(3):
        w[j] = w0_v[j]
        w_out[0, j] = w[j]
    with nogil:
        for i in range(n):
            _rhs(q, w, &I_v[0], &Iinv_v[0], &m_v[0], &b[2 * i, 0], dq1, dw1)
            for j in range(4):
                qa[j] = q[j] + half * dq1[j]
            for j in range(3):
                wa[j] = w[j] + half * dw1[j]
            _rhs(qa, wa, &I_v[0], &Iinv_v[0], &m_v[0], &b[2 * i + 1, 0], dq2, dw2)
            for j in range(4):
                qa[j] = q[j] + half * dq2[j]
            for j in range(3):
                wa[j] = w[j] + half * dw2[j]
            _rhs(qa, wa, &I_v[0], &Iinv_v[0], &m_v[0], &b[2 * i + 1, 0], dq3, dw3)
            for j in range(4):
                qa[j] = q[j] + dt * dq3[j]
            for j in range(3):
                wa[j] = w[j] + dt * dw3[j]
            _rhs(qa, wa, &I_v[0], &Iinv_v[0], &m_v[0], &b[2 * i + 2, 0], dq4, dw4)
            for j in range(4):
                q[j] = q[j] + sixth * (dq1[j] + 2.0 * (dq2[j] + dq3[j]) + dq4[j])
                q_out[i + 1, j] = q[j]
            for j in range(3):
                w[j] = w[j] + sixth * (dw1[j] + 2.0 * (dw2[j] + dw3[j]) + dw4[j])
                w_out[i + 1, j] = w[j]
    return q_out_arr, w_out_arr
