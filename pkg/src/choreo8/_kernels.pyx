# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the equal-mass planar three-body problem.

State layout (12 doubles): r1x r1y r2x r2y r3x r3y v1x v1y v2x v2y v3x v3y.
Normalized units: G * m_total = 1, each body carries mass 1/3.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

cdef double THIRD = 1.0 / 3.0


cdef inline void _accel(const double* r, double* a) noexcept nogil:
    cdef double dx, dy, d2, f
    cdef int i, j
    for i in range(6):
        a[i] = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            dx = r[2 * j] - r[2 * i]
            dy = r[2 * j + 1] - r[2 * i + 1]
            d2 = dx * dx + dy * dy
            f = THIRD / (d2 * sqrt(d2))
            a[2 * i] += f * dx
            a[2 * i + 1] += f * dy
            a[2 * j] -= f * dx
            a[2 * j + 1] -= f * dy


cdef inline void _deriv(const double* y, double* dy) noexcept nogil:
    cdef int i
    for i in range(6):
        dy[i] = y[6 + i]
    _accel(y, dy + 6)


cdef inline bint _has_collision(const double* r) noexcept nogil:
    cdef int i, j
    for i in range(3):
        for j in range(i + 1, 3):
            if r[2 * j] == r[2 * i] and r[2 * j + 1] == r[2 * i + 1]:
                return True
    return False


def accelerations(const double[::1] pos not None):
    """Accelerations (6,) for flat positions (6,)."""
    if pos.shape[0] != 6:
        raise ValueError("expected 6 position components")
    if _has_collision(&pos[0]):
        raise ZeroDivisionError("coincident bodies")
    out = np.empty(6)
    cdef double[::1] a = out
    _accel(&pos[0], &a[0])
    return out


def derivative(double t, const double[::1] y not None):
    """Right-hand side of the first-order system, signature f(t, y)."""
    out = np.empty(12)
    cdef double[::1] dy = out
    _deriv(&y[0], &dy[0])
    return out


def rk4_fixed(const double[::1] y0 not None, double h, long nsteps, long stride):
    """Classical RK4 with constant step; returns every ``stride``-th state.

    Row 0 is ``y0``; the final state is always included as the last row.
    """
    cdef long nout = nsteps // stride + 1
    cdef bint tail = nsteps % stride != 0
    if tail:
        nout += 1
    out = np.empty((nout, 12))
    cdef double[:, ::1] o = out
    cdef double y[12]
    cdef double k1[12]
    cdef double k2[12]
    cdef double k3[12]
    cdef double k4[12]
    cdef double tmp[12]
    cdef double h2 = 0.5 * h, h6 = h / 6.0
    cdef long n, row = 0
    cdef int i
    for i in range(12):
        y[i] = y0[i]
        o[0, i] = y[i]
    with nogil:
        for n in range(1, nsteps + 1):
            _deriv(y, k1)
            for i in range(12):
                tmp[i] = y[i] + h2 * k1[i]
            _deriv(tmp, k2)
            for i in range(12):
                tmp[i] = y[i] + h2 * k2[i]
            _deriv(tmp, k3)
            for i in range(12):
                tmp[i] = y[i] + h * k3[i]
            _deriv(tmp, k4)
            for i in range(12):
                y[i] += h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if n % stride == 0:
                row += 1
                for i in range(12):
                    o[row, i] = y[i]
        if tail:
            row += 1
            for i in range(12):
                o[row, i] = y[i]
    return out
