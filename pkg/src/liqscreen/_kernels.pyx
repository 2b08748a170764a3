# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see _kernels_py for the reference semantics."""

from libc.math cimport fabs, isfinite

IS_COMPILED = True


def simpson_sum(double[::1] y, double h):
    """Composite Simpson reduction of samples on a uniform grid."""
    cdef Py_ssize_t n = y.shape[0]
    if n < 3 or n % 2 == 0:
        raise ValueError("simpson_sum needs an odd number of samples >= 3")
    cdef double acc = y[0] + y[n - 1]
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(1, n - 1, 2):
        s += y[i]
    acc += 4.0 * s
    s = 0.0
    for i in range(2, n - 2, 2):
        s += y[i]
    acc += 2.0 * s
    return acc * (h / 3.0)


def damped_affine_fp(double c0, double c1, double x0, double lo, double hi,
                     double damping, double abs_f, int max_iter):
    """Damped fixed point of x <- clamp(c0 + c1*x, lo, hi)."""
    cdef double x = x0
    cdef double gx, r
    cdef int it
    for it in range(1, max_iter + 1):
        gx = c0 + c1 * x
        if gx < lo:
            gx = lo
        elif gx > hi:
            gx = hi
        r = gx - x
        if fabs(r) <= abs_f:
            return gx, fabs(r), it
        x = x + damping * r
    gx = c0 + c1 * x
    if gx < lo:
        gx = lo
    elif gx > hi:
        gx = hi
    return x, fabs(gx - x), max_iter


def rk4_affine(double[::1] k_half, double[::1] m_half, double y0, double h,
               int steps):
    """Fixed-step RK4 for y' = k(t) * (y - m(t)) with tabulated coefficients."""
    if k_half.shape[0] != 2 * steps + 1 or m_half.shape[0] != 2 * steps + 1:
        raise ValueError("coefficient tables must have 2*steps + 1 entries")
    out = [0.0] * (steps + 1)
    cdef double y = y0
    cdef double k1, k2, k3, k4
    cdef Py_ssize_t i, j
    out[0] = y0
    for i in range(steps):
        j = 2 * i
        k1 = k_half[j] * (y - m_half[j])
        k2 = k_half[j + 1] * (y + 0.5 * h * k1 - m_half[j + 1])
        k3 = k_half[j + 1] * (y + 0.5 * h * k2 - m_half[j + 1])
        k4 = k_half[j + 2] * (y + h * k3 - m_half[j + 2])
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not isfinite(y):
            raise OverflowError(f"trajectory diverged at step {i + 1}")
        out[i + 1] = y
    return out
