"""Pure-Python fallbacks for the compiled hot kernels.

Semantics match liqscreen._kernels exactly; the numerics module picks
one backend at import time (compiled when available, this module
otherwise, and always this module when LIQSCREEN_PURE=1 is set).
"""

import math

IS_COMPILED = False


def simpson_sum(y, h):
    """Composite Simpson reduction of samples on a uniform grid.

    y must have odd length (an even number of panels); h is the grid step.
    """
    n = len(y)
    if n < 3 or n % 2 == 0:
        raise ValueError("simpson_sum needs an odd number of samples >= 3")
    acc = y[0] + y[n - 1]
    s = 0.0
    for i in range(1, n - 1, 2):
        s += y[i]
    acc += 4.0 * s
    s = 0.0
    for i in range(2, n - 2, 2):
        s += y[i]
    acc += 2.0 * s
    return acc * (h / 3.0)


def damped_affine_fp(c0, c1, x0, lo, hi, damping, abs_f, max_iter):
    """Damped fixed point of x <- clamp(c0 + c1*x, lo, hi).

    Returns (x, residual, iterations). The residual is |map(x) - x| at
    the returned point; callers decide whether it converged.
    """
    x = x0
    for it in range(1, max_iter + 1):
        gx = c0 + c1 * x
        if gx < lo:
            gx = lo
        elif gx > hi:
            gx = hi
        r = gx - x
        if abs(r) <= abs_f:
            return gx, abs(r), it
        x = x + damping * r
    gx = c0 + c1 * x
    if gx < lo:
        gx = lo
    elif gx > hi:
        gx = hi
    return x, abs(gx - x), max_iter


def rk4_affine(k_half, m_half, y0, h, steps):
    """Fixed-step RK4 for y' = k(t) * (y - m(t)) with tabulated coefficients.

    k_half and m_half hold k and m sampled at half-step resolution
    (2*steps + 1 values, node i at t0 + i*h/2; h may be negative for
    backward integration). Returns the list of steps+1 y values. A
    non-finite intermediate raises OverflowError with the failing index
    encoded in the message.
    """
    if len(k_half) != 2 * steps + 1 or len(m_half) != 2 * steps + 1:
        raise ValueError("coefficient tables must have 2*steps + 1 entries")
    out = [0.0] * (steps + 1)
    out[0] = y = y0
    for i in range(steps):
        j = 2 * i
        k1 = k_half[j] * (y - m_half[j])
        k2 = k_half[j + 1] * (y + 0.5 * h * k1 - m_half[j + 1])
        k3 = k_half[j + 1] * (y + 0.5 * h * k2 - m_half[j + 1])
        k4 = k_half[j + 2] * (y + h * k3 - m_half[j + 2])
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not math.isfinite(y):
            raise OverflowError(f"trajectory diverged at step {i + 1}")
        out[i + 1] = y
    return out
