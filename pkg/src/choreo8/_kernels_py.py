"""Pure-Python/numpy versions of the compiled kernels (same signatures)."""

import numpy as np

_PAIRS = ((0, 1), (0, 2), (1, 2))


def accelerations(pos):
    r = np.asarray(pos, dtype=float).reshape(3, 2)
    a = np.zeros((3, 2))
    for i, j in _PAIRS:
        d = r[j] - r[i]
        d2 = d[0] * d[0] + d[1] * d[1]
        if d2 == 0.0:
            raise ZeroDivisionError("coincident bodies")
        f = d / (3.0 * d2 * np.sqrt(d2))
        a[i] += f
        a[j] -= f
    return a.ravel()


def derivative(t, y):
    out = np.empty(12)
    out[:6] = y[6:]
    out[6:] = accelerations(y[:6])
    return out


def rk4_fixed(y0, h, nsteps, stride):
    y = np.array(y0, dtype=float)
    rows = [y.copy()]
    for n in range(1, nsteps + 1):
        k1 = derivative(0.0, y)
        k2 = derivative(0.0, y + 0.5 * h * k1)
        k3 = derivative(0.0, y + 0.5 * h * k2)
        k4 = derivative(0.0, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if n % stride == 0:
            rows.append(y.copy())
    if nsteps % stride:
        rows.append(y.copy())
    return np.array(rows)
