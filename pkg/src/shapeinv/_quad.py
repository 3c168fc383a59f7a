"""Small quadrature helpers used by more than one module."""

import numpy as np


def cumulative_simpson(f, xs):
    """Cumulative integral of a callable along the nodes xs.

    Each interval is integrated with a three-point Simpson rule using the true
    midpoint value, so the result is 4th order even on nonuniform spacing.
    Returns an array c with c[i] = integral from xs[0] to xs[i].
    """
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size < 2:
        raise ValueError("need at least two nodes")
    mids = 0.5 * (xs[:-1] + xs[1:])
    fx = np.asarray(f(xs), dtype=float)
    fm = np.asarray(f(mids), dtype=float)
    steps = (xs[1:] - xs[:-1]) / 6.0 * (fx[:-1] + 4.0 * fm + fx[1:])
    out = np.empty_like(xs)
    out[0] = 0.0
    np.cumsum(steps, out=out[1:])
    return out


def cumulative_simpson_values(ys, h):
    """Cumulative integral of uniformly spaced samples.

    Steps use the quadratic through three neighbouring samples; the first step
    uses the forward variant. Exact for quadratics, O(h^3) cumulative error.
    """
    ys = np.asarray(ys, dtype=float)
    n = ys.size
    out = np.zeros(n)
    if n < 2:
        return out
    if n == 2:
        out[1] = 0.5 * h * (ys[0] + ys[1])
        return out
    steps = np.empty(n - 1)
    steps[0] = h / 12.0 * (5.0 * ys[0] + 8.0 * ys[1] - ys[2])
    steps[1:] = h / 12.0 * (-ys[:-2] + 8.0 * ys[1:-1] + 5.0 * ys[2:])
    np.cumsum(steps, out=out[1:])
    return out
