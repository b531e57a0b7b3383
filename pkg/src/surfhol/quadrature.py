"""Composite Simpson quadrature and the exponential stepper for linear group ODEs."""
import numpy as np

from .errors import GridMismatch


def simpson_weights(n_intervals, h):
    if n_intervals < 2 or n_intervals % 2:
        raise GridMismatch(f"Simpson needs an even number of intervals, got {n_intervals}")
    w = np.ones(n_intervals + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


def simpson(f, h, axis=0):
    f = np.moveaxis(np.asarray(f), axis, 0)
    w = simpson_weights(f.shape[0] - 1, h)
    return np.tensordot(w, f, axes=(0, 0))


def cumulative_simpson(f, h, axis=0):
    """Running integral ``int_0^{t_k} f`` at every node.

    Even nodes carry the composite Simpson value; odd nodes add the
    half-panel rule ``h/12 (5 f0 + 8 f1 - f2)``. The last entry equals
    :func:`simpson` exactly.
    """
    f = np.moveaxis(np.asarray(f), axis, 0)
    n = f.shape[0] - 1
    if n < 2 or n % 2:
        raise GridMismatch(f"Simpson needs an even number of intervals, got {n}")
    out = np.zeros_like(f)
    panels = h / 3.0 * (f[0:-1:2] + 4 * f[1::2] + f[2::2])
    out[2::2] = np.cumsum(panels, axis=0)
    out[1::2] = out[0:-1:2] + h / 12.0 * (5 * f[0:-1:2] + 8 * f[1::2] - f[2::2])
    return np.moveaxis(out, 0, axis)


def transport(group, xi, dt, g0=None):
    """Solve ``g' = -xi(t) g`` on a uniform grid (axis 0 of ``xi``).

    Each step multiplies by ``exp(-dt (xi_k + xi_{k+1}) / 2)``, a second-order
    Magnus step that stays on the group. A negative ``dt`` walks the grid
    backwards in parameter, which reproduces the exact inverse of the forward
    steps.
    """
    xi = np.asarray(xi, dtype=complex)
    steps = group.exp(-0.5 * dt * (xi[:-1] + xi[1:]))
    frames = np.empty_like(xi)
    frames[0] = group.identity(xi.shape[1:-2]) if g0 is None else g0
    for k in range(steps.shape[0]):
        frames[k + 1] = steps[k] @ frames[k]
    return frames


def loglog_slope(ns, residuals):
    """Observed order ``p`` in ``residual ~ N^-p`` from a least-squares fit."""
    ns = np.asarray(ns, dtype=float)
    r = np.asarray(residuals, dtype=float)
    if len(ns) < 2:
        return None
    slope = np.polyfit(np.log(ns), np.log(r), 1)[0]
    return float(-slope)
