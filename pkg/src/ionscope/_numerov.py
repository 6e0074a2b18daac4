"""Compiled Numerov kernels.

Conventions: the radial equation is written y'' = f y with f = 2 mu (V - E) on a
uniform grid of step h; ``c`` is h^2 * 2 mu / 12 so that q_i = c (V_i - E).
Dirichlet conditions y = 0 hold at both grid ends.
"""

import numpy as np
from numba import njit

_BIG = 1e150


@njit(cache=True)
def sturm_count(v, e, c):
    """Number of discrete Numerov eigenvalues below ``e``.

    With F_i = (1 - q_i) y_i the scheme is the symmetric tridiagonal system
    F_{i+1} - U_i F_i + F_{i-1} = 0, U_i = 12 / (1 - q_i) - 10.  Its LDL^T pivots are
    -R_i with R_i = U_i - 1 / R_{i-1}, so the count of negative ratios equals the
    count of eigenvalues below ``e`` (requires q_i < 1).
    """
    n = v.size
    count = 0
    inv_prev = 0.0
    for i in range(1, n - 1):
        r = 12.0 / (1.0 - c * (v[i] - e)) - 10.0 - inv_prev
        if r == 0.0:
            r = 1e-300
        if r < 0.0:
            count += 1
        inv_prev = 1.0 / r
    return count


@njit(cache=True)
def outward(v, e, c, stop):
    """Propagate F from the left boundary up to index ``stop`` (inclusive)."""
    n = v.size
    F = np.zeros(n)
    F[1] = 1.0
    for i in range(1, stop):
        u = 12.0 / (1.0 - c * (v[i] - e)) - 10.0
        F[i + 1] = u * F[i] - F[i - 1]
        if abs(F[i + 1]) > _BIG:
            for j in range(i + 2):
                F[j] /= _BIG
    return F


@njit(cache=True)
def inward(v, e, c, stop):
    """Propagate F from the right boundary down to index ``stop`` (inclusive)."""
    n = v.size
    G = np.zeros(n)
    G[n - 2] = 1.0
    for i in range(n - 2, stop, -1):
        u = 12.0 / (1.0 - c * (v[i] - e)) - 10.0
        G[i - 1] = u * G[i] - G[i + 1]
        if abs(G[i - 1]) > _BIG:
            for j in range(i - 1, n):
                G[j] /= _BIG
    return G


@njit(cache=True)
def matched(v, e, c, m):
    """Outward and inward solutions joined at index ``m``; returns y (unnormalized)."""
    F = outward(v, e, c, m)
    G = inward(v, e, c, m)
    scale = F[m] / G[m]
    n = v.size
    y = np.empty(n)
    for i in range(n):
        Fi = F[i] if i <= m else G[i] * scale
        y[i] = Fi / (1.0 - c * (v[i] - e))
    return y
