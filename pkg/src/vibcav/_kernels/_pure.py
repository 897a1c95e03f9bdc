"""Reference numpy implementation of the hot kernels.

The compiled twin in _fastcore.pyx mirrors these signatures exactly;
vibcav._kernels picks one at import time.

All three kernels share one parametrization of the auxiliary map

    f(tau) = (T/pi) atan(w(v)) + (k + c0 + c1 * [v >= q]) T     tau >= edge
    f(tau) = tau + shift                                        tau <  edge

where x = tau/T, k = floor(x + 1/2) (half mode) or floor(x) (full
mode), v = tan(pi (x - k)) and w is the Moebius map (a v + b)/(c v + d).
The branch index k and the reduced phase are always paired: snapping k
without moving the phase would put tan on the wrong side of its pole,
so no snap guard is applied and none is needed (the map value is
continuous across branch boundaries).
"""
import numpy as np

MAX_ITER = 10**6


def phase_map(tau, T, a, b, c, d, half, c0, c1, q, edge, shift):
    """Evaluate the auxiliary map (or its inverse) on an array."""
    tau = np.asarray(tau, dtype=np.float64)
    x = tau / T
    k = np.floor(x + 0.5) if half else np.floor(x)
    v = np.tan(np.pi * (x - k))
    with np.errstate(divide="ignore"):
        w = (a * v + b) / (c * v + d)
    br = k + c0
    if c1 != 0.0:
        br = br + c1 * (v >= q)
    core = (T / np.pi) * np.arctan(w) + br * T
    return np.where(tau < edge, tau + shift, core)


def moore_map(tau, L, T, a, b, c, d, half, c0, c1, q):
    """Iterate the auxiliary map down to the static region.

    Returns (R, n): the phase function R(tau) = f^n(tau) - 2L + 2Ln and
    the iteration count n (the map index).
    """
    cur = np.array(tau, dtype=np.float64, copy=True)
    n = np.zeros(cur.shape, dtype=np.int64)
    for _ in range(MAX_ITER):
        act = cur >= L
        if not act.any():
            break
        cur[act] = phase_map(cur[act], T, a, b, c, d, half, c0, c1, q, L, -2.0 * L)
        n[act] += 1
    else:
        raise RuntimeError("map iteration cap exceeded")
    return cur - 2.0 * L + 2.0 * L * n, n


def bracket_vals(tau, T, idx, svdtab):
    """Density bracket B(tau) = R'(tau), pole-free form.

    idx holds the map index per sample; svdtab is the (nmax+1, 7) table
    of per-region singular data (s0, s1, v00, v01, v10, v11, dsign)
    with rows v0, v1 of V^T from the SVD of the fundamental-map power.
    The value det / |H u|^2 with u = (sin phi, cos phi) is computed as
    dsign s0 s1 / ((s0 v0.u)^2 + (s1 v1.u)^2): a sum of two squares, so
    no cancellation even at the packet peaks where |H u| is tiny, and
    exact at the tan poles.
    """
    tau = np.asarray(tau, dtype=np.float64)
    x = tau / T
    k = np.floor(x + 0.5)
    phi = np.pi * (x - k)
    s = np.sin(phi)
    cph = np.cos(phi)
    rows = svdtab[idx]
    p = rows[:, 0] * (rows[:, 2] * s + rows[:, 3] * cph)
    q = rows[:, 1] * (rows[:, 4] * s + rows[:, 5] * cph)
    return rows[:, 6] * rows[:, 0] * rows[:, 1] / (p * p + q * q)
