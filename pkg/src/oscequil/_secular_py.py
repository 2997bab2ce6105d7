"""NumPy fallback for the compiled secular-equation kernel.

Same algorithm as ``_secular_ext.pyx``, vectorized across brackets: every
root is bisected simultaneously until its bracket reaches the tolerance.
"""
import numpy as np


def _secular(delta, d_origin, weights, shift, tau):
    # delta[r, k] = d[origin_r] - d[k]
    return (d_origin - shift) + tau - np.sum(weights / (delta + tau[:, None]), axis=1)


def secular_roots(poles, weights, shift, upper, rtol=1e-13, max_iter=2000):
    poles = np.ascontiguousarray(poles, dtype=float)
    weights = np.ascontiguousarray(weights, dtype=float)
    n = poles.size
    status = np.zeros(n + 1, dtype=np.int8)
    origin = np.empty(n + 1, dtype=np.int64)
    lo = np.empty(n + 1)
    hi = np.empty(n + 1)

    origin[0], lo[0], hi[0] = 0, -poles[0], 0.0
    origin[n], lo[n], hi[n] = n - 1, 0.0, upper - poles[n - 1]
    if n > 1:
        gap = np.diff(poles)
        mid = 0.5 * gap
        left = np.arange(n - 1)
        delta = poles[left][:, None] - poles[None, :]
        f_mid = _secular(delta, poles[left], weights, shift, mid)
        take_left = f_mid >= 0
        origin[1:n] = np.where(take_left, left, left + 1)
        lo[1:n] = np.where(take_left, 0.0, -mid)
        hi[1:n] = np.where(take_left, mid, 0.0)
        status[1:n][gap <= 0] = 1

    delta = poles[origin][:, None] - poles[None, :]
    d_origin = poles[origin]
    edge = np.array([0, n])
    f_edge = _secular(delta[edge], d_origin[edge], weights, shift,
                      np.array([lo[0], hi[n]]))
    if f_edge[0] >= 0:
        status[0] = 1
    if hi[n] <= 0 or f_edge[1] <= 0:
        status[n] = 1

    active = np.flatnonzero(status == 0)
    for _ in range(max_iter):
        if active.size == 0:
            break
        a_lo, a_hi = lo[active], hi[active]
        mid = 0.5 * (a_lo + a_hi)
        stuck = (mid <= a_lo) | (mid >= a_hi)
        fm = _secular(delta[active], d_origin[active], weights, shift, mid)
        fm = np.where(stuck, np.nan, fm)
        up = fm > 0
        down = fm < 0
        exact = fm == 0
        hi[active] = np.where(up | exact, mid, a_hi)
        lo[active] = np.where(down | exact, mid, a_lo)
        done = stuck | exact | (hi[active] - lo[active]
                                  <= rtol * np.minimum(np.abs(mid), np.abs(d_origin[active] + mid)))
        active = active[~done]

    tau = 0.5 * (lo + hi)
    tau[status != 0] = 0.0
    return origin, tau, status
