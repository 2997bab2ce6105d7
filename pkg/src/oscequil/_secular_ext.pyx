# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled bisection for the arrowhead secular equation.

Roots are returned as ``poles[origin] + tau`` so that the distance from a
root to its nearest pole is resolved to full relative precision.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, fmin

cnp.import_array()


cdef inline double _secular(const double[::1] d, const double[::1] w, double shift,
                            Py_ssize_t j, double tau) noexcept nogil:
    cdef Py_ssize_t k
    cdef Py_ssize_t n = d.shape[0]
    cdef double dj = d[j]
    cdef double s = (dj - shift) + tau
    for k in range(n):
        s -= w[k] / ((dj - d[k]) + tau)
    return s


def secular_roots(const double[::1] poles, const double[::1] weights, double shift,
                  double upper, double rtol=1e-13, Py_ssize_t max_iter=2000):
    """Bisect all ``n + 1`` roots of ``x - shift - sum_k w_k / (x - d_k)``.

    Returns ``(origin, tau, status)``; ``status[i] != 0`` flags a bracket
    without a sign change.
    """
    cdef Py_ssize_t n = poles.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] origin_arr = np.empty(n + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tau_arr = np.empty(n + 1, dtype=np.float64)
    cdef cnp.ndarray[cnp.int8_t, ndim=1] status_arr = np.zeros(n + 1, dtype=np.int8)
    cdef cnp.int64_t[::1] origin = origin_arr
    cdef double[::1] tau = tau_arr
    cdef cnp.int8_t[::1] status = status_arr
    cdef Py_ssize_t nu, j, it
    cdef double lo, hi, mid, fm, gap

    with nogil:
        for nu in range(n + 1):
            if nu == 0:
                j = 0
                lo = -poles[0]
                hi = 0.0
                if _secular(poles, weights, shift, j, lo) >= 0:
                    status[nu] = 1
            elif nu == n:
                j = n - 1
                lo = 0.0
                hi = upper - poles[n - 1]
                if hi <= 0 or _secular(poles, weights, shift, j, hi) <= 0:
                    status[nu] = 1
            else:
                gap = poles[nu] - poles[nu - 1]
                if gap <= 0:
                    status[nu] = 1
                    origin[nu] = nu - 1
                    tau[nu] = 0.0
                    continue
                mid = 0.5 * gap
                if _secular(poles, weights, shift, nu - 1, mid) >= 0:
                    j = nu - 1
                    lo = 0.0
                    hi = mid
                else:
                    j = nu
                    lo = -mid
                    hi = 0.0
            for it in range(max_iter):
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                fm = _secular(poles, weights, shift, j, mid)
                if fm > 0:
                    hi = mid
                elif fm < 0:
                    lo = mid
                else:
                    lo = mid
                    hi = mid
                    break
                # both the offset and the root itself must be resolved
                if hi - lo <= rtol * fmin(fabs(mid), fabs(poles[j] + mid)):
                    break
            origin[nu] = j
            tau[nu] = 0.5 * (lo + hi)
    return origin_arr, tau_arr, status_arr
