# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled solver kernels.

Mirrors hyperbalance._kernels._py: Gauss-Seidel sweeps over edges with a
sup-norm load-change stopping rule.  Edge sizes are small, so the per-edge
water-filling level is found with an insertion sort plus breakpoint scan.
"""

from libc.math cimport exp, fabs
from libc.stdlib cimport malloc, free


def balance_sweeps(long[::1] edge_ptr, long[::1] edge_vtx,
                   double[::1] theta, double[::1] loads,
                   double tol, long max_sweeps):
    cdef Py_ssize_t m = edge_ptr.shape[0] - 1
    cdef Py_ssize_t n = loads.shape[0]
    cdef Py_ssize_t j, p, lo, hi, size, k, idx, sweep, v
    cdef double acc, lam, cand, new, change, delta = 0.0
    cdef double *r
    cdef double *rs
    cdef double *prev
    cdef double key
    cdef Py_ssize_t pos
    cdef long maxsize = 0

    for j in range(m):
        if edge_ptr[j + 1] - edge_ptr[j] > maxsize:
            maxsize = edge_ptr[j + 1] - edge_ptr[j]
    if maxsize == 0:
        return 1, 0.0
    r = <double *> malloc(maxsize * sizeof(double))
    rs = <double *> malloc(maxsize * sizeof(double))
    prev = <double *> malloc(n * sizeof(double))
    if r == NULL or rs == NULL or prev == NULL:
        free(r); free(rs); free(prev)
        raise MemoryError()
    try:
        for sweep in range(1, max_sweeps + 1):
            for v in range(n):
                prev[v] = loads[v]
            for j in range(m):
                lo = edge_ptr[j]
                hi = edge_ptr[j + 1]
                size = hi - lo
                for idx in range(size):
                    p = lo + idx
                    r[idx] = loads[edge_vtx[p]] - theta[p]
                    # insertion sort into rs
                    key = r[idx]
                    pos = idx
                    while pos > 0 and rs[pos - 1] > key:
                        rs[pos] = rs[pos - 1]
                        pos -= 1
                    rs[pos] = key
                acc = 0.0
                lam = rs[0] + 1.0
                for k in range(size):
                    acc += rs[k]
                    cand = (1.0 + acc) / (k + 1)
                    if k + 1 == size or cand <= rs[k + 1]:
                        lam = cand
                        break
                for idx in range(size):
                    p = lo + idx
                    new = lam - r[idx]
                    if new < 0.0:
                        new = 0.0
                    change = new - theta[p]
                    if change != 0.0:
                        theta[p] = new
                        loads[edge_vtx[p]] += change
            delta = 0.0
            for v in range(n):
                if fabs(loads[v] - prev[v]) > delta:
                    delta = fabs(loads[v] - prev[v])
            if delta < tol:
                return sweep, delta
        return max_sweeps, delta
    finally:
        free(r)
        free(rs)
        free(prev)


cdef inline double _entropy_root(double a, double eps) nogil:
    # Solve exp(u) + eps*u = a for u, assuming a <= 1 (root <= 0).  The left
    # side is convex increasing and f(0) = 1 - a >= 0, so Newton from u = 0
    # decreases monotonically to the root.
    cdef double u = 0.0
    cdef double f
    cdef int it
    for it in range(100):
        f = exp(u) + eps * u - a
        if f <= 1e-16:
            break
        u -= f / (exp(u) + eps)
    return u


cdef inline void _entropy_waterfill(double *r, Py_ssize_t size, double eps,
                                    double *x) nogil:
    # Exact minimizer of sum (r_i + x_i)^2/2 + eps*x_i*log(x_i) over the
    # simplex: x_i + eps*log x_i = mu - r_i with sum x_i(mu) = 1.  S(mu) is
    # convex increasing; at mu = min r + 1 the largest coordinate equals 1,
    # so Newton descends monotonically to the multiplier.
    cdef double rmin = r[0]
    cdef Py_ssize_t i
    cdef double mu, total, slope, z
    cdef int it
    for i in range(1, size):
        if r[i] < rmin:
            rmin = r[i]
    mu = rmin + 1.0
    for it in range(200):
        total = 0.0
        slope = 0.0
        for i in range(size):
            x[i] = exp(_entropy_root(mu - r[i], eps))
            total += x[i]
            slope += x[i] / (x[i] + eps)
        if fabs(total - 1.0) <= 1e-14 * size:
            break
        mu -= (total - 1.0) / slope
    z = 0.0
    for i in range(size):
        z += x[i]
    for i in range(size):
        x[i] /= z


def epsilon_sweeps(long[::1] edge_ptr, long[::1] edge_vtx,
                   double[::1] theta, double[::1] loads,
                   double eps, double alpha, double tol, long max_sweeps):
    cdef Py_ssize_t m = edge_ptr.shape[0] - 1
    cdef Py_ssize_t n = loads.shape[0]
    cdef Py_ssize_t j, p, lo, hi, size, idx, sweep, v
    cdef double new, change, delta = 0.0
    cdef double *r
    cdef double *x
    cdef double *prev
    cdef long maxsize = 0

    for j in range(m):
        if edge_ptr[j + 1] - edge_ptr[j] > maxsize:
            maxsize = edge_ptr[j + 1] - edge_ptr[j]
    if maxsize == 0:
        return 1, 0.0
    r = <double *> malloc(maxsize * sizeof(double))
    x = <double *> malloc(maxsize * sizeof(double))
    prev = <double *> malloc(n * sizeof(double))
    if r == NULL or x == NULL or prev == NULL:
        free(r); free(x); free(prev)
        raise MemoryError()
    try:
        for sweep in range(1, max_sweeps + 1):
            for v in range(n):
                prev[v] = loads[v]
            for j in range(m):
                lo = edge_ptr[j]
                hi = edge_ptr[j + 1]
                size = hi - lo
                for idx in range(size):
                    p = lo + idx
                    r[idx] = loads[edge_vtx[p]] - theta[p]
                _entropy_waterfill(r, size, eps, x)
                for idx in range(size):
                    p = lo + idx
                    new = (1.0 - alpha) * theta[p] + alpha * x[idx]
                    change = new - theta[p]
                    if change != 0.0:
                        theta[p] = new
                        loads[edge_vtx[p]] += change
            delta = 0.0
            for v in range(n):
                if fabs(loads[v] - prev[v]) > delta:
                    delta = fabs(loads[v] - prev[v])
            if delta < tol:
                return sweep, delta
        return max_sweeps, delta
    finally:
        free(r)
        free(x)
        free(prev)
