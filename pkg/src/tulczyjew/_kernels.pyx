# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Same signatures and semantics as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, ceil, log2, pow

cnp.import_array()

cdef double EXPM_TERM_RTOL = 1e-16
cdef int EXPM_MAX_TERMS = 60


cdef inline void _ad_star(const double[:, :, ::1] c, const double[::1] omega,
                          const double[::1] pi, double[::1] out) noexcept nogil:
    cdef Py_ssize_t d = c.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double acc, wi
    for j in range(d):
        out[j] = 0.0
    for i in range(d):
        wi = omega[i]
        if wi == 0.0:
            continue
        for j in range(d):
            acc = 0.0
            for k in range(d):
                acc = acc + c[i, j, k] * pi[k]
            out[j] = out[j] + wi * acc


cdef inline void _matvec(const double[:, ::1] m, const double[::1] x,
                         double[::1] out) noexcept nogil:
    cdef Py_ssize_t n = m.shape[0]
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc = acc + m[i, j] * x[j]
        out[i] = acc


def bracket(c, x, y):
    cdef const double[:, :, ::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t d = cv.shape[0]
    out = np.zeros(d)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, j, k
    cdef double xy
    for i in range(d):
        for j in range(d):
            xy = xv[i] * yv[j]
            if xy == 0.0:
                continue
            for k in range(d):
                ov[k] = ov[k] + cv[i, j, k] * xy
    return out


def ad_star(c, omega, pi):
    cdef const double[:, :, ::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef const double[::1] wv = np.ascontiguousarray(omega, dtype=np.float64)
    cdef const double[::1] pv = np.ascontiguousarray(pi, dtype=np.float64)
    out = np.empty(cv.shape[0])
    _ad_star(cv, wv, pv, out)
    return out


def ad_matrix(c, xi):
    cdef const double[:, :, ::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef const double[::1] xv = np.ascontiguousarray(xi, dtype=np.float64)
    cdef Py_ssize_t d = cv.shape[0]
    out = np.zeros((d, d))
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i, j, k
    for i in range(d):
        if xv[i] == 0.0:
            continue
        for j in range(d):
            for k in range(d):
                ov[k, j] = ov[k, j] + cv[i, j, k] * xv[i]
    return out


cdef double _norm1(double[:, ::1] a) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j
    cdef double best = 0.0, col
    for j in range(n):
        col = 0.0
        for i in range(n):
            col = col + fabs(a[i, j])
        if col > best:
            best = col
    return best


cdef void _matmul(double[:, ::1] a, double[:, ::1] b, double[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double acc
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc = acc + a[i, k] * b[k, j]
            out[i, j] = acc


def expm(a):
    """Matrix exponential by scaling and squaring with a truncated Taylor series."""
    x_arr = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] x = x_arr
    cdef Py_ssize_t n = x.shape[0]
    result_arr = np.eye(n)
    term_arr = np.eye(n)
    tmp_arr = np.empty((n, n))
    cdef double[:, ::1] result = result_arr
    cdef double[:, ::1] term = term_arr
    cdef double[:, ::1] tmp = tmp_arr
    cdef double norm = _norm1(x) if n else 0.0
    cdef int s = 0
    cdef int k, r
    cdef Py_ssize_t i, j
    cdef double scale
    if norm > 0.5:
        s = <int>ceil(log2(norm / 0.5))
    scale = pow(2.0, -s)
    for i in range(n):
        for j in range(n):
            x[i, j] = x[i, j] * scale
    for k in range(1, EXPM_MAX_TERMS):
        _matmul(term, x, tmp)
        for i in range(n):
            for j in range(n):
                term[i, j] = tmp[i, j] / k
                result[i, j] = result[i, j] + term[i, j]
        if _norm1(term) <= EXPM_TERM_RTOL * _norm1(result):
            break
    for r in range(s):
        _matmul(result, result, tmp)
        result[:, :] = tmp
    return result_arr


def rk4_lie_poisson_quadratic(c, W, b, pi0, double dt, Py_ssize_t nsteps):
    """RK4 for pi' = ad*_{W pi + b} pi, all samples returned."""
    cdef const double[:, :, ::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef const double[:, ::1] Wv = np.ascontiguousarray(W, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t d = cv.shape[0]
    out_arr = np.empty((nsteps + 1, d))
    cdef double[:, ::1] out = out_arr
    cdef double[::1] pi = np.array(pi0, dtype=np.float64)
    cdef double[::1] y = np.empty(d)
    cdef double[::1] w = np.empty(d)
    cdef double[:, ::1] k = np.empty((4, d))
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0
    cdef Py_ssize_t n, i, s
    cdef double[4] coef
    coef[0] = half
    coef[1] = half
    coef[2] = dt
    with nogil:
        for i in range(d):
            out[0, i] = pi[i]
        for n in range(nsteps):
            for i in range(d):
                y[i] = pi[i]
            for s in range(4):
                _matvec(Wv, y, w)
                for i in range(d):
                    w[i] = w[i] + bv[i]
                _ad_star(cv, w, y, k[s])
                if s < 3:
                    for i in range(d):
                        y[i] = pi[i] + coef[s] * k[s, i]
            for i in range(d):
                pi[i] = pi[i] + sixth * (k[0, i] + 2.0 * k[1, i] + 2.0 * k[2, i] + k[3, i])
                out[n + 1, i] = pi[i]
    return out_arr


def rk4_euler_poincare_quadratic(c, inertia, inertia_inv, xi0, double dt, Py_ssize_t nsteps):
    """RK4 for xi' = I^{-1} ad*_xi (I xi), all samples returned."""
    cdef const double[:, :, ::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef const double[:, ::1] Iv = np.ascontiguousarray(inertia, dtype=np.float64)
    cdef const double[:, ::1] Iinv = np.ascontiguousarray(inertia_inv, dtype=np.float64)
    cdef Py_ssize_t d = cv.shape[0]
    out_arr = np.empty((nsteps + 1, d))
    cdef double[:, ::1] out = out_arr
    cdef double[::1] xi = np.array(xi0, dtype=np.float64)
    cdef double[::1] y = np.empty(d)
    cdef double[::1] m = np.empty(d)
    cdef double[::1] a = np.empty(d)
    cdef double[:, ::1] k = np.empty((4, d))
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0
    cdef Py_ssize_t n, i, s
    cdef double[4] coef
    coef[0] = half
    coef[1] = half
    coef[2] = dt
    with nogil:
        for i in range(d):
            out[0, i] = xi[i]
        for n in range(nsteps):
            for i in range(d):
                y[i] = xi[i]
            for s in range(4):
                _matvec(Iv, y, m)
                _ad_star(cv, y, m, a)
                _matvec(Iinv, a, k[s])
                if s < 3:
                    for i in range(d):
                        y[i] = xi[i] + coef[s] * k[s, i]
            for i in range(d):
                xi[i] = xi[i] + sixth * (k[0, i] + 2.0 * k[1, i] + 2.0 * k[2, i] + k[3, i])
                out[n + 1, i] = xi[i]
    return out_arr
