# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for symmetric tridiagonal eigenproblems.

Every routine mirrors one in ``_pykernels`` and has the same calling
convention. Arrays are modified in place; the return value is ``-1`` on
success or the index of the eigenvalue that failed to converge.
"""

from libc.math cimport fabs, hypot, copysign, sqrt
from libc.float cimport DBL_EPSILON, DBL_MIN

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


cdef inline Py_ssize_t _find_split(double[::1] d, double[::1] e,
                                   Py_ssize_t l, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t m
    cdef double dd
    for m in range(l, n - 1):
        dd = fabs(d[m]) + fabs(d[m + 1])
        if fabs(e[m]) <= DBL_EPSILON * dd:
            return m
    return n - 1


def tql(double[::1] d, double[::1] e, int max_iter=50):
    """Implicit QL eigenvalues of the tridiagonal (d, e).

    ``e`` has length ``n`` with ``e[i]`` coupling sites i and i+1; ``e[n-1]``
    is workspace. On return ``d`` holds the (unsorted) eigenvalues.
    """
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t l, m, i
    cdef int it
    cdef double g, r, s, c, p, f, b
    cdef Py_ssize_t failed = -1
    with nogil:
        if n > 0:
            e[n - 1] = 0.0
        for l in range(n):
            it = 0
            while True:
                m = _find_split(d, e, l, n)
                if m == l:
                    break
                if it == max_iter:
                    failed = l
                    break
                it += 1
                g = (d[l + 1] - d[l]) / (2.0 * e[l])
                r = hypot(g, 1.0)
                g = d[m] - d[l] + e[l] / (g + copysign(r, g))
                s = 1.0
                c = 1.0
                p = 0.0
                i = m - 1
                while i >= l:
                    f = s * e[i]
                    b = c * e[i]
                    r = hypot(f, g)
                    e[i + 1] = r
                    if r == 0.0:
                        d[i + 1] -= p
                        e[m] = 0.0
                        break
                    s = f / r
                    c = g / r
                    g = d[i + 1] - p
                    r = (d[i] - g) * s + 2.0 * c * b
                    p = s * r
                    d[i + 1] = g + p
                    g = c * r - b
                    i -= 1
                if r == 0.0 and i >= l:
                    continue
                d[l] -= p
                e[l] = g
                e[m] = 0.0
            if failed >= 0:
                break
    return failed


def tql_vectors(double[::1] d, double[::1] e, double[:, ::1] zt, int max_iter=50):
    """Implicit QL with eigenvector accumulation.

    ``zt`` is an ``n x n`` C-contiguous array, normally the identity; row k
    ends up holding the eigenvector belonging to ``d[k]``. Rows rather than
    columns are rotated so the inner loop runs over contiguous memory.
    """
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t l, m, i, k
    cdef int it
    cdef double g, r, s, c, p, f, b, zk
    cdef double *za
    cdef double *zb
    cdef Py_ssize_t failed = -1
    with nogil:
        if n > 0:
            e[n - 1] = 0.0
        for l in range(n):
            it = 0
            while True:
                m = _find_split(d, e, l, n)
                if m == l:
                    break
                if it == max_iter:
                    failed = l
                    break
                it += 1
                g = (d[l + 1] - d[l]) / (2.0 * e[l])
                r = hypot(g, 1.0)
                g = d[m] - d[l] + e[l] / (g + copysign(r, g))
                s = 1.0
                c = 1.0
                p = 0.0
                i = m - 1
                while i >= l:
                    f = s * e[i]
                    b = c * e[i]
                    r = hypot(f, g)
                    e[i + 1] = r
                    if r == 0.0:
                        d[i + 1] -= p
                        e[m] = 0.0
                        break
                    s = f / r
                    c = g / r
                    g = d[i + 1] - p
                    r = (d[i] - g) * s + 2.0 * c * b
                    p = s * r
                    d[i + 1] = g + p
                    g = c * r - b
                    za = &zt[i, 0]
                    zb = &zt[i + 1, 0]
                    for k in range(n):
                        zk = zb[k]
                        zb[k] = s * za[k] + c * zk
                        za[k] = c * za[k] - s * zk
                    i -= 1
                if r == 0.0 and i >= l:
                    continue
                d[l] -= p
                e[l] = g
                e[m] = 0.0
            if failed >= 0:
                break
    return failed


cdef inline Py_ssize_t _sturm(const double[::1] d, const double[::1] e2, double x,
                              double pivmin) noexcept nogil:
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i, count = 0
    cdef double q = d[0] - x
    if fabs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, n):
        q = d[i] - x - e2[i - 1] / q
        if fabs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


def sturm_count(const double[::1] d, const double[::1] e, double x):
    """Number of eigenvalues strictly below ``x`` (``e`` has length n-1)."""
    cdef Py_ssize_t n = d.shape[0]
    e2 = np.empty(max(n - 1, 1))
    cdef double[::1] e2v = e2
    cdef Py_ssize_t i
    cdef double emax = 0.0
    for i in range(n - 1):
        e2v[i] = e[i] * e[i]
        if e2v[i] > emax:
            emax = e2v[i]
    cdef double pivmin = DBL_MIN * (emax if emax > 1.0 else 1.0)
    return _sturm(d, e2v, x, pivmin)


def bisect(const double[::1] d, const double[::1] e, double[::1] out, double lo, double hi):
    """All eigenvalues by Sturm-sequence bisection, ascending, into ``out``.

    ``lo``/``hi`` must bracket the spectrum (Gershgorin bounds work).
    """
    cdef Py_ssize_t n = d.shape[0]
    e2 = np.empty(max(n - 1, 1))
    cdef double[::1] e2v = e2
    cdef Py_ssize_t i, k, cnt
    cdef double emax = 0.0
    cdef double a, b, mid, tol
    for i in range(n - 1):
        e2v[i] = e[i] * e[i]
        if e2v[i] > emax:
            emax = e2v[i]
    cdef double pivmin = DBL_MIN * (emax if emax > 1.0 else 1.0)
    cdef double scale = fabs(lo) if fabs(lo) > fabs(hi) else fabs(hi)
    with nogil:
        a = lo
        for k in range(n):
            # eigenvalue k is the smallest x with count(x) > k; start from the
            # previous eigenvalue so the sweep stays monotone
            b = hi
            tol = 2.0 * DBL_EPSILON * scale + pivmin
            while b - a > tol:
                mid = 0.5 * (a + b)
                if mid <= a or mid >= b:
                    break
                cnt = _sturm(d, e2v, mid, pivmin)
                if cnt > k:
                    b = mid
                else:
                    a = mid
            out[k] = 0.5 * (a + b)
    return -1
