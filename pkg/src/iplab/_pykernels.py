"""Pure-Python twins of the routines in ``_kernels.pyx``.

Used when the compiled extension is unavailable or ``IPLAB_BACKEND=python``
is set. Same arguments, same in-place semantics, same return codes. The
eigenvector variant rotates numpy rows, so it is usable up to a few hundred
sites; beyond that build the extension.
"""

import math
import sys

BACKEND = "python"

_EPS = sys.float_info.epsilon
_TINY = sys.float_info.min


def _find_split(d, e, l, n):
    for m in range(l, n - 1):
        dd = abs(d[m]) + abs(d[m + 1])
        if abs(e[m]) <= _EPS * dd:
            return m
    return n - 1


def _ql(d, e, zt, max_iter):
    n = len(d)
    if n > 0:
        e[n - 1] = 0.0
    for l in range(n):
        it = 0
        while True:
            m = _find_split(d, e, l, n)
            if m == l:
                break
            if it == max_iter:
                return l
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
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
                if zt is not None:
                    za = zt[i].copy()
                    zb = zt[i + 1]
                    zt[i] = c * za - s * zb
                    zt[i + 1] = s * za + c * zb
                i -= 1
            if r == 0.0 and i >= l:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


def tql(d, e, max_iter=50):
    # plain lists are several times faster than numpy scalars in this loop
    dl, el = d.tolist(), e.tolist()
    status = _ql(dl, el, None, max_iter)
    d[:] = dl
    e[:] = el
    return status


def tql_vectors(d, e, zt, max_iter=50):
    dl, el = d.tolist(), e.tolist()
    status = _ql(dl, el, zt, max_iter)
    d[:] = dl
    e[:] = el
    return status


def _pivmin(e2):
    emax = max(e2) if e2 else 0.0
    return _TINY * max(emax, 1.0)


def _sturm(d, e2, x, pivmin):
    count = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, len(d)):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


def sturm_count(d, e, x):
    e2 = [v * v for v in e.tolist()]
    return _sturm(d.tolist(), e2, float(x), _pivmin(e2))


def bisect(d, e, out, lo, hi):
    dl = d.tolist()
    e2 = [v * v for v in e.tolist()]
    pivmin = _pivmin(e2)
    scale = max(abs(lo), abs(hi))
    tol = 2.0 * _EPS * scale + pivmin
    a = lo
    for k in range(len(dl)):
        b = hi
        while b - a > tol:
            mid = 0.5 * (a + b)
            if mid <= a or mid >= b:
                break
            if _sturm(dl, e2, mid, pivmin) > k:
                b = mid
            else:
                a = mid
        out[k] = 0.5 * (a + b)
    return -1
