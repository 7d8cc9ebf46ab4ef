"""Symmetric tridiagonal eigensolver and a dense Jacobi oracle.

The QL/bisection kernels come from the compiled ``_kernels`` extension
when it is importable and from ``_pykernels`` otherwise. Set
``IPLAB_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _pykernels
from .errors import ConvergenceError
from .lattice import Hamiltonian

MAX_ITER = 50
JACOBI_MAX_SIZE = 512

_KERNELS = {"python": _pykernels}
try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None
else:
    _KERNELS["compiled"] = _compiled

if os.environ.get("IPLAB_BACKEND", "").lower() == "python" or _compiled is None:
    DEFAULT_BACKEND = "python"
else:
    DEFAULT_BACKEND = "compiled"


def available_backends() -> list:
    return sorted(_KERNELS)


def _kernels(backend: Optional[str]):
    name = backend or DEFAULT_BACKEND
    try:
        return _KERNELS[name]
    except KeyError:
        raise ValueError(
            f"unknown or unavailable backend {name!r}; have {available_backends()}"
        ) from None


@dataclass(frozen=True, eq=False)
class EigenSolution:
    """Ascending eigenvalues; ``vectors[:, i]`` belongs to ``values[i]``."""

    values: np.ndarray
    vectors: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.values.size

    def vector(self, i: int) -> np.ndarray:
        if self.vectors is None:
            raise ValueError("solution was computed without eigenvectors")
        return self.vectors[:, i]


def _as_tridiagonal(h):
    if isinstance(h, Hamiltonian):
        return h.diag, h.offdiag
    d, e = h
    return np.asarray(d, dtype=float), np.asarray(e, dtype=float)


def _fix_signs(vectors):
    """Make the largest-magnitude component of each column positive.

    Mirror-symmetric states have exact ties between sites; the first site
    within a relative 1e-8 of the maximum wins, so the choice does not
    depend on rounding.
    """
    mag = np.abs(vectors)
    idx = np.argmax(mag >= (1 - 1e-8) * mag.max(axis=0), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    vectors *= signs


def _orthonormalize_clusters(values, vectors, tol):
    """Modified Gram-Schmidt inside runs of numerically equal eigenvalues."""
    n = values.size
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and values[stop] - values[stop - 1] < tol:
            stop += 1
        if stop - start > 1:
            for j in range(start, stop):
                v = vectors[:, j]
                for i in range(start, j):
                    v -= (vectors[:, i] @ v) * vectors[:, i]
                v /= np.linalg.norm(v)
        start = stop


def gershgorin_bounds(h) -> tuple:
    d, e = _as_tridiagonal(h)
    r = np.zeros_like(d)
    r[:-1] += np.abs(e)
    r[1:] += np.abs(e)
    return float(np.min(d - r)), float(np.max(d + r))


def eigh_tridiagonal(h, want_vectors: bool = True, method: str = "ql",
                     backend: Optional[str] = None) -> EigenSolution:
    """Full eigendecomposition of a real symmetric tridiagonal matrix.

    ``h`` is a :class:`Hamiltonian` or a ``(diag, offdiag)`` pair.
    ``method="bisect"`` (values only) uses Sturm-sequence bisection instead
    of implicit QL.
    """
    d, e = _as_tridiagonal(h)
    n = d.size
    if n < 1:
        raise ValueError("empty matrix")
    if e.size != n - 1:
        raise ValueError("offdiag must have len(diag) - 1 entries")
    kern = _kernels(backend)

    if method == "bisect":
        if want_vectors:
            raise ValueError("bisection computes eigenvalues only")
        lo, hi = gershgorin_bounds((d, e))
        span = max(hi - lo, abs(hi), abs(lo), 1.0)
        out = np.empty(n)
        kern.bisect(np.ascontiguousarray(d), np.ascontiguousarray(e), out,
                    lo - 1e-12 * span, hi + 1e-12 * span)
        return EigenSolution(out)
    if method != "ql":
        raise ValueError(f"unknown method {method!r}")

    work_d = np.array(d, dtype=np.float64)
    work_e = np.zeros(n)
    work_e[: n - 1] = e
    if want_vectors:
        zt = np.eye(n)
        status = kern.tql_vectors(work_d, work_e, zt, MAX_ITER)
    else:
        status = kern.tql(work_d, work_e, MAX_ITER)
    if status >= 0:
        raise ConvergenceError(int(status), MAX_ITER)

    order = np.argsort(work_d, kind="stable")
    values = work_d[order]
    if not want_vectors:
        return EigenSolution(values)
    vectors = np.ascontiguousarray(zt[order].T)
    norm = float(np.sqrt(np.sum(d**2) + 2 * np.sum(e**2)))
    _orthonormalize_clusters(values, vectors, 1e-12 * norm)
    _fix_signs(vectors)
    return EigenSolution(values, vectors)


def eigvalsh_tridiagonal(h, method: str = "ql", backend: Optional[str] = None) -> np.ndarray:
    return eigh_tridiagonal(h, want_vectors=False, method=method, backend=backend).values


def count_below(h, x: float, backend: Optional[str] = None) -> int:
    """Sturm count: number of eigenvalues strictly below ``x``."""
    d, e = _as_tridiagonal(h)
    return int(_kernels(backend).sturm_count(np.ascontiguousarray(d),
                                             np.ascontiguousarray(e), float(x)))


def _round_robin(n):
    """Rounds of disjoint index pairs covering every pair once (n even)."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        rounds.append([(players[i], players[n - 1 - i]) for i in range(n // 2)])
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_dense(m, tol: float = 1e-14, max_sweeps: int = 60) -> EigenSolution:
    """Cyclic Jacobi diagonalization of a dense symmetric matrix.

    Uses the round-robin ordering, so each round applies n/2 disjoint
    rotations at once. Independent of the tridiagonal kernels; kept as the
    reference for them.
    """
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    n = a.shape[0]
    if n > JACOBI_MAX_SIZE:
        raise ValueError(f"jacobi_dense is limited to {JACOBI_MAX_SIZE} rows, got {n}")
    scale = np.linalg.norm(a)
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(scale, 1.0)):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(n)

    padded = n + (n % 2)
    rounds = []
    for pairs in _round_robin(padded) if padded > 1 else []:
        pairs = [(p, q) if p < q else (q, p) for p, q in pairs if p < n and q < n]
        if pairs:
            p_idx, q_idx = (np.array(x) for x in zip(*pairs))
            rounds.append((p_idx, q_idx))

    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p, q in rounds:
            apq = a[p, q]
            theta = (a[q, q] - a[p, p]) / np.where(apq == 0, 1.0, 2.0 * apq)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta**2 + 1.0))
            t = np.where(apq == 0, 0.0, t)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            ap, aq = a[:, p], a[:, q]
            a[:, p], a[:, q] = c * ap - s * aq, s * ap + c * aq
            ap, aq = a[p, :], a[q, :]
            a[p, :], a[q, :] = c[:, None] * ap - s[:, None] * aq, s[:, None] * ap + c[:, None] * aq
            vp, vq = v[:, p], v[:, q]
            v[:, p], v[:, q] = c * vp - s * vq, s * vp + c * vq
            a[p, q] = 0.0
            a[q, p] = 0.0
    else:
        raise ConvergenceError(-1, max_sweeps)

    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    vectors = np.ascontiguousarray(v[:, order])
    _fix_signs(vectors)
    return EigenSolution(values[order], vectors)
