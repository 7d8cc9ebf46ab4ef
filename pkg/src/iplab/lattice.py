"""Isospectral cells, phase patterns and the assembled lattice Hamiltonian.

Every cell is an orthogonal conjugate ``O D O^T`` of one diagonal matrix
``D``, so all cells share the same eigenvalues. Cells are coupled by a
single real hopping ``epsilon`` from the last site of cell m to the first
site of cell m+1, with open boundaries. For two-site cells the whole
lattice is therefore a real symmetric tridiagonal matrix.

Rotation convention: ``O_phi = [[cos, sin], [-sin, cos]]``. With a positive
inter-cell hopping this makes ``(1, -1)`` the internal vector of the lower
cell eigenvalue at ``phi = pi/4``, which is what the Gaussian ground-state
ansatz in :mod:`iplab.variational` assumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

CENTER_PHASE = math.pi / 4


@dataclass(frozen=True)
class DiagonalSpectrum:
    """The eigenvalues d_1 < ... < d_K shared by every cell."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 2:
            raise ValueError("spectrum needs at least two values")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("spectrum values must be finite")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("spectrum values must be strictly increasing")
        object.__setattr__(self, "values", vals)

    @property
    def k(self) -> int:
        return len(self.values)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


@dataclass(frozen=True)
class PhasePattern:
    """Per-cell rotation angles.

    ``lf`` and ``span`` are set for grid-generated patterns and ``None`` for
    explicit phase lists.
    """

    phases: tuple
    lf: Optional[float] = None
    span: Optional[float] = None

    def __post_init__(self):
        phases = tuple(float(p) for p in self.phases)
        if not phases:
            raise ValueError("phase pattern is empty")
        if not all(math.isfinite(p) for p in phases):
            raise ValueError("phases must be finite")
        object.__setattr__(self, "phases", phases)

    @classmethod
    def from_phases(cls, phases: Sequence[float]) -> "PhasePattern":
        return cls(tuple(phases))

    @property
    def n_cells(self) -> int:
        return len(self.phases)

    @property
    def increment(self) -> float:
        """Exact grid spacing L/(N-1); mean spacing for explicit lists."""
        if self.n_cells < 2:
            return 0.0
        return (self.phases[-1] - self.phases[0]) / (self.n_cells - 1)

    @property
    def gradient_nform(self) -> Optional[float]:
        """The large-N gradient pi/(4 N L_f); close to ``increment``."""
        if self.lf is None:
            return None
        return math.pi / (4.0 * self.n_cells * self.lf)


def phase_span(lf: float) -> float:
    """Covered phase range L = (pi/4) / L_f."""
    return CENTER_PHASE / lf


def build_phase_grid(n_cells: int, lf: float) -> PhasePattern:
    """Equidistant phases centred on pi/4 covering ``[pi/4 - L/2, pi/4 + L/2]``."""
    if int(n_cells) != n_cells or n_cells < 2:
        raise ValueError(f"n_cells must be an integer >= 2, got {n_cells!r}")
    if not (lf > 0 and math.isfinite(lf)):
        raise ValueError(f"lf must be positive and finite, got {lf!r}")
    n_cells = int(n_cells)
    span = phase_span(lf)
    start = CENTER_PHASE - span / 2
    step = span / (n_cells - 1)
    phases = tuple(start + m * step for m in range(n_cells))
    return PhasePattern(phases, lf=float(lf), span=span)


def build_cell(phi: float, spectrum: DiagonalSpectrum) -> np.ndarray:
    """Two-site cell ``O_phi D O_phi^T``."""
    if spectrum.k != 2:
        raise ValueError("build_cell handles 2x2 cells; use build_cell_general")
    d1, d2 = spectrum.values
    return _cell_2x2(phi, d1, d2)


def _cell_entries(phi, d1, d2):
    c, s = np.cos(phi), np.sin(phi)
    a11 = d1 * c * c + d2 * s * s
    a22 = d1 * s * s + d2 * c * c
    a12 = (d2 - d1) * s * c
    return a11, a12, a22


def _cell_2x2(phi, d1, d2):
    a11, a12, a22 = _cell_entries(phi, d1, d2)
    return np.array([[a11, a12], [a12, a22]])


def givens(k: int, i: int, j: int, theta: float) -> np.ndarray:
    """Rotation in the (i, j) plane, sign convention matching ``build_cell``."""
    g = np.eye(k)
    c, s = math.cos(theta), math.sin(theta)
    g[i, i] = g[j, j] = c
    g[i, j] = s
    g[j, i] = -s
    return g


def build_cell_general(angles: Sequence[float], spectrum: DiagonalSpectrum) -> np.ndarray:
    """K x K cell from K(K-1)/2 Givens angles.

    Pairs are taken in lexicographic order (0,1), (0,2), ..., (K-2,K-1) and
    each rotation multiplies from the left.
    """
    k = spectrum.k
    pairs = list(combinations(range(k), 2))
    angles = list(angles)
    if len(angles) != len(pairs):
        raise ValueError(
            f"a {k}x{k} cell takes {len(pairs)} angles, got {len(angles)}"
        )
    o = np.eye(k)
    for (i, j), theta in zip(pairs, angles):
        o = givens(k, i, j, theta) @ o
    a = o @ np.diag(spectrum.values) @ o.T
    return 0.5 * (a + a.T)


@dataclass(frozen=True)
class DisorderRealization:
    """Multiplicative perturbations of the inter-cell hopping and cell eigenvalues."""

    coupling_factors: np.ndarray
    diagonal_factors: np.ndarray
    strength: float
    seed: int

    def __post_init__(self):
        for name in ("coupling_factors", "diagonal_factors"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def make_disorder(seed: int, strength: float, n_cells: int, k: int = 2) -> DisorderRealization:
    """Uniform factors in ``[1 - p, 1 + p]``, reproducible from ``seed``."""
    if not (0 <= strength < 1):
        raise ValueError(f"disorder strength must lie in [0, 1), got {strength!r}")
    if n_cells < 1 or k < 1:
        raise ValueError("n_cells and k must be positive")
    if strength == 0:
        coupling = np.ones(n_cells - 1)
        diagonal = np.ones((n_cells, k))
    else:
        rng = np.random.default_rng(seed)
        coupling = rng.uniform(1 - strength, 1 + strength, n_cells - 1)
        diagonal = rng.uniform(1 - strength, 1 + strength, (n_cells, k))
    return DisorderRealization(coupling, diagonal, float(strength), int(seed))


@dataclass(frozen=True)
class LatticeSpec:
    pattern: PhasePattern
    spectrum: DiagonalSpectrum
    epsilon: float
    disorder: Optional[DisorderRealization] = None

    def __post_init__(self):
        if not (self.epsilon >= 0 and math.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon!r}")
        object.__setattr__(self, "epsilon", float(self.epsilon))
        if self.disorder is not None:
            n, k = self.n_cells, self.spectrum.k
            if self.disorder.coupling_factors.shape != (n - 1,):
                raise ValueError("disorder coupling factors do not match n_cells")
            if self.disorder.diagonal_factors.shape != (n, k):
                raise ValueError("disorder diagonal factors do not match (n_cells, K)")

    @property
    def n_cells(self) -> int:
        return self.pattern.n_cells

    @property
    def n_sites(self) -> int:
        return self.spectrum.k * self.n_cells


def grid_spec(n_cells: int, lf: float = 1.0, epsilon: float = 0.3,
              d: Sequence[float] = (1.0, 2.0), disorder=None) -> LatticeSpec:
    """Shortcut for the equidistant-grid lattice used throughout."""
    return LatticeSpec(build_phase_grid(n_cells, lf), DiagonalSpectrum(tuple(d)),
                       epsilon, disorder)


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Real symmetric tridiagonal matrix plus its cell layout."""

    diag: np.ndarray
    offdiag: np.ndarray
    n_cells: int
    sites_per_cell: int = 2

    def __post_init__(self):
        diag = np.array(self.diag, dtype=np.float64)
        off = np.array(self.offdiag, dtype=np.float64)
        if diag.ndim != 1 or off.ndim != 1 or off.size != max(diag.size - 1, 0):
            raise ValueError("offdiag must have exactly len(diag) - 1 entries")
        diag.setflags(write=False)
        off.setflags(write=False)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", off)

    @property
    def n_sites(self) -> int:
        return self.diag.size

    def trace(self) -> float:
        return float(np.sum(self.diag))

    def frobenius_norm(self) -> float:
        return float(np.sqrt(np.sum(self.diag**2) + 2 * np.sum(self.offdiag**2)))

    def to_dense(self) -> np.ndarray:
        m = np.diag(self.diag)
        idx = np.arange(self.n_sites - 1)
        m[idx, idx + 1] = self.offdiag
        m[idx + 1, idx] = self.offdiag
        return m

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """H @ x for a vector or a stack of column vectors."""
        x = np.asarray(x, dtype=float)
        y = self.diag.reshape((-1,) + (1,) * (x.ndim - 1)) * x
        off = self.offdiag.reshape((-1,) + (1,) * (x.ndim - 1))
        y[:-1] += off * x[1:]
        y[1:] += off * x[:-1]
        return y


def assemble(spec: LatticeSpec) -> Hamiltonian:
    """Tridiagonal lattice Hamiltonian for two-site cells, open boundaries."""
    if spec.spectrum.k != 2:
        raise ValueError("assemble supports two-site cells only")
    n = spec.n_cells
    phases = np.asarray(spec.pattern.phases)
    d1, d2 = spec.spectrum.values
    coupling = np.full(n - 1, spec.epsilon)
    if spec.disorder is not None:
        f = spec.disorder.diagonal_factors
        d1 = d1 * f[:, 0]
        d2 = d2 * f[:, 1]
        coupling = coupling * spec.disorder.coupling_factors
    a11, a12, a22 = _cell_entries(phases, d1, d2)
    diag = np.empty(2 * n)
    diag[0::2] = a11
    diag[1::2] = a22
    off = np.empty(2 * n - 1)
    off[0::2] = a12
    off[1::2] = coupling
    return Hamiltonian(diag, off, n, 2)


def build_random_binary_lattice(seed: int, n_sites: int, epsilon: float,
                                d1: float, d2: float) -> Hamiltonian:
    """Chain with on-site values d1 or d2 (probability 1/2 each) and uniform hopping."""
    if n_sites < 2:
        raise ValueError("n_sites must be >= 2")
    rng = np.random.default_rng(seed)
    onsite = np.where(rng.random(n_sites) < 0.5, float(d1), float(d2))
    return Hamiltonian(onsite, np.full(n_sites - 1, float(epsilon)), n_sites, 1)
