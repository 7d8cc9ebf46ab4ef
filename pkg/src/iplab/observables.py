"""Per-state and spectral statistics of a diagonalized lattice.

A state counts as delocalized when its probability on the outermost
``B = max(2, floor(0.02 N_s))`` sites at each end reaches ``theta`` times
what a uniform state would put there. In energy order each band then reads
localized (A), delocalized (B), localized (C).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .eigen import EigenSolution

THETA = 1e-3
BOUNDARY_FRACTION = 0.02
NORM_TOL = 1e-8
DOS_BINS = 200
GAP_FACTOR = 3.0

LOCALIZED = "localized"
DELOCALIZED = "delocalized"


def _check_normalized(v):
    v = np.asarray(v, dtype=float)
    norm = math.sqrt(float(v @ v))
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"vector is not normalized (norm = {norm:.12g})")
    return v


def ipr(vector) -> float:
    """Inverse participation ratio sum |psi_i|^4."""
    v = _check_normalized(vector)
    p = v * v
    return float(p @ p)


def boundary_sites(n_sites: int) -> int:
    return max(2, int(math.floor(BOUNDARY_FRACTION * n_sites)))


def edge_weight(vector) -> float:
    """Probability on the outermost ``boundary_sites`` sites of both ends."""
    p = np.asarray(vector, dtype=float) ** 2
    b = min(boundary_sites(p.size), p.size // 2)
    return float(p[:b].sum() + p[-b:].sum())


def classify_state(weight: float, n_sites: int, theta: float = THETA) -> str:
    """Label a state from its boundary weight."""
    uniform = 2 * boundary_sites(n_sites) / n_sites
    return DELOCALIZED if weight >= theta * uniform else LOCALIZED


class Profile(NamedTuple):
    center: float
    sigma_sites: float
    fwhm_sites: float
    envelope: np.ndarray


def cell_envelope(vector, sites_per_cell: int = 2) -> np.ndarray:
    """Per-cell amplitude sqrt(sum of |psi|^2 over the cell's sites)."""
    p = np.asarray(vector, dtype=float) ** 2
    pad = (-p.size) % sites_per_cell
    if pad:
        p = np.concatenate([p, np.zeros(pad)])
    return np.sqrt(p.reshape(-1, sites_per_cell).sum(axis=1))


def envelope_fwhm(env) -> float:
    """Full width at half maximum in envelope units, linearly interpolated.

    Crossings that never happen (profile still above half maximum at an end
    of the lattice) are clipped to that end.
    """
    env = np.asarray(env, dtype=float)
    peak = int(np.argmax(env))
    half = 0.5 * env[peak]
    below = np.flatnonzero(env[:peak] < half)
    if below.size:
        j = below[-1]
        left = j + (half - env[j]) / (env[j + 1] - env[j])
    else:
        left = 0.0
    below = np.flatnonzero(env[peak + 1:] < half)
    if below.size:
        j = peak + below[0]
        right = j + (env[j] - half) / (env[j] - env[j + 1])
    else:
        right = float(env.size - 1)
    return float(right - left)


def state_profile(vector, sites_per_cell: int = 2) -> Profile:
    """Centroid and spread on the site index (1-based) plus the cell-envelope FWHM.

    The FWHM is measured on the per-cell envelope, which removes the
    site-to-site oscillation inside each cell, and converted to sites.
    """
    v = _check_normalized(vector)
    p = v * v
    x = np.arange(1, v.size + 1)
    center = float(p @ x)
    sigma = math.sqrt(max(float(p @ (x - center) ** 2), 0.0))
    env = cell_envelope(v, sites_per_cell)
    return Profile(center, sigma, sites_per_cell * envelope_fwhm(env), env)


def central_moments(vector, orders: Sequence[int] = (2, 3, 4)) -> list:
    """Moments of |psi_i|^2 about its centroid, site index as coordinate."""
    v = _check_normalized(vector)
    p = v * v
    x = np.arange(1, v.size + 1, dtype=float)
    dx = x - float(p @ x)
    return [float(p @ dx**k) for k in orders]


def split_bands(values) -> tuple:
    """Return ``(band_sizes, gap)`` for a sorted spectrum.

    The split is the largest consecutive gap inside the middle third of the
    spectrum, accepted only if it exceeds three times the median spacing.
    Otherwise the spectrum is one band with gap 0.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 3:
        return (n,), 0.0
    gaps = np.diff(values)
    lo, hi = n // 3, (2 * n) // 3
    if hi <= lo:
        return (n,), 0.0
    k = int(np.argmax(gaps[lo:hi])) + lo
    if gaps[k] > GAP_FACTOR * float(np.median(gaps)):
        return (k + 1, n - k - 1), float(gaps[k])
    return (n,), 0.0


def band_labels(band_sizes) -> np.ndarray:
    return np.repeat(np.arange(1, len(band_sizes) + 1), band_sizes)


def level_spacings(values, band_sizes) -> list:
    """Consecutive gaps within each band."""
    values = np.asarray(values, dtype=float)
    out, start = [], 0
    for size in band_sizes:
        out.append(np.diff(values[start:start + size]))
        start += size
    return out


def dos_histogram(values, bins: int = DOS_BINS) -> tuple:
    """Equal-width histogram over [min, max]; returns ``(edges, counts)``."""
    values = np.asarray(values, dtype=float)
    counts, edges = np.histogram(values, bins=bins, range=(values.min(), values.max()))
    return edges, counts


def domain_label(letter: str, band: int) -> str:
    return letter if band == 1 else f"{letter}{band}"


def assign_domains(delocalized) -> np.ndarray:
    """Split one band (energy order) into A / B / C around its delocalized run.

    B spans from the first to the last delocalized state. A band without
    delocalized states is all A.
    """
    deloc = np.asarray(delocalized, dtype=bool)
    out = np.full(deloc.size, "A", dtype="<U1")
    hits = np.flatnonzero(deloc)
    if hits.size:
        out[hits[0]:hits[-1] + 1] = "B"
        out[hits[-1] + 1:] = "C"
    return out


@dataclass(frozen=True)
class StateObservables:
    index: int
    energy: float
    ipr: float
    center: float
    width: float
    fwhm_sites: float
    edge_weight: float
    delocalized: bool
    label: str
    band: int

    @property
    def domain(self) -> str:
        return self.label[0]


@dataclass(frozen=True, eq=False)
class SpectralSummary:
    band_sizes: tuple
    spacings: list
    dos: tuple
    band_gap: float
    fraction_delocalized: Optional[float] = None
    fldc_edges: list = field(default_factory=list)
    central_moments: Optional[np.ndarray] = None
    states: list = field(default_factory=list)

    @property
    def domains(self) -> np.ndarray:
        return np.array([s.domain for s in self.states])

    def mean_ipr(self, domain: str, band: Optional[int] = None) -> float:
        vals = [s.ipr for s in self.states
                if s.domain == domain and (band is None or s.band == band)]
        return float(np.mean(vals)) if vals else float("nan")


def _state_table(vectors, theta, band_sizes, values, sites_per_cell=2):
    n = vectors.shape[0]
    p = vectors * vectors
    x = np.arange(1, n + 1, dtype=float)
    iprs = np.sum(p * p, axis=0)
    centers = x @ p
    dx = x[:, None] - centers[None, :]
    moments = np.stack([np.sum(p * dx**k, axis=0) for k in (2, 3, 4)], axis=1)
    b = min(boundary_sites(n), n // 2)
    weights = p[:b].sum(axis=0) + p[n - b:].sum(axis=0)
    deloc = weights >= theta * (2 * boundary_sites(n) / n)

    labels = np.empty(n, dtype="<U2")
    bands = band_labels(band_sizes)
    start = 0
    for band, size in enumerate(band_sizes, start=1):
        doms = assign_domains(deloc[start:start + size])
        labels[start:start + size] = [domain_label(d, band) for d in doms]
        start += size

    states = []
    for i in range(n):
        env = cell_envelope(vectors[:, i], sites_per_cell)
        states.append(StateObservables(
            index=i,
            energy=float(values[i]),
            ipr=float(iprs[i]),
            center=float(centers[i]),
            width=float(math.sqrt(max(moments[i, 0], 0.0))),
            fwhm_sites=sites_per_cell * envelope_fwhm(env),
            edge_weight=float(weights[i]),
            delocalized=bool(deloc[i]),
            label=str(labels[i]),
            band=int(bands[i]),
        ))
    return states, moments


def fldc_edges(states, band_sizes) -> list:
    """Per band, the energies where A turns into B and B into C.

    Each edge is the midpoint between the neighbouring states' energies;
    ``None`` where the transition does not occur.
    """
    out, start = [], 0
    for size in band_sizes:
        band = states[start:start + size]
        doms = [s.domain for s in band]
        lower = upper = None
        if "B" in doms:
            first = doms.index("B")
            last = size - 1 - doms[::-1].index("B")
            if first > 0:
                lower = 0.5 * (band[first - 1].energy + band[first].energy)
            if last < size - 1:
                upper = 0.5 * (band[last].energy + band[last + 1].energy)
        out.append((lower, upper))
        start += size
    return out


def analyze_states(solution: EigenSolution, theta: float = THETA,
                   band_sizes=None, sites_per_cell: int = 2) -> list:
    if solution.vectors is None:
        raise ValueError("state analysis needs eigenvectors")
    if band_sizes is None:
        band_sizes, _ = split_bands(solution.values)
    states, _ = _state_table(solution.vectors, theta, band_sizes, solution.values,
                             sites_per_cell)
    return states


def spectral_summary(solution: EigenSolution, spec=None, bins: int = DOS_BINS,
                     theta: float = THETA) -> SpectralSummary:
    """Spacings, DOS, band gap and, with eigenvectors, the localization picture.

    ``spec`` is accepted for context only; everything is derived from
    ``solution``.
    """
    values = solution.values
    band_sizes, gap = split_bands(values)
    spacings = level_spacings(values, band_sizes)
    dos = dos_histogram(values, bins)
    if solution.vectors is None:
        return SpectralSummary(band_sizes, spacings, dos, gap)
    sites_per_cell = spec.spectrum.k if spec is not None else 2
    states, moments = _state_table(solution.vectors, theta, band_sizes, values,
                                   sites_per_cell)
    frac = sum(s.delocalized for s in states) / len(states)
    return SpectralSummary(band_sizes, spacings, dos, gap, frac,
                           fldc_edges(states, band_sizes), moments, states)


def eigenstate_map(solution: EigenSolution, band=1) -> np.ndarray:
    """|psi| per state (rows, energy order) and site (columns), each row scaled to max 1.

    ``band`` is 1, 2 or ``"all"``.
    """
    if solution.vectors is None:
        raise ValueError("eigenstate map needs eigenvectors")
    band_sizes, _ = split_bands(solution.values)
    if band == "all":
        cols = slice(0, solution.n)
    else:
        if band not in range(1, len(band_sizes) + 1):
            raise ValueError(f"band must be 1..{len(band_sizes)} or 'all', got {band!r}")
        start = sum(band_sizes[:band - 1])
        cols = slice(start, start + band_sizes[band - 1])
    mags = np.abs(solution.vectors[:, cols]).T
    peak = mags.max(axis=1, keepdims=True)
    peak[peak == 0] = 1.0
    return mags / peak
