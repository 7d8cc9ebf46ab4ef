"""Parameter sweeps, size scaling, disorder ensembles and figure datasets.

Randomness is drawn from per-task streams keyed by (master seed, axis,
point index, replica index), so results do not depend on execution order
or on how many workers run them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .eigen import eigh_tridiagonal
from .errors import ConvergenceError, InsufficientDataError
from .lattice import (LatticeSpec, assemble, build_phase_grid, grid_spec,
                      make_disorder)
from .observables import spectral_summary

AXES = ("lf", "epsilon", "n_sites", "disorder_p")
TARGETS = ("band_center", "band_edge", "mean_AC", "mean_B")

DEFAULT_LF_POINTS = (0.8, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 100.0)
DEFAULT_EPS_POINTS = (0.1, 0.2, 0.3, 0.4, 0.5)
DEFAULT_SIZES = (302, 1002, 3002)
DEFAULT_REPLICAS = 16
FIG4_SITES = 2602


def stream_seed(master: int, axis: str, point_index: int, replica: int) -> int:
    """64-bit seed for one (axis, point, replica) task."""
    ss = np.random.SeedSequence(int(master),
                                spawn_key=(AXES.index(axis), point_index, replica))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    points: tuple
    base: LatticeSpec
    seed: int = 0
    replicas: int = 1

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        points = tuple(float(p) for p in self.points)
        if not points:
            raise ValueError("sweep needs at least one point")
        if list(points) != sorted(points):
            raise ValueError("sweep points must be sorted ascending")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        object.__setattr__(self, "points", points)


@dataclass(frozen=True)
class SweepRow:
    axis: str
    point: float
    replica: int
    fraction_delocalized: float
    band_gap: float
    mean_ipr_A: float
    mean_ipr_B: float
    mean_ipr_C: float
    fldc_lower: Optional[float]
    fldc_upper: Optional[float]
    error: Optional[str] = None


def _base_lf(base: LatticeSpec) -> float:
    if base.pattern.lf is None:
        raise ValueError("sweeps need a grid-generated base pattern")
    return base.pattern.lf


def point_spec(spec: SweepSpec, index: int, replica: int) -> LatticeSpec:
    """The lattice for one sweep task."""
    base, value = spec.base, spec.points[index]
    if spec.axis == "lf":
        return replace(base, pattern=build_phase_grid(base.n_cells, value), disorder=None)
    if spec.axis == "epsilon":
        return replace(base, epsilon=value, disorder=None)
    if spec.axis == "n_sites":
        n_sites = int(round(value))
        if n_sites % base.spectrum.k or n_sites < 2 * base.spectrum.k:
            raise ValueError(f"n_sites={n_sites} is not a whole number of cells (>= 2)")
        pattern = build_phase_grid(n_sites // base.spectrum.k, _base_lf(base))
        return replace(base, pattern=pattern, disorder=None)
    seed = stream_seed(spec.seed, spec.axis, index, replica)
    disorder = make_disorder(seed, value, base.n_cells, base.spectrum.k)
    return replace(base, disorder=disorder)


def evaluate(lattice: LatticeSpec):
    """Diagonalize and summarize one lattice."""
    solution = eigh_tridiagonal(assemble(lattice))
    return solution, spectral_summary(solution, lattice)


def _row(spec: SweepSpec, index: int, replica: int) -> SweepRow:
    point = spec.points[index]
    try:
        _, summary = evaluate(point_spec(spec, index, replica))
    except (ConvergenceError, FloatingPointError) as exc:
        nan = float("nan")
        return SweepRow(spec.axis, point, replica, nan, nan, nan, nan, nan, None, None,
                        error=str(exc))
    lower, upper = summary.fldc_edges[0] if summary.fldc_edges else (None, None)
    return SweepRow(
        spec.axis, point, replica,
        summary.fraction_delocalized, summary.band_gap,
        summary.mean_ipr("A"), summary.mean_ipr("B"), summary.mean_ipr("C"),
        lower, upper,
    )


def run_sweep(spec: SweepSpec, workers: int = 1) -> list:
    """One row per (point, replica), ordered by point then replica."""
    tasks = [(i, r) for i in range(len(spec.points)) for r in range(spec.replicas)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda t: _row(spec, *t), tasks))
    return [_row(spec, i, r) for i, r in tasks]


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    intercept: float
    r_squared: float
    points: tuple


def fit_power_law(sizes: Sequence[float], values: Sequence[float]) -> ScalingFit:
    """Least-squares line through (log N_s, log value)."""
    pts = [(float(n), float(v)) for n, v in zip(sizes, values)
           if n > 0 and v > 0 and math.isfinite(v)]
    if len(pts) < 3:
        raise InsufficientDataError(f"need at least 3 valid points, got {len(pts)}")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(float(slope), float(intercept), min(max(r2, 0.0), 1.0), tuple(pts))


def ipr_targets(solution, summary) -> dict:
    """The four IPR statistics tracked under size scaling."""
    first_band = summary.band_sizes[0]
    iprs = np.array([s.ipr for s in summary.states])
    doms = summary.domains
    ac = iprs[(doms == "A") | (doms == "C")]
    b = iprs[doms == "B"]
    return {
        "band_center": float(iprs[first_band // 2]),
        "band_edge": float(iprs[0]),
        "mean_AC": float(ac.mean()) if ac.size else float("nan"),
        "mean_B": float(b.mean()) if b.size else float("nan"),
    }


def scaling_table(base: LatticeSpec, sizes: Sequence[int], workers: int = 1) -> dict:
    """``{target: [(N_s, value), ...]}`` with the phase range and epsilon held fixed."""
    spec = SweepSpec("n_sites", tuple(sorted(sizes)), base)

    def one(i):
        solution, summary = evaluate(point_spec(spec, i, 0))
        return ipr_targets(solution, summary)

    idx = range(len(spec.points))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, idx))
    else:
        results = [one(i) for i in idx]
    return {t: [(int(n), r[t]) for n, r in zip(spec.points, results)] for t in TARGETS}


def size_scaling(base: LatticeSpec, sizes: Sequence[int], target: str,
                 table: Optional[dict] = None) -> ScalingFit:
    """Power-law exponent of an IPR statistic versus N_s."""
    if target not in TARGETS:
        raise ValueError(f"target must be one of {TARGETS}, got {target!r}")
    if len(sizes) < 3:
        raise InsufficientDataError("size scaling needs at least 3 sizes")
    if table is None:
        table = scaling_table(base, sizes)
    pts = table[target]
    return fit_power_law([p[0] for p in pts], [p[1] for p in pts])


@dataclass(frozen=True)
class DisorderStat:
    strength: float
    mean_fraction: float
    std_fraction: float
    replicas: int


def disorder_robustness(base: LatticeSpec, strengths: Sequence[float],
                        replicas: int = DEFAULT_REPLICAS, seed: int = 0,
                        workers: int = 1) -> tuple:
    """Ensemble statistics of the delocalized fraction; returns ``(stats, rows)``."""
    if any(not 0 <= p <= 0.2 for p in strengths):
        raise ValueError("disorder strengths must lie in [0, 0.2]")
    spec = SweepSpec("disorder_p", tuple(strengths), base, seed, replicas)
    rows = run_sweep(spec, workers)
    stats = []
    for p in spec.points:
        fr = np.array([r.fraction_delocalized for r in rows
                       if r.point == p and r.error is None])
        stats.append(DisorderStat(p, float(fr.mean()) if fr.size else float("nan"),
                                  float(fr.std()) if fr.size else float("nan"), int(fr.size)))
    return stats, rows


def fig2_spec() -> LatticeSpec:
    """N_s = 302, L_f = 1, eps = 0.3, d = (1, 2)."""
    return grid_spec(151)
