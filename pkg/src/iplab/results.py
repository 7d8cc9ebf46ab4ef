"""CSV tables and result bundles.

Floats are written with 17 significant digits so they read back bit-exact.
Files are written to a temporary name and renamed into place.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1

EIGENVALUES_HEADER = ("index", "energy", "band")
STATES_HEADER = ("index", "energy", "band", "ipr", "center", "sigma_sites",
                 "fwhm_sites", "edge_weight", "class")
MAP_HEADER = ("state_index", "site_index", "magnitude")
DOS_HEADER = ("bin_left", "bin_right", "count")
SPACING_HEADER = ("band", "index", "spacing")
SWEEP_HEADER = ("axis", "point", "replica", "fraction_delocalized", "band_gap",
                "mean_ipr_A", "mean_ipr_B", "mean_ipr_C", "fldc_lower", "fldc_upper")
SCALING_HEADER = ("n_sites", "value")
VARIATIONAL_HEADER = ("alpha", "e_closed_form", "e_exact_expectation")
PROFILE_HEADER = ("state_index", "site_index", "amplitude")
DISORDER_HEADER = ("strength", "mean_fraction_delocalized", "std", "replicas")


class ResultsIOError(OSError):
    def __init__(self, path, cause):
        self.path = str(path)
        super().__init__(f"cannot write {path}: {cause}")


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(value)


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


@dataclass
class Dataset:
    """Named tables plus metadata, ready for :func:`write_results`."""

    tables: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    scripts: dict = field(default_factory=dict)
    texts: dict = field(default_factory=dict)

    def add(self, name, header, rows):
        self.tables[name] = (tuple(header), list(rows))


def _atomic_write(path: Path, text: str):
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
        try:
            with os.fdopen(fd, "w", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise ResultsIOError(path, exc) from exc


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else fmt(v)
    return obj


def write_results(dataset: Dataset, out_dir, config=None) -> list:
    """Write every table, text and script plus ``manifest.json``; return the paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ResultsIOError(out, exc) from exc
    written = []
    for name, (header, rows) in sorted(dataset.tables.items()):
        path = out / name
        _atomic_write(path, csv_text(header, rows))
        written.append(path)
    for name, text in sorted({**dataset.texts, **dataset.scripts}.items()):
        path = out / name
        _atomic_write(path, text)
        written.append(path)
    manifest = {
        "format_version": FORMAT_VERSION,
        "files": sorted(p.name for p in written),
        "metadata": _jsonable(dataset.metadata),
    }
    if config is not None:
        manifest["config"] = _jsonable(config)
    path = out / "manifest.json"
    _atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    written.append(path)
    return written


def read_csv(path) -> tuple:
    """``(header, rows)`` with every cell left as a string."""
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    return tuple(lines[0].split(",")), [line.split(",") for line in lines[1:]]


# table builders -----------------------------------------------------------

def eigenvalue_rows(values, band_sizes):
    bands = np.repeat(np.arange(1, len(band_sizes) + 1), band_sizes)
    return [(i, float(v), int(b)) for i, (v, b) in enumerate(zip(values, bands))]


def state_rows(states):
    return [(s.index, s.energy, s.band, s.ipr, s.center, s.width, s.fwhm_sites,
             s.edge_weight, s.label) for s in states]


def map_rows(matrix, state_indices=None):
    rows = []
    if state_indices is None:
        state_indices = range(matrix.shape[0])
    for state, row in zip(state_indices, matrix):
        rows.extend((int(state), site, float(m)) for site, m in enumerate(row, start=1))
    return rows


def dos_rows(edges, counts):
    return [(float(edges[i]), float(edges[i + 1]), int(c)) for i, c in enumerate(counts)]


def spacing_rows(spacings):
    return [(band, i, float(s)) for band, series in enumerate(spacings, start=1)
            for i, s in enumerate(series)]


def sweep_rows(rows):
    return [(r.axis, r.point, r.replica, r.fraction_delocalized, r.band_gap,
             r.mean_ipr_A, r.mean_ipr_B, r.mean_ipr_C, r.fldc_lower, r.fldc_upper)
            for r in rows]


def scaling_fit_text(fit) -> str:
    return (f"exponent = {fmt(fit.exponent)}\n"
            f"intercept = {fmt(fit.intercept)}\n"
            f"r_squared = {fmt(fit.r_squared)}\n")
