import math

import numpy as np
import pytest

from iplab.eigen import EigenSolution, eigh_tridiagonal
from iplab.lattice import assemble, build_random_binary_lattice, grid_spec
from iplab.observables import (DELOCALIZED, LOCALIZED, assign_domains, boundary_sites,
                               central_moments, classify_state, dos_histogram,
                               edge_weight, eigenstate_map, envelope_fwhm, ipr,
                               level_spacings, spectral_summary, split_bands,
                               state_profile)


def test_ipr_limits():
    n = 50
    assert ipr(np.eye(n)[3]) == 1.0
    assert ipr(np.full(n, 1 / math.sqrt(n))) == pytest.approx(1 / n)
    with pytest.raises(ValueError):
        ipr(np.ones(4))


def test_boundary_and_classification():
    assert boundary_sites(10) == 2
    assert boundary_sites(302) == 6
    assert boundary_sites(3002) == 60
    n = 302
    flat = np.full(n, 1 / math.sqrt(n))
    assert edge_weight(flat) == pytest.approx(12 / n)
    assert classify_state(edge_weight(flat), n) == DELOCALIZED
    assert classify_state(0.0, n) == LOCALIZED
    threshold = 1e-3 * 12 / n
    assert classify_state(threshold, n) == DELOCALIZED
    assert classify_state(threshold * 0.999, n) == LOCALIZED


def test_assign_domains():
    doms = assign_domains([0, 0, 1, 0, 1, 1, 0])
    assert "".join(doms) == "AABBBBC"
    assert "".join(assign_domains([0, 0, 0])) == "AAA"
    assert "".join(assign_domains([1, 1])) == "BB"


def test_gaussian_profile():
    n = 400
    x = np.arange(1, n + 1)
    # constant within each cell, so the cell envelope is an exact gaussian
    cell = np.repeat(np.arange(1, n // 2 + 1), 2)
    v = np.exp(-0.01 * (cell - 100.5) ** 2)
    v /= np.linalg.norm(v)
    prof = state_profile(v)
    assert prof.center == pytest.approx(float((v * v) @ x))
    expected = 2 * 2 * math.sqrt(math.log(2) / 0.01)
    assert prof.fwhm_sites == pytest.approx(expected, rel=5e-3)  # linear interpolation between cells
    m2, m3, _ = central_moments(v)
    assert m3 == pytest.approx(0.0, abs=1e-8)
    assert m2 == pytest.approx(prof.sigma_sites**2)


def test_fwhm_clipped_at_edge():
    assert envelope_fwhm(np.array([1.0, 1.0, 1.0])) == 2.0
    assert envelope_fwhm(np.array([0.0, 1.0, 0.0])) == pytest.approx(1.0)


def test_split_bands():
    vals = np.concatenate([np.linspace(0, 1, 50), np.linspace(2, 3, 50)])
    sizes, gap = split_bands(vals)
    assert sizes == (50, 50) and gap == pytest.approx(1.0)
    sizes, gap = split_bands(np.linspace(0, 1, 100))
    assert sizes == (100,) and gap == 0.0


def test_spacing_and_dos_bookkeeping(fig2):
    _, _, sol, summary = fig2
    n = sol.n
    counts = summary.dos[1]
    assert counts.sum() == n
    start = 0
    for size, sp in zip(summary.band_sizes, summary.spacings):
        first = sol.values[start]
        rebuilt = first + np.concatenate([[0.0], np.cumsum(sp)])
        assert np.allclose(rebuilt, sol.values[start:start + size], atol=1e-12)
        start += size
    edges, c = dos_histogram(sol.values, 17)
    assert c.sum() == n and edges.size == 18


def test_fig2_labels(fig2):
    _, _, _, summary = fig2
    assert summary.band_sizes == (151, 151)
    labels = [s.label for s in summary.states]
    assert set(labels[:151]) == {"A", "B", "C"}
    assert set(labels[151:]) == {"A2", "B2", "C2"}
    assert all(lo is not None and hi is not None for lo, hi in summary.fldc_edges)
    assert summary.mean_ipr("A") > summary.mean_ipr("B")
    assert math.isnan(summary.mean_ipr("D"))


def test_reflection_symmetry_of_states(fig2):
    _, _, sol, _ = fig2
    v = np.abs(sol.vectors)
    gaps = np.diff(sol.values)
    nondeg = np.ones(sol.n, bool)
    nondeg[:-1] &= gaps > 1e-9
    nondeg[1:] &= gaps > 1e-9
    assert nondeg.sum() > 0.9 * sol.n
    assert np.max(np.abs(v[:, nondeg] - v[::-1, nondeg])) < 1e-8


def test_eigenstate_map(fig2):
    _, _, sol, _ = fig2
    m = eigenstate_map(sol, 1)
    assert m.shape == (151, 302)
    assert np.allclose(m.max(axis=1), 1.0)
    assert eigenstate_map(sol, "all").shape == (302, 302)
    with pytest.raises(ValueError):
        eigenstate_map(sol, 3)
    with pytest.raises(ValueError):
        eigenstate_map(EigenSolution(sol.values), 1)


def test_values_only_summary():
    sol = eigh_tridiagonal(assemble(grid_spec(100)), want_vectors=False)
    s = spectral_summary(sol)
    assert s.fraction_delocalized is None and s.states == []
    assert len(level_spacings(sol.values, s.band_sizes)) == 2


def test_random_binary_states_are_compact():
    sol = eigh_tridiagonal(build_random_binary_lattice(1, 302, 0.3, 1.0, 2.0))
    iprs = np.sum(sol.vectors**4, axis=0)
    assert np.median(iprs) > 0.1
