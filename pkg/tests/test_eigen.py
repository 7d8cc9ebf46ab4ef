import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iplab.eigen import (available_backends, count_below, eigh_tridiagonal,
                         eigvalsh_tridiagonal, gershgorin_bounds, jacobi_dense)
from iplab.errors import ConvergenceError
from iplab.lattice import (DiagonalSpectrum, LatticeSpec, PhasePattern, assemble,
                           grid_spec, make_disorder)


def random_spec(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 33))
    d = np.sort(rng.uniform(-2, 3, 2))
    d[1] += 0.05
    pattern = PhasePattern.from_phases(rng.uniform(0, np.pi, n))
    disorder = make_disorder(seed, float(rng.uniform(0, 0.3)), n) if seed % 3 == 0 else None
    return LatticeSpec(pattern, DiagonalSpectrum(tuple(d)), float(rng.uniform(0, 1)), disorder)


def check_invariants(h, sol, atol=1e-9):
    v = sol.vectors
    n = h.n_sites
    norm = h.frobenius_norm()
    resid = h.matvec(v) - v * sol.values
    assert np.max(np.linalg.norm(resid, axis=0)) <= atol * max(norm, 1)
    assert np.max(np.abs(v.T @ v - np.eye(n))) <= atol
    assert abs(np.sum(sol.values) - h.trace()) <= 1e-10 * max(abs(h.trace()), 1)
    assert np.all(np.diff(sol.values) >= 0)


@pytest.mark.parametrize("seed", range(40))
def test_oracle_equivalence_sample(seed, backend):
    h = assemble(random_spec(seed))
    ours = eigh_tridiagonal(h, backend=backend)
    ref = jacobi_dense(h.to_dense())
    assert np.max(np.abs(ours.values - ref.values)) <= 1e-10
    check_invariants(h, ours)


def test_jacobi_matches_numpy(rng):
    m = rng.normal(size=(31, 31))
    m = m + m.T
    sol = jacobi_dense(m)
    assert np.allclose(sol.values, np.linalg.eigvalsh(m), atol=1e-12)
    assert np.allclose(m @ sol.vectors, sol.vectors * sol.values, atol=1e-11)


def test_jacobi_rejects():
    with pytest.raises(ValueError):
        jacobi_dense(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        jacobi_dense(np.ones((2, 3)))


@pytest.mark.parametrize("n_cells", [2, 151, 501])
def test_invariants_on_grid(n_cells):
    h = assemble(grid_spec(n_cells))
    check_invariants(h, eigh_tridiagonal(h))


def test_backends_agree():
    if len(available_backends()) < 2:
        pytest.skip("compiled extension not built")
    h = assemble(grid_spec(120, 1.5))
    a = eigh_tridiagonal(h, backend="compiled")
    b = eigh_tridiagonal(h, backend="python")
    assert np.max(np.abs(a.values - b.values)) < 1e-12
    assert np.max(np.abs(a.vectors - b.vectors)) < 1e-10


def test_bisection_matches_ql(backend):
    h = assemble(grid_spec(200, 2.0, 0.4))
    ql = eigvalsh_tridiagonal(h, backend=backend)
    bi = eigvalsh_tridiagonal(h, method="bisect", backend=backend)
    assert np.max(np.abs(ql - bi)) < 1e-12
    with pytest.raises(ValueError):
        eigh_tridiagonal(h, method="bisect")
    with pytest.raises(ValueError):
        eigh_tridiagonal(h, method="lanczos", want_vectors=False)


@pytest.mark.parametrize("eps", [0.0, 0.1, 0.3, 0.45])
def test_half_the_states_below_gap(eps, backend):
    n = 151
    h = assemble(grid_spec(n, epsilon=eps))
    assert count_below(h, 1.5, backend=backend) == n
    assert eigvalsh_tridiagonal(h).size == 2 * n


def test_gershgorin_encloses():
    h = assemble(grid_spec(60))
    lo, hi = gershgorin_bounds(h)
    vals = eigvalsh_tridiagonal(h)
    assert lo <= vals[0] and vals[-1] <= hi


def test_degenerate_clusters_orthonormal():
    # eps = 0 makes every eigenvalue N-fold degenerate
    h = assemble(grid_spec(40, epsilon=0.0))
    sol = eigh_tridiagonal(h)
    assert np.allclose(sol.vectors.T @ sol.vectors, np.eye(80), atol=1e-12)


def test_sign_convention():
    sol = eigh_tridiagonal(assemble(grid_spec(80)))
    v = sol.vectors
    idx = np.argmax(np.abs(v) >= (1 - 1e-8) * np.abs(v).max(axis=0), axis=0)
    assert np.all(v[idx, np.arange(v.shape[1])] > 0)


def test_nonconvergence_raises(backend):
    h = assemble(grid_spec(30))
    import iplab.eigen as eigen
    old = eigen.MAX_ITER
    eigen.MAX_ITER = 0
    try:
        with pytest.raises(ConvergenceError):
            eigh_tridiagonal(h, backend=backend)
    finally:
        eigen.MAX_ITER = old


def test_input_validation():
    with pytest.raises(ValueError):
        eigh_tridiagonal((np.ones(3), np.ones(3)))
    with pytest.raises(ValueError):
        eigh_tridiagonal((np.ones(3), np.ones(2)), backend="fortran")
    one = eigh_tridiagonal((np.array([2.5]), np.array([])))
    assert one.values.tolist() == [2.5] and one.vectors.tolist() == [[1.0]]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=2, max_size=25),
       st.data())
def test_random_tridiagonal_against_numpy(diag, data):
    n = len(diag)
    off = data.draw(st.lists(st.floats(-3, 3, allow_nan=False), min_size=n - 1,
                             max_size=n - 1))
    d, e = np.array(diag), np.array(off)
    dense = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    ref = np.linalg.eigvalsh(dense)
    sol = eigh_tridiagonal((d, e))
    assert np.allclose(sol.values, ref, atol=1e-11)
    assert np.allclose(dense @ sol.vectors, sol.vectors * sol.values, atol=1e-10)
    assert count_below((d, e), 0.0) == int(np.sum(ref < 0)) or np.min(np.abs(ref)) < 1e-12


@pytest.mark.parametrize("setup,env", [
    ("sys.modules['iplab._kernels'] = None", {}),
    ("", {"IPLAB_BACKEND": "python"}),
])
def test_python_fallback_selected(setup, env):
    import os
    code = ("import sys; " + setup + "\nimport iplab.eigen as e\n"
            "from iplab.lattice import assemble, grid_spec\n"
            "print(e.DEFAULT_BACKEND, e.eigvalsh_tridiagonal(assemble(grid_spec(5)))[0])")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         check=True, env={**os.environ, **env}).stdout.split()
    assert out[0] == "python"
    assert float(out[1]) == pytest.approx(eigvalsh_tridiagonal(assemble(grid_spec(5)))[0])
