import numpy as np
import pytest

from iplab.eigen import available_backends
from iplab.experiments import evaluate, fig2_spec
from iplab.lattice import assemble


@pytest.fixture(scope="session")
def fig2():
    """(spec, hamiltonian, solution, summary) for N_s = 302, L_f = 1, eps = 0.3."""
    spec = fig2_spec()
    solution, summary = evaluate(spec)
    return spec, assemble(spec), solution, summary


@pytest.fixture(params=available_backends())
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    lines = [test_acceptance.RESULTS[k] for k in sorted(test_acceptance.RESULTS)]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
