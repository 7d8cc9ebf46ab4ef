"""``iplab`` command-line entry point.

Exit status: 0 success, 2 usage error, 3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import sys

import numpy as np

from .config import UsageError, parse_config
from .eigen import eigh_tridiagonal
from .errors import ConvergenceError, InsufficientDataError, NoMinimumError
from .experiments import (SweepSpec, disorder_robustness, evaluate, run_sweep,
                          scaling_table, size_scaling)
from .figures import reproduce_figure
from .lattice import assemble, grid_spec
from .observables import (dos_histogram, eigenstate_map, level_spacings, split_bands,
                          state_profile)
from .results import (DISORDER_HEADER, DOS_HEADER, EIGENVALUES_HEADER, MAP_HEADER,
                      SCALING_HEADER, SPACING_HEADER, STATES_HEADER, SWEEP_HEADER,
                      VARIATIONAL_HEADER, Dataset, ResultsIOError, dos_rows,
                      eigenvalue_rows, map_rows, scaling_fit_text, spacing_rows,
                      state_rows, sweep_rows, write_results)
from .variational import (AnsatzParams, analytic_fwhm_sites, energy_curve,
                          exact_expectation, minimize_alpha)

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


def _lattice(p):
    return grid_spec(p["n_cells"], p["lf"], p["eps"], (p["d1"], p["d2"]))


def cmd_spectrum(p):
    spec = _lattice(p)
    values = eigh_tridiagonal(assemble(spec), want_vectors=False).values
    sizes, gap = split_bands(values)
    ds = Dataset()
    ds.add("eigenvalues.csv", EIGENVALUES_HEADER, eigenvalue_rows(values, sizes))
    ds.add("spacing.csv", SPACING_HEADER, spacing_rows(level_spacings(values, sizes)))
    ds.add("dos.csv", DOS_HEADER, dos_rows(*dos_histogram(values, p["bins"])))
    ds.metadata.update(n_sites=spec.n_sites, band_sizes=list(sizes), band_gap=gap)
    print(f"N_s={spec.n_sites} bands={list(sizes)} gap={gap:.6g}")
    return ds, True


def _states(p, with_map):
    spec = _lattice(p)
    solution, summary = evaluate(spec)
    ds = Dataset()
    ds.add("states.csv", STATES_HEADER, state_rows(summary.states))
    if with_map:
        ds.add("eigenvalues.csv", EIGENVALUES_HEADER,
               eigenvalue_rows(solution.values, summary.band_sizes))
        ds.add("map.csv", MAP_HEADER, map_rows(eigenstate_map(solution, "all")))
    means = {d: summary.mean_ipr(d) for d in "ABC"}
    ds.metadata.update(n_sites=spec.n_sites, band_sizes=list(summary.band_sizes),
                       band_gap=summary.band_gap,
                       fraction_delocalized=summary.fraction_delocalized,
                       fldc_edges=[list(e) for e in summary.fldc_edges],
                       mean_ipr=means)
    print(f"N_s={spec.n_sites} fraction_delocalized={summary.fraction_delocalized:.4f} "
          + " ".join(f"mean_ipr_{d}={v:.4g}" for d, v in means.items()))
    return ds, True


def cmd_variational(p):
    n, eps, d1, d2 = p["n_cells"], p["eps"], p["d1"], p["d2"]
    alpha0, e_min = minimize_alpha(n, eps, d1, d2)
    h = assemble(_lattice(p))
    solution = eigh_tridiagonal(h)
    alphas = np.unique(np.append(np.logspace(-4, -1, 61), alpha0))
    ds = Dataset()
    ds.add("variational.csv", VARIATIONAL_HEADER, energy_curve(n, eps, d1, d2, alphas, h))
    params = AnsatzParams.centered(alpha0, n, eps, d1, d2)
    ds.metadata.update(
        alpha0=alpha0, e_min=e_min, e_exact_expectation=exact_expectation(params, h),
        ground_energy=float(solution.values[0]),
        relative_error=abs(e_min - solution.values[0]) / abs(solution.values[0]),
        fwhm_analytic_sites=analytic_fwhm_sites(alpha0),
        fwhm_numerical_sites=state_profile(solution.vector(0)).fwhm_sites,
    )
    print(f"alpha0={alpha0:.6g} E_min={e_min:.8f} E_ground={solution.values[0]:.8f}")
    return ds, True


def _sweep_spec(p):
    base = _lattice(p)
    return SweepSpec(p["axis"], p["points"], base, p["seed"], p["replicas"])


def cmd_sweep(p):
    spec = _sweep_spec(p)
    rows = run_sweep(spec)
    ds = Dataset()
    ds.add("sweep.csv", SWEEP_HEADER, sweep_rows(rows))
    errors = [f"{r.point}/{r.replica}: {r.error}" for r in rows if r.error]
    ds.metadata.update(axis=spec.axis, seed=spec.seed, replicas=spec.replicas,
                       n_sites=spec.base.n_sites, errors=errors)
    for r in rows:
        print(f"{spec.axis}={r.point:g} replica={r.replica} "
              f"fraction_delocalized={r.fraction_delocalized:.4f}")
    return ds, not errors


def cmd_scaling(p):
    base = _lattice(p)
    table = scaling_table(base, p["sizes"])
    fit = size_scaling(base, p["sizes"], p["target"], table=table)
    ds = Dataset()
    ds.add("scaling.csv", SCALING_HEADER, table[p["target"]])
    ds.texts["scaling_fit.txt"] = scaling_fit_text(fit)
    ds.metadata.update(target=p["target"], sizes=list(p["sizes"]))
    print(f"{p['target']}: exponent={fit.exponent:.4f} r2={fit.r_squared:.5f}")
    return ds, True


def cmd_disorder(p):
    base = _lattice(p)
    stats, rows = disorder_robustness(base, p["strength"], p["replicas"], p["seed"])
    ds = Dataset()
    ds.add("sweep.csv", SWEEP_HEADER, sweep_rows(rows))
    ds.add("disorder.csv", DISORDER_HEADER,
           [(s.strength, s.mean_fraction, s.std_fraction, s.replicas) for s in stats])
    errors = [f"{r.point}/{r.replica}: {r.error}" for r in rows if r.error]
    ds.metadata.update(seed=p["seed"], replicas=p["replicas"], errors=errors)
    for s in stats:
        print(f"p={s.strength:g} fraction_delocalized={s.mean_fraction:.4f} ± {s.std_fraction:.4f}")
    return ds, not errors


COMMANDS = {
    "spectrum": cmd_spectrum,
    "states": lambda p: _states(p, with_map=True),
    "ipr": lambda p: _states(p, with_map=False),
    "variational": cmd_variational,
    "sweep": cmd_sweep,
    "scaling": cmd_scaling,
    "disorder": cmd_disorder,
}


def run(config) -> int:
    p = config.params
    if config.command == "figure":
        reproduce_figure(p["which"], p["out_dir"], config.as_dict())
        print(f"{p['which']} written to {p['out_dir']}")
        return EXIT_OK
    ds, ok = COMMANDS[config.command](p)
    write_results(ds, p["out_dir"], config.as_dict())
    return EXIT_OK if ok else EXIT_NUMERICAL


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_config(argv)
    except UsageError as exc:
        print(f"iplab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run(config)
    except (ConvergenceError, NoMinimumError, InsufficientDataError) as exc:
        print(f"iplab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ResultsIOError, OSError) as exc:
        print(f"iplab: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
