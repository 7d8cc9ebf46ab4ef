"""Time the compiled and pure-Python tridiagonal kernels on IPL Hamiltonians.

    python benchmarks/bench_eigensolver.py --sizes 102,302,1002 --repeat 3
"""

import argparse
import time

import numpy as np

from iplab.eigen import available_backends, eigh_tridiagonal
from iplab.lattice import assemble, grid_spec


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="102,302,1002",
                    help="comma-separated N_s values (even)")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--python-max", type=int, default=1002,
                    help="skip the Python backend above this N_s")
    args = ap.parse_args(argv)

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'N_s':>6} {'mode':>8} " + " ".join(f"{b:>12}" for b in backends) + "  speedup")
    for n_sites in (int(s) for s in args.sizes.split(",")):
        h = assemble(grid_spec(n_sites // 2))
        for vectors in (False, True):
            row, ref = {}, None
            for b in backends:
                if b == "python" and n_sites > args.python_max:
                    continue
                t, sol = best_of(lambda: eigh_tridiagonal(h, want_vectors=vectors, backend=b),
                                 args.repeat)
                row[b] = t
                if ref is None:
                    ref = sol.values
                else:
                    assert np.max(np.abs(ref - sol.values)) < 1e-10, "backends disagree"
            cells = " ".join(f"{row[b]:>11.4f}s" if b in row else f"{'-':>12}" for b in backends)
            speed = (f"{row['python'] / row['compiled']:8.1f}x"
                     if {"python", "compiled"} <= row.keys() else "")
            print(f"{n_sites:>6} {'vectors' if vectors else 'values':>8} {cells} {speed}")


if __name__ == "__main__":
    main()
