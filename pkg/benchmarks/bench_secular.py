"""Time the secular-equation backends against the dense eigensolver.

Usage: python3 benchmarks/bench_secular.py [n ...]
"""
import sys
import timeit

import numpy as np

from oscequil import kernels
from oscequil.bath import discretize
from oscequil.modes import eig_oracle, solve_modes
from oscequil.spectral import OhmicSpectrum, SystemParams


def best_of(fn, repeat=3):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(sizes):
    sys_ = SystemParams(1.0, 2.0)
    spec = OhmicSpectrum(0.2, 20.0)
    backends = kernels.available_backends()
    print(f"{'n':>6} " + " ".join(f"{b:>10}" for b in backends) + f" {'eigh':>10}  max rel diff")
    for n in sizes:
        bath = discretize(spec, n)
        times, roots = [], []
        for b in backends:
            times.append(best_of(lambda: solve_modes(sys_, bath, backend=b)))
            roots.append(solve_modes(sys_, bath, backend=b))
        t_eig = best_of(lambda: eig_oracle(sys_, bath))
        diff = max(np.max(np.abs(r - roots[0]) / roots[0]) for r in roots)
        print(f"{n:>6} " + " ".join(f"{t:>9.4f}s" for t in times) + f" {t_eig:>9.4f}s  {diff:.1e}")


if __name__ == "__main__":
    main([int(a) for a in sys.argv[1:]] or [300, 1200, 2000])
