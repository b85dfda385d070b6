"""Time each spin kernel under the numba and numpy backends.

    python benchmarks/bench_kernels.py [--sites 10] [--repeat 5]

Results are checked for agreement before timings are reported.
"""

import argparse
import time

import numpy as np

from photospin import kernels
from photospin.spin import SpinSystem


def ring(n):
    return SpinSystem(n, tuple((i, i % n + 1, 1.0) for i in range(1, n + 1)) + tuple((i, i + 2, 0.5) for i in range(1, n - 1)))


def cases(n):
    system = ring(n)
    edges = system.shift_edges()
    basis = kernels.sector_basis(n, n // 2)
    vec = np.random.default_rng(0).normal(size=1 << n).astype(complex)
    half = n // 2
    return {
        "dense": lambda: kernels.heisenberg_dense(n, edges),
        "sector": lambda: kernels.heisenberg_sector(n, edges, basis),
        "apply": lambda: kernels.heisenberg_apply(n, edges, vec),
        "singlets": lambda: kernels.singlet_product(n, np.arange(half) * 2 + 1, np.arange(half) * 2),
    }


def best_of(fn, repeat):
    fn()  # warm-up (includes compilation for numba)
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sites", type=int, default=10)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    results = {}
    for backend in ("numba", "numpy"):
        previous = kernels.set_backend(backend)
        try:
            for name, fn in cases(args.sites).items():
                results[name, backend] = (best_of(fn, args.repeat), fn())
        finally:
            kernels.set_backend(previous)

    print(f"{'kernel':<10}{'numba [ms]':>12}{'numpy [ms]':>12}{'speed-up':>10}")
    for name in cases(args.sites):
        (t_nb, a), (t_np, b) = results[name, "numba"], results[name, "numpy"]
        if not np.allclose(a, b, atol=1e-12):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<10}{1e3 * t_nb:>12.3f}{1e3 * t_np:>12.3f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
