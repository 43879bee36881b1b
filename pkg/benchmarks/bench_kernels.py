"""Time the numpy and numba kernel backends side by side.

    python3 benchmarks/bench_kernels.py [--n 64 128] [--repeat 5]

Each kernel is called once before timing so numba compilation is excluded.
The reported figure is the best of ``--repeat`` runs.
"""

import argparse
import timeit

import numpy as np

from metatfr._kernels import NUMBA_KERNELS, NUMPY_KERNELS


def _inputs(N, rng):
    delta = 1.0 / np.sqrt(N)
    f1 = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    f2 = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    rows = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    points = rng.uniform(-0.5, 0.5, (N, N)) * N * delta
    fh = rng.standard_normal(2 * N) + 1j * rng.standard_normal(2 * N)
    gh = rng.standard_normal(2 * N) + 1j * rng.standard_normal(2 * N)
    P1, K1, Q1 = np.array([[0.3]]), np.array([[1.1]]), np.array([[-0.2]])
    P2 = np.array([[0.3, 0.1], [0.1, -0.2]])
    K2 = np.array([[1.0, 0.2], [-0.1, 0.9]])
    Q2 = np.array([[0.1, 0.0], [0.0, 0.4]])
    return {
        "eval_rows": lambda k: k.eval_rows(rows, points, delta),
        "wigner_direct": lambda k: k.wigner_direct(fh, gh, delta),
        "collins (D=1)": lambda k: k.collins(f1, P1, K1, Q1, delta),
        "collins (D=2)": lambda k: k.collins(f2, P2, K2, Q2, delta),
    }


def best_time(fn, repeat):
    fn()
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, nargs="+", default=[64, 128])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = [NUMPY_KERNELS] + ([NUMBA_KERNELS] if NUMBA_KERNELS is not None else [])
    if NUMBA_KERNELS is None:
        print("numba not installed; timing the numpy backend only")
    header = f"{'kernel':<16}{'N':>6}" + "".join(f"{k.name + ' [ms]':>14}" for k in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    rng = np.random.default_rng(0)
    for N in args.n:
        for name, call in _inputs(N, rng).items():
            times = [best_time(lambda k=k: call(k), args.repeat) for k in backends]
            line = f"{name:<16}{N:>6}" + "".join(f"{1e3 * t:>14.2f}" for t in times)
            if len(times) == 2:
                line += f"{times[0] / times[1]:>10.1f}x"
            print(line)


if __name__ == "__main__":
    main()
