"""Compare the compiled and numpy kernel backends, and a full script replay on each.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import os
import statistics
import subprocess
import sys
import time

import numpy as np

from dynq import kernels
from dynq.reach import PrimeBasis

INF = kernels.INF


def timed(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times) * 1e3


def distance_table(n):
    D = np.full((n, n), INF, dtype=np.int32)
    np.fill_diagonal(D, 0)
    for u in range(n - 1):
        D[u, u + 1] = D[u + 1, u] = 1
    return D


def cases(rng):
    n = 512
    D = distance_table(n)
    src = rng.integers(0, n, 16)
    dst = rng.integers(0, n, 16)
    basis = PrimeBasis.for_domain(64)
    p = basis.primes
    A = rng.integers(0, p[:, None, None], size=(len(p), 64, 64))
    x = rng.integers(0, 1 << 40, size=(len(p), 64, 64)).astype(np.float64)
    return {
        "minplus_relax n=512 k=16": lambda b: b.minplus_relax(D, src, dst, D.copy()),
        "drop_through n=512 k=16": lambda b: b.drop_through(D, src, dst, D.copy()),
        f"gauss_jordan_mod 64x64 x{len(p)} primes": lambda b: b.gauss_jordan_mod(A, p),
        f"reduce_mod 64x64 x{len(p)} primes": lambda b: b.reduce_mod(x, p),
    }


def replay(pure):
    """Wall time of a fixed reachability and distance replay in a fresh interpreter."""
    env = dict(os.environ)
    if pure:
        env["DYNQ_PURE_PYTHON"] = "1"
    else:
        env.pop("DYNQ_PURE_PYTHON", None)
    code = (
        "import time\n"
        "from dynq.gen import generate\n"
        "from dynq.session import Session\n"
        "s1 = generate('digraph', 64, 15, seed=7)\n"
        "s2 = generate('ugraph', 256, 10, seed=7)\n"
        "t0 = time.perf_counter()\n"
        "Session(s1).run(); Session(s2).run()\n"
        "print(time.perf_counter() - t0)\n"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, check=True, capture_output=True, text=True)
    return float(out.stdout) * 1e3


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = kernels.backends()
    names = sorted(backends)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<40}" + "".join(f"{n + ' ms':>14}" for n in names) + f"{'speedup':>10}")
    for label, fn in cases(rng).items():
        ms = {n: timed(lambda: fn(backends[n]), args.repeat) for n in names}
        ratio = ms["python"] / ms["cython"] if "cython" in ms else float("nan")
        print(f"{label:<40}" + "".join(f"{ms[n]:>14.2f}" for n in names) + f"{ratio:>10.1f}")
    py = replay(pure=True)
    line = f"{'script replay (digraph 64, ugraph 256)':<40}{py:>14.1f}"
    if "cython" in backends:
        cy = replay(pure=False)
        line = f"{'script replay (digraph 64, ugraph 256)':<40}{cy:>14.1f}{py:>14.1f}{py / cy:>10.1f}"
    print(line)


if __name__ == "__main__":
    main()
