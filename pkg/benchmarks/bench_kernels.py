"""Compiled vs. pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from hardlearn import kernels
from hardlearn.prf import PrfParams, prf_keygen
from hardlearn.sampling import GaussianParams


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(quick):
    rng = np.random.default_rng(0)
    for d, q in ((64, 1 << 16), (256, (1 << 61) - 1), (1024, 12289)):
        if quick and d > 64:
            continue
        a = rng.integers(0, q, size=d, dtype=np.uint64)
        b = rng.integers(0, q, size=d, dtype=np.uint64)
        yield f"negacyclic_mul d={d} q~2^{q.bit_length()}", lambda be, a=a, b=b, q=q: kernels.negacyclic_mul(a, b, q, backend=be)
    k = 12 if quick else 20
    v = rng.integers(-1, 2, size=1 << k)
    yield f"fwht k={k}", lambda be: kernels.fwht(v, backend=be)
    k = 10 if quick else 16
    key = prf_keygen(PrfParams(8, 1 << 20, 4, k, GaussianParams(3.0)), rng)
    s = [e.coeffs for e in key.s]
    yield f"prf_table d=8 k={k}", lambda be: kernels.prf_table_bits(key.a.coeffs, s, 1 << 20, 4, backend=be)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--quick", action="store_true", help="small sizes (smoke run)")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = ["python"] + (["compiled"] if kernels.BACKEND == "compiled" else [])
    print(f"{'kernel':<34}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}")
    rows = []
    for name, fn in cases(args.quick):
        t = {be: best_of(lambda: fn(be), args.repeat) for be in backends}
        speedup = t["python"] / t["compiled"] if "compiled" in t else float("nan")
        print(f"{name:<34}" + "".join(f"{t[b] * 1e3:>12.3f}ms" for b in backends) + f"{speedup:>9.1f}x")
        rows.append((name, t))
    return rows


if __name__ == "__main__":
    main()
