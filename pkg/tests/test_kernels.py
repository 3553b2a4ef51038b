import numpy as np
import pytest

from hardlearn import _pykernels, kernels


def negacyclic_reference(a, b, q):
    d = len(a)
    out = [0] * d
    for i in range(d):
        for j in range(d):
            if i + j < d:
                out[i + j] += int(a[i]) * int(b[j])
            else:
                out[i + j - d] -= int(a[i]) * int(b[j])
    return [c % q for c in out]


def _residues(rng, q, d):
    return [int(v) for v in rng.integers(0, min(q, 1 << 62), size=d)] if q <= 1 << 62 else \
        [int.from_bytes(rng.bytes(16), "little") % q for _ in range(d)]


@pytest.mark.parametrize("q", [2, 257, 1 << 16, (1 << 61) - 1, (1 << 63) + 29, (1 << 64) - 59, 1 << 64, 3 ** 50])
@pytest.mark.parametrize("d", [1, 2, 8, 32])
def test_negacyclic_mul_matches_reference(backend, d, q):
    rng = np.random.default_rng(d * 7 + q % 1000)
    for _ in range(5):
        a, b = _residues(rng, q, d), _residues(rng, q, d)
        dtype = np.uint64 if q < 1 << 64 else object
        got = kernels.negacyclic_mul(np.array(a, dtype=dtype), np.array(b, dtype=dtype), q, backend=backend)
        assert [int(v) for v in got] == negacyclic_reference(a, b, q)


def test_x_times_x_pow_d_minus_1_is_minus_one(backend):
    d, q = 16, 97
    x = np.zeros(d, dtype=np.uint64)
    x[1] = 1
    y = np.zeros(d, dtype=np.uint64)
    y[d - 1] = 1
    got = kernels.negacyclic_mul(x, y, q, backend=backend)
    assert int(got[0]) == q - 1 and not np.any(got[1:])


@pytest.mark.parametrize("k", [0, 1, 5, 12])
def test_fwht_matches_matrix(backend, k):
    rng = np.random.default_rng(k)
    v = rng.integers(-5, 6, size=1 << k)
    n = 1 << k
    H = np.array([[(-1) ** bin(i & j).count("1") for j in range(n)] for i in range(n)]) if k <= 8 else None
    got = kernels.fwht(v, backend=backend)
    assert np.array_equal(kernels.fwht(got, backend=backend), v * n)
    if H is not None:
        assert np.array_equal(got, H @ v)


def test_fwht_does_not_mutate_input(backend):
    v = np.arange(8, dtype=np.int64)
    kernels.fwht(v, backend=backend)
    assert np.array_equal(v, np.arange(8))


@pytest.mark.parametrize("q,p", [(1 << 10, 4), (1 << 20, 2), (1 << 16, 1 << 16)])
def test_prf_table_matches_direct_evaluation(backend, q, p):
    from hardlearn.prf import PrfParams, prf_eval_bit, prf_keygen

    params = PrfParams(8, q, p, 6)
    key = prf_keygen(params, np.random.default_rng(q + p))
    bits = kernels.prf_table_bits(key.a.coeffs, [s.coeffs for s in key.s], q, p, backend=backend)
    assert [int(b) for b in bits] == [prf_eval_bit(key, x) for x in range(1 << 6)]


def test_backends_agree_on_prf_table():
    if kernels.BACKEND != "compiled":
        pytest.skip("compiled kernels not built")
    from hardlearn.prf import PrfParams, prf_keygen

    key = prf_keygen(PrfParams(16, 1 << 30, 8, 12), np.random.default_rng(0))
    args = (key.a.coeffs, [s.coeffs for s in key.s], 1 << 30, 8)
    assert np.array_equal(kernels.prf_table_bits(*args, backend="python"),
                          kernels.prf_table_bits(*args, backend="compiled"))


def test_pure_module_has_same_entry_points():
    for name in ("negacyclic_mul", "fwht_inplace", "prf_table_bits"):
        assert callable(getattr(_pykernels, name))


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        kernels.fwht(np.zeros(4, dtype=np.int64), backend="gpu")


def test_pure_fallback_selected_by_environment():
    import os
    import subprocess
    import sys

    env = {**os.environ, "HARDLEARN_PURE": "1"}
    out = subprocess.run([sys.executable, "-c", "import hardlearn; print(hardlearn.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_benchmark_smoke():
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    bench = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(bench)
    rows = bench.main(["--quick", "--repeat", "1"])
    assert rows and all(t["python"] > 0 for _, t in rows)
