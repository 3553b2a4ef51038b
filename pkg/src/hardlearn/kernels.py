"""Backend selection for the hot loops.

The compiled extension is used when it imports and the modulus fits in 64
bits; ``HARDLEARN_PURE=1`` forces the numpy/Python fallback everywhere.
"""

import os

import numpy as np

from hardlearn import _pykernels

try:
    if os.environ.get("HARDLEARN_PURE", "") not in ("", "0"):
        raise ImportError("pure backend requested")
    from hardlearn import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "compiled" if _ckernels is not None else "python"
FAST_MAX_BITS = 64


def _use_compiled(backend, q=None) -> bool:
    """Resolve a backend request; wide moduli always take the fallback."""
    if backend not in (None, "python", "compiled"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "compiled" and _ckernels is None:
        raise ImportError("compiled kernels are not available")
    fits = q is None or q.bit_length() <= FAST_MAX_BITS
    return backend != "python" and _ckernels is not None and fits


def negacyclic_mul(a, b, q, backend=None):
    """Negacyclic product of two coefficient arrays modulo ``q``."""
    if _use_compiled(backend, q):
        return _ckernels.negacyclic_mul(
            np.ascontiguousarray(a, dtype=np.uint64), np.ascontiguousarray(b, dtype=np.uint64), q
        )
    return _pykernels.negacyclic_mul(a, b, q)


def fwht(values, backend=None):
    """Return the unscaled Walsh-Hadamard transform of an integer vector."""
    v = np.array(values, dtype=np.int64)
    n = v.shape[0]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    if _use_compiled(backend):
        _ckernels.fwht_inplace(v)
    else:
        _pykernels.fwht_inplace(v)
    return v


def prf_table_bits(a, s, q, p, backend=None):
    """One-bit PRF outputs for all 2**k inputs, indexed by the input integer."""
    shift = (q // p).bit_length() - 1
    if _use_compiled(backend, q) and len(s) >= 1:
        return _ckernels.prf_table_bits(
            np.ascontiguousarray(a, dtype=np.uint64),
            np.ascontiguousarray(np.array(s, dtype=np.uint64).reshape(len(s), -1)),
            q, p, shift,
        )
    return _pykernels.prf_table_bits(a, s, q, p, shift)
