"""Pure-Python/numpy twins of the compiled kernels.

Selected automatically when the extension is missing or when
``HARDLEARN_PURE=1`` is set. Results are bit-identical to ``_ckernels``.
"""

import numpy as np

# low bits handled by the vectorised level build in prf_table_bits
_LOW_BITS = 16


def _slot_bytes(d, q):
    width = 2 * (q - 1).bit_length() + max(d, 1).bit_length() + 1
    return (width + 7) // 8


def _pack(coeffs, nbytes):
    if isinstance(coeffs, np.ndarray) and coeffs.dtype == np.uint64 and nbytes >= 8:
        buf = np.zeros((len(coeffs), nbytes), dtype=np.uint8)
        buf[:, :8] = coeffs.astype("<u8").view(np.uint8).reshape(-1, 8)
        return int.from_bytes(buf.tobytes(), "little")
    return int.from_bytes(b"".join(int(c).to_bytes(nbytes, "little") for c in coeffs), "little")


def negacyclic_mul(a, b, q):
    """Negacyclic product by Kronecker substitution on Python integers.

    Both operands are packed into one big integer with slots wide enough
    that no carry crosses a slot, multiplied once, and unpacked.
    """
    d = len(a)
    if len(b) != d:
        raise ValueError("length mismatch")
    nbytes = _slot_bytes(d, q)
    prod = _pack(a, nbytes) * _pack(b, nbytes)
    raw = prod.to_bytes(2 * d * nbytes, "little")
    slots = [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") for i in range(2 * d)]
    out = [(slots[i] - slots[i + d]) % q for i in range(d)]
    if q < 1 << 64:
        return np.array(out, dtype=np.uint64)
    return np.array(out, dtype=object)


def fwht_inplace(v):
    """Unscaled Walsh-Hadamard transform, in place. Length must be 2**k."""
    n = v.shape[0]
    h = 1
    while h < n:
        blocks = v.reshape(-1, 2, h)
        x = blocks[:, 0, :].copy()
        blocks[:, 0, :] += blocks[:, 1, :]
        blocks[:, 1, :] = x - blocks[:, 1, :]
        h *= 2


def _negacyclic_matrix(s, q):
    # row i holds the coefficients of X^i * s
    d = len(s)
    s = [int(c) for c in s]
    m = [[0] * d for _ in range(d)]
    for i in range(d):
        for j in range(d):
            k = i + j
            if k < d:
                m[i][k] = s[j]
            else:
                m[i][k - d] = (-s[j]) % q
    return m


def batch_mul_fixed(x, s, q):
    """Multiply every row of ``x`` (shape (N, d)) by the ring element ``s``."""
    m = _negacyclic_matrix(s, q)
    if q & (q - 1) == 0 and q < 1 << 64:
        # wrapping uint64 arithmetic is exact modulo any power of two below 2**64
        prod = x.astype(np.uint64) @ np.array(m, dtype=np.uint64)
        return prod & np.uint64(q - 1)
    if q <= 1 << 31:
        xi = x.astype(np.int64)
        mi = np.array(m, dtype=np.int64)
        xh, xl = xi >> 16, xi & 0xFFFF
        mh, ml = mi >> 16, mi & 0xFFFF
        hi = (xh @ mh) % q
        mid = (xh @ ml + xl @ mh) % q
        lo = (xl @ ml) % q
        out = (hi * ((1 << 32) % q) % q + (mid << 16) % q + lo) % q
        return out.astype(np.uint64)
    out = np.array(x, dtype=object) @ np.array(m, dtype=object)
    out = np.array([[int(c) % q for c in row] for row in out], dtype=object)
    return out.astype(np.uint64) if q < 1 << 64 else out


def prf_table_bits(a, s, q, p, shift):
    """Bits msb(round(a * prod s_i^{x_i})) for every x in [0, 2**k)."""
    k = len(s)
    low = min(k, _LOW_BITS)
    high = k - low
    half = p >> 1
    bits = np.empty(1 << k, dtype=np.uint8)
    dtype = np.uint64 if q < 1 << 64 else object
    for prefix in range(1 << high):
        base = np.array(a, dtype=dtype)
        for i in range(low, k):
            if (prefix >> (i - low)) & 1:
                base = negacyclic_mul(base, s[i], q)
        level = base.reshape(1, -1)
        for i in range(low):
            level = np.concatenate([level, batch_mul_fixed(level, s[i], q)])
        c0 = level[:, 0]
        if shift:
            if dtype is object:
                r = np.array([(((int(c) >> (shift - 1)) + 1) >> 1) % p for c in c0], dtype=object)
            else:
                r = (((c0 >> np.uint64(shift - 1)) + np.uint64(1)) >> np.uint64(1)) & np.uint64(p - 1)
        else:
            r = c0
        bits[prefix << low:(prefix + 1) << low] = np.asarray(r >= half, dtype=np.uint8)
    return bits
