# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: negacyclic products, Walsh-Hadamard butterflies and
the PRF truth-table walk. Every routine has a pure-Python twin in
``_pykernels`` that must return identical results."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint8_t

cnp.import_array()

cdef extern from *:
    """
    typedef unsigned __int128 hl_u128;
    """
    ctypedef unsigned long long hl_u128


cdef struct Modulus:
    uint64_t q
    uint64_t mask        # q - 1 when q is a power of two, else 0
    Py_ssize_t batch     # products a 128-bit accumulator absorbs between reductions
    Py_ssize_t batch64   # same for a 64-bit accumulator; 0 when q >= 2^32


cdef Modulus _modulus(uint64_t q, Py_ssize_t d):
    cdef Modulus m
    m.q = q
    m.mask = q - 1 if (q & (q - 1)) == 0 else 0
    # acc < q before a batch, each product <= (q-1)^2, the sum must stay below 2^128
    cdef object qq = int(q)  # Python ints: (q-1)^2 overflows 64 bits
    cdef object room = ((1 << 128) - 1 - qq) // max(1, (qq - 1) * (qq - 1))
    m.batch = <Py_ssize_t>min(max(1, room), max(1, d))
    room = ((1 << 64) - 1 - qq) // max(1, (qq - 1) * (qq - 1))
    m.batch64 = <Py_ssize_t>min(room, max(1, d)) if qq < (1 << 32) else 0
    return m


cdef inline uint64_t _submod(uint64_t a, uint64_t b, uint64_t q) noexcept nogil:
    if a >= b:
        return a - b
    return a + (q - b)


cdef inline uint64_t _coeff(const uint64_t* a, const uint64_t* b, Py_ssize_t d,
                            Py_ssize_t k, Modulus m) noexcept nogil:
    # coefficient k of a*b mod X^d + 1:
    #   sum_{i<=k} a_i b_{k-i} - sum_{i>k} a_i b_{d+k-i}
    cdef Py_ssize_t i, n
    cdef uint64_t w, p64, n64
    cdef hl_u128 pos, neg
    if m.mask:
        # power-of-two modulus: wrapping 64-bit arithmetic is exact mod q
        w = 0
        for i in range(k + 1):
            w += a[i] * b[k - i]
        for i in range(k + 1, d):
            w -= a[i] * b[d + k - i]
        return w & m.mask
    if m.batch64:
        p64 = 0
        n = 0
        for i in range(k + 1):
            p64 += a[i] * b[k - i]
            n += 1
            if n == m.batch64:
                p64 %= m.q
                n = 0
        n64 = 0
        n = 0
        for i in range(k + 1, d):
            n64 += a[i] * b[d + k - i]
            n += 1
            if n == m.batch64:
                n64 %= m.q
                n = 0
        return _submod(p64 % m.q, n64 % m.q, m.q)
    pos = 0
    n = 0
    for i in range(k + 1):
        pos += <hl_u128>a[i] * b[k - i]
        n += 1
        if n == m.batch:
            pos %= m.q
            n = 0
    neg = 0
    n = 0
    for i in range(k + 1, d):
        neg += <hl_u128>a[i] * b[d + k - i]
        n += 1
        if n == m.batch:
            neg %= m.q
            n = 0
    return _submod(<uint64_t>(pos % m.q), <uint64_t>(neg % m.q), m.q)


cdef void _negamul(const uint64_t* a, const uint64_t* b, uint64_t* out,
                   Py_ssize_t d, Modulus m) noexcept nogil:
    cdef Py_ssize_t k
    for k in range(d):
        out[k] = _coeff(a, b, d, k, m)


def negacyclic_mul(const uint64_t[::1] a, const uint64_t[::1] b, uint64_t q):
    cdef Py_ssize_t d = a.shape[0]
    if b.shape[0] != d:
        raise ValueError("length mismatch")
    out = np.empty(d, dtype=np.uint64)
    cdef uint64_t[::1] o = out
    cdef Modulus m = _modulus(q, d)
    if d:
        with nogil:
            _negamul(&a[0], &b[0], &o[0], d, m)
    return out


def fwht_inplace(int64_t[::1] v):
    """Unscaled Walsh-Hadamard transform, in place. Length must be 2**k."""
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t h = 1, i, j
    cdef int64_t x, y
    with nogil:
        while h < n:
            i = 0
            while i < n:
                for j in range(i, i + h):
                    x = v[j]
                    y = v[j + h]
                    v[j] = x + y
                    v[j + h] = x - y
                i += 2 * h
            h *= 2


cdef inline uint8_t _msb_round(uint64_t c, int shift, uint64_t p) nogil:
    # round-half-up of c from Z_q to Z_p, then c0 >= p/2
    cdef uint64_t r
    if shift == 0:
        r = c
    else:
        r = (((c >> (shift - 1)) + 1) >> 1) & (p - 1)
    return 1 if r >= (p >> 1) else 0


cdef void _walk(const uint64_t* s, uint64_t* stack, Py_ssize_t level,
                Py_ssize_t d, Modulus m, int shift, uint64_t p,
                uint64_t prefix, uint8_t* bits) noexcept nogil:
    # stack row `level` holds a * prod of the selected s_i for bits >= level
    cdef uint64_t* cur = stack + level * d
    cdef uint64_t* nxt
    cdef Py_ssize_t i = level - 1
    cdef uint64_t bit = (<uint64_t>1) << i
    cdef Py_ssize_t j
    if i == 0:
        bits[prefix] = _msb_round(cur[0], shift, p)
        bits[prefix | 1] = _msb_round(_coeff(cur, s, d, 0, m), shift, p)
        return
    nxt = stack + (level - 1) * d
    for j in range(d):
        nxt[j] = cur[j]
    _walk(s, stack, level - 1, d, m, shift, p, prefix, bits)
    _negamul(cur, s + i * d, nxt, d, m)
    _walk(s, stack, level - 1, d, m, shift, p, prefix | bit, bits)


def prf_table_bits(const uint64_t[::1] a, const uint64_t[:, ::1] s,
                   uint64_t q, uint64_t p, int shift):
    """Bits msb(round(a * prod s_i^{x_i})) for every x in [0, 2**k)."""
    cdef Py_ssize_t k = s.shape[0]
    cdef Py_ssize_t d = a.shape[0]
    bits = np.zeros((<Py_ssize_t>1) << k, dtype=np.uint8)
    cdef uint8_t[::1] bv = bits
    stack = np.empty((k + 1) * d, dtype=np.uint64)
    cdef uint64_t[::1] st = stack
    cdef Py_ssize_t j
    cdef Modulus m = _modulus(q, d)
    for j in range(d):
        st[k * d + j] = a[j]
    with nogil:
        _walk(&s[0, 0], &st[0], k, d, m, shift, p, 0, &bv[0])
    return bits
