"""Arithmetic in R_q = Z_q[X]/(X^d + 1) for power-of-two d.

Elements are immutable; coefficients are residues in [0, q) stored as a
read-only ``uint64`` array when q < 2**64 and as Python integers otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from hardlearn import kernels
from hardlearn.errors import InvalidParamsError, ParamMismatchError


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True)
class RingParams:
    d: int
    q: int

    def __post_init__(self):
        if not isinstance(self.d, int) or not is_power_of_two(self.d):
            raise InvalidParamsError("d is a power of two", f"d={self.d}")
        if not isinstance(self.q, int) or self.q < 2:
            raise InvalidParamsError("q >= 2", f"q={self.q}")

    @property
    def dtype(self):
        return np.uint64 if self.q < 1 << 64 else object

    @property
    def fast(self) -> bool:
        """True when the compiled 64-bit kernels apply."""
        return self.q.bit_length() <= kernels.FAST_MAX_BITS


def _freeze(coeffs, params):
    arr = np.array(coeffs, dtype=params.dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RingElem:
    params: RingParams
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = self.coeffs
        if not (isinstance(arr, np.ndarray) and arr.dtype == self.params.dtype and not arr.flags.writeable):
            arr = np.array([int(c) for c in arr], dtype=object)
            if arr.shape != (self.params.d,):
                raise InvalidParamsError("len(coeffs) == d", f"got {arr.shape}, d={self.params.d}")
            if any(c < 0 or c >= self.params.q for c in arr):
                raise InvalidParamsError("coefficients lie in [0, q)")
            object.__setattr__(self, "coeffs", _freeze(arr, self.params))
        elif arr.shape != (self.params.d,):
            raise InvalidParamsError("len(coeffs) == d", f"got {arr.shape}, d={self.params.d}")
        elif arr.dtype == np.uint64 and arr.size and int(arr.max()) >= self.params.q:
            raise InvalidParamsError("coefficients lie in [0, q)")

    @classmethod
    def from_coeffs(cls, params: RingParams, coeffs, reduce: bool = False) -> "RingElem":
        if reduce:
            coeffs = [int(c) % params.q for c in coeffs]
        return cls(params, coeffs)

    @classmethod
    def _trusted(cls, params, arr):
        arr.setflags(write=False)
        return cls(params, arr)

    def to_list(self) -> list[int]:
        return [int(c) for c in self.coeffs]

    def centered(self) -> list[int]:
        """Coefficient lifts into (-q/2, q/2]."""
        q = self.params.q
        return [c - q if c > q // 2 else c for c in self.to_list()]

    def __eq__(self, other):
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.params == other.params and self.to_list() == other.to_list()

    def __hash__(self):
        return hash((self.params, tuple(self.to_list())))

    def __add__(self, other):
        return ring_add(self, other)

    def __sub__(self, other):
        return ring_sub(self, other)

    def __neg__(self):
        return ring_neg(self)

    def __mul__(self, other):
        return ring_mul(self, other)

    def __repr__(self):
        return f"RingElem(d={self.params.d}, q={self.params.q}, coeffs={self.to_list()})"


def zero(params: RingParams) -> RingElem:
    return RingElem._trusted(params, np.zeros(params.d, dtype=params.dtype) if params.dtype is not object
                             else np.array([0] * params.d, dtype=object))


def one(params: RingParams) -> RingElem:
    return monomial(params, 0)


def monomial(params: RingParams, power: int, coeff: int = 1) -> RingElem:
    """coeff * X^power, reduced with X^d = -1."""
    d = params.d
    sign = -1 if (power // d) % 2 else 1
    c = [0] * d
    c[power % d] = (sign * coeff) % params.q
    return RingElem(params, c)


def _check(a: RingElem, b: RingElem):
    if a.params != b.params:
        raise ParamMismatchError(f"ring mismatch: {a.params} vs {b.params}")


def ring_add(a: RingElem, b: RingElem) -> RingElem:
    _check(a, b)
    q = a.params.q
    if a.params.dtype is object:
        return RingElem._trusted(a.params, np.array([(x + y) % q for x, y in zip(a.coeffs, b.coeffs)], dtype=object))
    s = a.coeffs + b.coeffs
    # uint64 wraparound: the true sum is s + 2**64, and s - q (wrapped) recovers it
    wrap = (s < a.coeffs) | (s >= np.uint64(q))
    s[wrap] -= np.uint64(q)
    return RingElem._trusted(a.params, s)


def ring_neg(a: RingElem) -> RingElem:
    q = a.params.q
    if a.params.dtype is object:
        return RingElem._trusted(a.params, np.array([(-x) % q for x in a.coeffs], dtype=object))
    out = np.where(a.coeffs == 0, np.uint64(0), np.uint64(q) - a.coeffs)
    return RingElem._trusted(a.params, out.astype(np.uint64))


def ring_sub(a: RingElem, b: RingElem) -> RingElem:
    _check(a, b)
    return ring_add(a, ring_neg(b))


def schoolbook_mul(a: RingElem, b: RingElem) -> RingElem:
    """Reference negacyclic convolution on Python integers."""
    _check(a, b)
    d, q = a.params.d, a.params.q
    x, y = a.to_list(), b.to_list()
    out = [0] * d
    for i in range(d):
        for j in range(d):
            if i + j < d:
                out[i + j] += x[i] * y[j]
            else:
                out[i + j - d] -= x[i] * y[j]
    return RingElem(a.params, [c % q for c in out])


def ring_mul(a: RingElem, b: RingElem, method: str = "fast") -> RingElem:
    """Product in R_q. ``method="schoolbook"`` selects the reference path."""
    _check(a, b)
    if method == "schoolbook":
        return schoolbook_mul(a, b)
    out = kernels.negacyclic_mul(a.coeffs, b.coeffs, a.params.q)
    return RingElem._trusted(a.params, out)


def _log2_exact(n: int, name: str) -> int:
    if not is_power_of_two(n):
        raise InvalidParamsError(f"{name} is a power of two", f"{name}={n}")
    return n.bit_length() - 1


def round_coeff(x: int, q: int, p: int) -> int:
    """floor((p*x + q/2) / q) mod p, for power-of-two p <= q."""
    return ((p * x + q // 2) // q) % p


def round_elem(x: RingElem, p: int) -> RingElem:
    """Coefficient-wise rounding R_q -> R_p with round-half-up.

    Requires p and q to be powers of two with 2 <= p <= q.
    """
    q = x.params.q
    lq = _log2_exact(q, "q")
    lp = _log2_exact(p, "p")
    if p < 2 or p > q:
        raise InvalidParamsError("2 <= p <= q", f"p={p}, q={q}")
    target = RingParams(x.params.d, p)
    shift = lq - lp
    if shift == 0:
        return RingElem(target, x.coeffs)
    if x.params.dtype is object:
        vals = [(((int(c) >> (shift - 1)) + 1) >> 1) % p for c in x.coeffs]
        return RingElem(target, vals)
    c = x.coeffs
    r = ((c >> np.uint64(shift - 1)) + np.uint64(1)) >> np.uint64(1)
    r &= np.uint64(p - 1)
    if target.dtype is object:
        return RingElem(target, [int(v) for v in r])
    return RingElem._trusted(target, r)


def msb_first_coeff(x: RingElem) -> int:
    """1 iff coefficient 0 is at least p/2 (x lives in R_p)."""
    p = x.params.q
    return 1 if int(x.coeffs[0]) >= p // 2 else 0


def uniform_residues(rng: np.random.Generator, q: int, size: int) -> np.ndarray:
    """``size`` i.i.d. uniform residues in [0, q)."""
    if q < 1 << 64:
        return rng.integers(0, q, size=size, dtype=np.uint64)
    nbytes = (q.bit_length() + 7) // 8
    mask = (1 << q.bit_length()) - 1
    out = []
    while len(out) < size:
        v = int.from_bytes(rng.bytes(nbytes), "little") & mask
        if v < q:
            out.append(v)
    return np.array(out, dtype=object)


def sample_uniform_ring(params: RingParams, rng: np.random.Generator) -> RingElem:
    return RingElem._trusted(params, uniform_residues(rng, params.q, params.d))


def dumps(x: RingElem) -> str:
    """Two-line text form: ``d=<d> q=<q>`` then comma-separated coefficients."""
    return f"d={x.params.d} q={x.params.q}\n" + ",".join(str(c) for c in x.to_list()) + "\n"


def parse_header(line: str) -> dict[str, str]:
    fields = {}
    for tok in line.split():
        key, sep, val = tok.partition("=")
        if not sep:
            raise ValueError(f"malformed header token {tok!r}")
        fields[key] = val
    return fields


def loads(text: str) -> RingElem:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) != 2:
        raise ValueError("expected a header line and a coefficient line")
    hdr = parse_header(lines[0])
    params = RingParams(int(hdr["d"]), int(hdr["q"]))
    return RingElem(params, [int(t) for t in lines[1].split(",")])
