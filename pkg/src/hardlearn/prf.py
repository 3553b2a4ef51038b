"""RLWE degree-k PRF, the one-bit RLWR PRF, and Boolean oracles.

Inputs x in {0,1}^k are handled either as bit sequences or as integers
whose bit i is x_i (bit 0 least significant).
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from hardlearn import kernels
from hardlearn.errors import BudgetExceededError, InvalidParamsError, ParamMismatchError
from hardlearn.ring import (
    RingElem,
    RingParams,
    is_power_of_two,
    msb_first_coeff,
    parse_header,
    ring_mul,
    round_elem,
    sample_uniform_ring,
)
from hardlearn.sampling import GaussianParams, sample_error_ring

MAX_TABLE_K = 24
MEMO_LIMIT = 1 << 26


@dataclass(frozen=True)
class PrfParams:
    d: int
    q: int
    p: int
    k: int
    secret_dist: GaussianParams | None = None  # None: uniform secrets

    def __post_init__(self):
        RingParams(self.d, self.q)
        if not (is_power_of_two(self.p) and is_power_of_two(self.q)):
            raise InvalidParamsError("p and q are powers of two", f"p={self.p}, q={self.q}")
        if not 2 <= self.p <= self.q:
            raise InvalidParamsError("2 <= p <= q", f"p={self.p}, q={self.q}")
        if self.k < 1:
            raise InvalidParamsError("k >= 1", f"k={self.k}")

    @property
    def ring(self) -> RingParams:
        return RingParams(self.d, self.q)

    def header(self) -> str:
        head = f"d={self.d} q={self.q} p={self.p} k={self.k}"
        if self.secret_dist is None:
            return head + " secret=uniform"
        g = self.secret_dist
        return head + f" secret=gaussian sigma={g.sigma!r} tail_bound={g.tail_bound}"


def qprf_regime(params: PrfParams, log_factor: float = 1.0, superpoly_exponent: float = 1.0) -> dict:
    """Advisory check of q >= p * k * (r sqrt(d+k) * w(log d))^k * d^{w(1)}.

    The asymptotic w(.) terms are instantiated as ``log_factor * log2(d)`` and
    ``d ** superpoly_exponent``; nothing here is a security claim.
    """
    d, k = params.d, params.k
    if params.secret_dist is None:
        return {"applicable": False, "regime": "desk", "reason": "lemma assumes Gaussian secrets"}
    r = params.secret_dist.sigma
    logd = max(math.log2(d), 1.0)
    rhs = (math.log2(params.p) + math.log2(k)
           + k * (math.log2(r) + 0.5 * math.log2(d + k) + math.log2(log_factor * logd))
           + superpoly_exponent * math.log2(d))
    lhs = math.log2(params.q)
    ok = lhs >= rhs
    return {
        "applicable": True,
        "log2_q": lhs,
        "log2_required": rhs,
        "margin_bits": lhs - rhs,
        "regime": "paper-secure" if ok else "desk",
    }


@dataclass(frozen=True)
class PrfKey:
    params: PrfParams
    a: RingElem
    s: tuple[RingElem, ...]

    def __post_init__(self):
        ring = self.params.ring
        if len(self.s) != self.params.k:
            raise ParamMismatchError(f"expected {self.params.k} secrets, got {len(self.s)}")
        for e in (self.a, *self.s):
            if e.params != ring:
                raise ParamMismatchError(f"key element not in {ring}")


def prf_keygen(params: PrfParams, rng: np.random.Generator) -> PrfKey:
    ring = params.ring
    a = sample_uniform_ring(ring, rng)
    if params.secret_dist is None:
        s = tuple(sample_uniform_ring(ring, rng) for _ in range(params.k))
    else:
        s = tuple(sample_error_ring(ring, params.secret_dist, rng) for _ in range(params.k))
    return PrfKey(params, a, s)


def input_bits(x, k: int) -> list[int]:
    """Normalise an input to a list of k bits (x_0 first)."""
    if isinstance(x, (int, np.integer)):
        x = int(x)
        if not 0 <= x < 1 << k:
            raise ParamMismatchError(f"input {x} outside [0, 2^{k})")
        return [(x >> i) & 1 for i in range(k)]
    bits = [int(b) for b in x]
    if len(bits) != k:
        raise ParamMismatchError(f"input has length {len(bits)}, expected {k}")
    if any(b not in (0, 1) for b in bits):
        raise ParamMismatchError("input bits must be 0/1")
    return bits


def bits_to_int(bits: Sequence[int]) -> int:
    return sum(int(b) << i for i, b in enumerate(bits))


def prf_product(key: PrfKey, x, order: Sequence[int] | None = None) -> RingElem:
    """a * prod_{i: x_i = 1} s_i before rounding; ``order`` permutes the factors."""
    bits = input_bits(x, key.params.k)
    idx = [i for i in (order if order is not None else range(key.params.k)) if bits[i]]
    acc = key.a
    for i in idx:
        acc = ring_mul(acc, key.s[i])
    return acc


def prf_eval_ring(key: PrfKey, x) -> RingElem:
    return round_elem(prf_product(key, x), key.params.p)


def prf_eval_bit(key: PrfKey, x) -> int:
    return msb_first_coeff(prf_eval_ring(key, x))


@dataclass(frozen=True, eq=False)
class TruthTable:
    """Bits indexed by the input integer."""

    k: int
    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits, dtype=np.uint8)
        if b.shape != (1 << self.k,):
            raise InvalidParamsError("len(bits) == 2^k", f"got {b.shape}, k={self.k}")
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    def __eq__(self, other):
        return isinstance(other, TruthTable) and self.k == other.k and np.array_equal(self.bits, other.bits)

    def __getitem__(self, x):
        return int(self.bits[x])

    def to_hex(self) -> str:
        """Hex of sum(bits[x] << x), most significant digit first."""
        value = int.from_bytes(np.packbits(self.bits, bitorder="little").tobytes(), "little")
        digits = max(1, (1 << self.k) // 4)
        return format(value, f"0{digits}x")

    @classmethod
    def from_hex(cls, k: int, text: str) -> "TruthTable":
        value = int(text, 16)
        n = 1 << k
        if value >> n:
            raise InvalidParamsError("hex value fits in 2^k bits")
        raw = value.to_bytes(max(1, (n + 7) // 8), "little")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n]
        return cls(k, bits)

    def dumps(self) -> str:
        return f"k={self.k}\n{self.to_hex()}\n"

    @classmethod
    def loads(cls, text: str) -> "TruthTable":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        hdr = parse_header(lines[0])
        return cls.from_hex(int(hdr["k"]), lines[1])


def prf_truth_table(key: PrfKey, backend: str | None = None) -> TruthTable:
    k = key.params.k
    if k > MAX_TABLE_K:
        raise InvalidParamsError(f"k <= {MAX_TABLE_K} for truth tables", f"k={k}")
    bits = kernels.prf_table_bits(key.a.coeffs, [s.coeffs for s in key.s], key.params.q, key.params.p,
                                  backend=backend)
    return TruthTable(k, bits)


def dump_key(key: PrfKey) -> str:
    lines = [key.params.header()]
    for e in (key.a, *key.s):
        lines.append(",".join(str(c) for c in e.to_list()))
    return "\n".join(lines) + "\n"


def load_key(text: str) -> PrfKey:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    hdr = parse_header(lines[0])
    g = None
    if hdr.get("secret", "uniform") == "gaussian":
        g = GaussianParams(float(hdr["sigma"]), int(hdr["tail_bound"]))
    params = PrfParams(int(hdr["d"]), int(hdr["q"]), int(hdr["p"]), int(hdr["k"]), g)
    elems = [RingElem(params.ring, [int(t) for t in ln.split(",")]) for ln in lines[1:]]
    return PrfKey(params, elems[0], tuple(elems[1:]))


# --- oracles ---------------------------------------------------------------

class QueryBudget:
    """Unified call counter shared by every oracle a learner holds."""

    def __init__(self, limit: int | None = None):
        self.limit = limit
        self.used = 0

    def charge(self, n: int = 1):
        if self.limit is not None and self.used + n > self.limit:
            raise BudgetExceededError(f"budget {self.limit} exceeded (used {self.used}, requested {n})")
        self.used += n

    @property
    def remaining(self):
        return None if self.limit is None else self.limit - self.used


class BooleanOracle:
    """Counted query access to f: {0,1}^k -> {0,1}."""

    def __init__(self, fn: Callable[[int], int], k: int, budget: QueryBudget | None = None):
        self.fn = fn
        self.k = k
        self.budget = budget
        self.queries = 0

    def __call__(self, x) -> int:
        xi = x if isinstance(x, (int, np.integer)) else bits_to_int(input_bits(x, self.k))
        if self.budget is not None:
            self.budget.charge()
        self.queries += 1
        return int(self.fn(int(xi)))


class LazyRandomFunction:
    """A uniformly random Boolean function, sampled on first use of each point."""

    def __init__(self, k: int, rng: np.random.Generator):
        if k < 1:
            raise InvalidParamsError("k >= 1", f"k={k}")
        self.k = k
        self._rng = rng
        self._memo: dict[int, int] = {}

    def __call__(self, x: int) -> int:
        x = int(x)
        bit = self._memo.get(x)
        if bit is None:
            if len(self._memo) >= MEMO_LIMIT:
                raise MemoryError(f"random function memo exceeds {MEMO_LIMIT} entries")
            bit = int(self._rng.integers(0, 2))
            self._memo[x] = bit
        return bit

    def values(self, xs) -> np.ndarray:
        return np.fromiter((self(x) for x in np.asarray(xs).ravel()), dtype=np.uint8, count=np.size(xs))

    def table(self) -> TruthTable:
        if self.k > MAX_TABLE_K:
            raise InvalidParamsError(f"k <= {MAX_TABLE_K} for truth tables", f"k={self.k}")
        return TruthTable(self.k, self.values(np.arange(1 << self.k)))


def random_function_oracle(k: int, rng: np.random.Generator, budget: QueryBudget | None = None) -> BooleanOracle:
    return BooleanOracle(LazyRandomFunction(k, rng), k, budget)


def prf_oracle(key: PrfKey, budget: QueryBudget | None = None) -> BooleanOracle:
    """Oracle view of the one-bit PRF (table-backed when k <= 24)."""
    if key.params.k <= MAX_TABLE_K:
        table = prf_truth_table(key)
        return BooleanOracle(table.__getitem__, key.params.k, budget)
    return BooleanOracle(lambda x: prf_eval_bit(key, x), key.params.k, budget)
