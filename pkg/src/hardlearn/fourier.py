"""Boolean Fourier analysis and the classical shadows of quantum examples.

A uniform quantum example measured in the computational basis gives a
uniform labelled example; measured after Hadamards it gives a subset S with
probability c_hat(S)^2. Both are provided here as counted oracles.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from hardlearn import kernels
from hardlearn.errors import InvalidParamsError
from hardlearn.prf import MAX_TABLE_K, BooleanOracle, LazyRandomFunction, QueryBudget, TruthTable

PARSEVAL_TOL = 1e-9


class BoolFn:
    """Truth-table backed f: {0,1}^k -> {0,1}; bit i of the index is x_i."""

    def __init__(self, k: int, bits):
        self.table_ = bits if isinstance(bits, TruthTable) else TruthTable(k, bits)
        self.k = k

    @classmethod
    def from_callable(cls, k: int, fn: Callable[[int], int]) -> "BoolFn":
        if k > MAX_TABLE_K:
            raise InvalidParamsError(f"k <= {MAX_TABLE_K}", f"k={k}")
        return cls(k, np.fromiter((fn(x) for x in range(1 << k)), dtype=np.uint8, count=1 << k))

    @classmethod
    def parity(cls, k: int, s: int, c: int = 0) -> "BoolFn":
        xs = np.arange(1 << k, dtype=np.int64)
        return cls(k, ((np.bitwise_count(xs & s) + c) & 1).astype(np.uint8))

    @property
    def bits(self) -> np.ndarray:
        return self.table_.bits

    def table(self) -> TruthTable:
        return self.table_

    def __call__(self, x) -> int:
        return int(self.table_.bits[int(x)])

    def values(self, xs) -> np.ndarray:
        return self.table_.bits[np.asarray(xs, dtype=np.int64)]

    def signs(self) -> np.ndarray:
        """+1/-1 lift: 0 -> +1, 1 -> -1."""
        return 1 - 2 * self.table_.bits.astype(np.int64)


def as_boolfn(target) -> BoolFn:
    if isinstance(target, BoolFn):
        return target
    if isinstance(target, TruthTable):
        return BoolFn(target.k, target)
    if isinstance(target, LazyRandomFunction):
        return BoolFn(target.k, target.table())
    if isinstance(target, BooleanOracle):
        return as_boolfn(target.fn) if hasattr(target.fn, "table") else BoolFn.from_callable(target.k, target.fn)
    raise TypeError(f"cannot view {type(target).__name__} as a Boolean function")


@dataclass(frozen=True, eq=False)
class SignSpectrum:
    k: int
    coeffs: np.ndarray  # c_hat(S) indexed by the subset mask S

    @cached_property
    def weights(self) -> np.ndarray:
        return self.coeffs * self.coeffs

    @cached_property
    def _cdf(self) -> np.ndarray:
        return np.cumsum(self.weights)

    def parseval(self) -> float:
        return float(self.weights.sum())

    def to_csv(self) -> str:
        rows = ["S,coefficient"]
        rows += [f"{s},{format(float(c), '.17g')}" for s, c in enumerate(self.coeffs)]
        return "\n".join(rows) + "\n"


def wht_unscaled(signs, backend: str | None = None) -> np.ndarray:
    """Integer Walsh-Hadamard transform (no 2^-k scaling)."""
    return kernels.fwht(signs, backend=backend)


def wht_spectrum(f, backend: str | None = None) -> SignSpectrum:
    """c_hat(S) = 2^-k sum_x (-1)^{f(x)} (-1)^{x.S}, via the fast transform."""
    f = as_boolfn(f)
    if f.k > MAX_TABLE_K:
        raise InvalidParamsError(f"k <= {MAX_TABLE_K}", f"k={f.k}")
    raw = wht_unscaled(f.signs(), backend=backend)
    return SignSpectrum(f.k, raw.astype(np.float64) / float(1 << f.k))


def fourier_sample(spec: SignSpectrum, rng: np.random.Generator, size: int | None = None):
    """Draw S with probability c_hat(S)^2 by inverse CDF."""
    total = spec._cdf[-1]
    if abs(total - 1.0) > PARSEVAL_TOL:
        raise InvalidParamsError("sum of squared coefficients is 1", f"got {total!r}")
    u = rng.random(1 if size is None else size) * total
    idx = np.searchsorted(spec._cdf, u, side="right")
    np.minimum(idx, len(spec.coeffs) - 1, out=idx)
    return int(idx[0]) if size is None else idx.astype(np.int64)


class ExampleOracle:
    """Uniform labelled examples (x, f(x)); every draw is charged to the budget."""

    def __init__(self, f, k: int, rng: np.random.Generator, budget: QueryBudget | None = None):
        self._values = f.values if hasattr(f, "values") else np.vectorize(lambda x: f(int(x)), otypes=[np.uint8])
        self.k = k
        self.rng = rng
        self.budget = budget
        self.examples = 0

    def draw_many(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        if self.budget is not None:
            self.budget.charge(n)
        self.examples += n
        xs = self.rng.integers(0, 1 << self.k, size=n, dtype=np.int64)
        return xs, np.asarray(self._values(xs), dtype=np.uint8)

    def draw(self) -> tuple[int, int]:
        xs, ys = self.draw_many(1)
        return int(xs[0]), int(ys[0])


class FourierOracle:
    """Fourier-distribution samples of a target; the spectrum is built lazily."""

    def __init__(self, target, rng: np.random.Generator, budget: QueryBudget | None = None):
        self._target = target
        self.rng = rng
        self.budget = budget
        self.samples = 0

    @cached_property
    def spectrum(self) -> SignSpectrum:
        return wht_spectrum(as_boolfn(self._target))

    def sample_many(self, n: int) -> np.ndarray:
        if self.budget is not None:
            self.budget.charge(n)
        self.samples += n
        return fourier_sample(self.spectrum, self.rng, n)

    def sample(self) -> int:
        return int(self.sample_many(1)[0])


def uniform_example_oracle(f, rng: np.random.Generator, budget: QueryBudget | None = None) -> ExampleOracle:
    return ExampleOracle(f, f.k, rng, budget)


def membership_oracle(f, budget: QueryBudget | None = None) -> BooleanOracle:
    return BooleanOracle(f, f.k, budget)


@dataclass
class LearningOracles:
    """Everything a learner may touch, sharing one budget counter.

    ``planted`` is harness-only: the target itself on the planted arm of a
    distinguishing game, ``None`` otherwise.
    """

    k: int
    mq: BooleanOracle
    ex: ExampleOracle
    fs: FourierOracle
    budget: QueryBudget
    planted: object = None

    @classmethod
    def for_target(cls, target, rng: np.random.Generator, budget: QueryBudget | None = None,
                   planted=None) -> "LearningOracles":
        budget = budget if budget is not None else QueryBudget()
        ex_rng, fs_rng = rng.spawn(2)
        return cls(
            k=target.k,
            mq=membership_oracle(target, budget),
            ex=uniform_example_oracle(target, ex_rng, budget),
            fs=FourierOracle(target, fs_rng, budget),
            budget=budget,
            planted=planted,
        )
