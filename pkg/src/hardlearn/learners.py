"""Budgeted learners used as the assumed learner inside the reductions.

Every learner has the signature ``learner(oracles, rng) -> LearnerReport``
once its own hyper-parameters are bound (see ``make_learner``).
"""

from __future__ import annotations

import itertools
import time
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from hardlearn import kernels
from hardlearn.errors import InvalidParamsError, NotAJuntaError
from hardlearn.fourier import BoolFn, LearningOracles, as_boolfn

_MASK64 = (1 << 64) - 1
# fall back to the empirical-spectrum affine fit only up to this many variables
_AFFINE_FIT_MAX_K = 20
EXHAUSTIVE_MAX_K = 16


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _coin_bits(xs: np.ndarray, salt: int) -> np.ndarray:
    z = (xs.astype(np.uint64) ^ np.uint64(salt)) + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z ^= z >> np.uint64(31)
    return (z & np.uint64(1)).astype(np.uint8)


def _parity(v: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(v) & 1).astype(np.uint8)


# --- hypotheses ----------------------------------------------------------------

class Hypothesis:
    """Total function {0,1}^k -> {0,1} with a serialisable representation."""

    kind = "abstract"

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, x: int) -> int:
        return int(self.evaluate_many(np.array([x], dtype=np.int64))[0])

    __call__ = evaluate

    def payload(self) -> dict:
        return {}

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.payload()}


@dataclass
class TableHypothesis(Hypothesis):
    k: int
    bits: np.ndarray
    kind = "truth_table"

    def evaluate_many(self, xs):
        return np.asarray(self.bits, dtype=np.uint8)[np.asarray(xs, dtype=np.int64)]

    def payload(self):
        from hardlearn.prf import TruthTable
        return {"k": self.k, "hex": TruthTable(self.k, self.bits).to_hex()}


@dataclass
class LinearHypothesis(Hypothesis):
    """x -> <s, x> xor c over GF(2)."""

    k: int
    s: int
    c: int = 0
    kind = "linear"

    def evaluate_many(self, xs):
        return _parity(np.asarray(xs, dtype=np.int64) & self.s) ^ np.uint8(self.c)

    def payload(self):
        return {"k": self.k, "s": self.s, "constant": self.c}


@dataclass
class SignedPolynomialHypothesis(Hypothesis):
    """sign(sum_S w_S chi_S(x)) mapped back to bits; a zero sum counts as +1."""

    k: int
    coeffs: dict[int, float]
    kind = "signed_polynomial"

    def evaluate_many(self, xs):
        xs = np.asarray(xs, dtype=np.int64)
        acc = np.zeros(xs.shape, dtype=np.float64)
        for s, w in self.coeffs.items():
            acc += w * (1.0 - 2.0 * _parity(xs & s))
        return (acc < 0).astype(np.uint8)

    def payload(self):
        return {"k": self.k, "coefficients": {str(s): w for s, w in sorted(self.coeffs.items())}}


@dataclass
class JuntaHypothesis(Hypothesis):
    k: int
    variables: tuple[int, ...]
    subtable: np.ndarray
    kind = "junta"

    def evaluate_many(self, xs):
        xs = np.asarray(xs, dtype=np.int64)
        idx = np.zeros(xs.shape, dtype=np.int64)
        for j, v in enumerate(self.variables):
            idx |= ((xs >> v) & 1) << j
        return np.asarray(self.subtable, dtype=np.uint8)[idx]

    def payload(self):
        return {"k": self.k, "variables": list(self.variables), "subtable": [int(b) for b in self.subtable]}


@dataclass
class MemoHypothesis(Hypothesis):
    """Memorised answers; a salted hash coin everywhere else."""

    k: int
    memo: dict[int, int]
    salt: int
    kind = "memo"

    def evaluate_many(self, xs):
        xs = np.asarray(xs, dtype=np.int64)
        out = _coin_bits(xs, self.salt)
        if self.memo:
            for i, x in enumerate(xs.ravel()):
                v = self.memo.get(int(x))
                if v is not None:
                    out.flat[i] = v
        return out

    def payload(self):
        return {"k": self.k, "salt": self.salt, "memo": {str(x): b for x, b in sorted(self.memo.items())}}


@dataclass
class CoinHypothesis(Hypothesis):
    salt: int
    kind = "coin"

    def evaluate_many(self, xs):
        return _coin_bits(np.asarray(xs, dtype=np.int64), self.salt)

    def payload(self):
        return {"salt": self.salt}


@dataclass
class LearnerReport:
    hypothesis: Hypothesis
    oracle_calls_used: int
    wall_time: float
    exact: bool | None = None
    info: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "hypothesis": self.hypothesis.to_dict(),
            "oracle_calls_used": self.oracle_calls_used,
            "wall_time": self.wall_time,
            "exact": self.exact,
            "info": self.info,
        }


def agreement(h: Hypothesis, target, k: int, rng: np.random.Generator | None = None,
              samples: int = 10_000) -> float:
    """Pr_x[h(x) = target(x)], exhaustive for k <= 16, sampled above."""
    if k <= EXHAUSTIVE_MAX_K:
        xs = np.arange(1 << k, dtype=np.int64)
    else:
        if rng is None:
            raise ValueError("sampling agreement needs an rng")
        xs = rng.integers(0, 1 << k, size=samples, dtype=np.int64)
    truth = target.values(xs) if hasattr(target, "values") else np.array([target(int(x)) for x in xs])
    return float(np.mean(h.evaluate_many(xs) == np.asarray(truth, dtype=np.uint8)))


def _report(h, oracles, t0, exact=None, **info):
    return LearnerReport(h, oracles.budget.used, time.perf_counter() - t0, exact, info)


# --- GF(2) elimination -------------------------------------------------------------

def _gf2_solve(rows: list[int], rhs: list[int], n: int):
    """Solve rows . z = rhs over GF(2); rows are n-bit masks.

    Returns (solution mask, rank, consistent) with free variables set to 0.
    """
    pivots: dict[int, tuple[int, int]] = {}
    consistent = True
    for r, b in zip(rows, rhs):
        for bit in range(n - 1, -1, -1):
            if not (r >> bit) & 1:
                continue
            if bit in pivots:
                pr, pb = pivots[bit]
                r ^= pr
                b ^= pb
            else:
                pivots[bit] = (r, b)
                break
        else:
            if b:
                consistent = False
    z = 0
    for bit in sorted(pivots):
        r, b = pivots[bit]
        # lower bits of r are already solved
        val = b ^ (bin(r & z & ((1 << bit) - 1)).count("1") & 1)
        if val:
            z |= 1 << bit
    return z, len(pivots), consistent


def _best_affine(xs: np.ndarray, ys: np.ndarray, k: int) -> tuple[int, int]:
    """Affine function with the largest empirical correlation with the sample."""
    hist = np.zeros(1 << k, dtype=np.int64)
    np.add.at(hist, xs, 1 - 2 * ys.astype(np.int64))
    corr = kernels.fwht(hist)
    s = int(np.argmax(np.abs(corr)))
    return s, 0 if corr[s] >= 0 else 1


def gf2_linear_learner(oracles: LearningOracles, n_examples: int, rng=None) -> LearnerReport:
    """Learn x -> <s,x> xor c from uniform examples by Gaussian elimination.

    When the examples are inconsistent with every affine function, the
    affine function of best empirical agreement is returned instead
    (k <= 20), flagged non-exact.
    """
    t0 = time.perf_counter()
    k = oracles.k
    xs, ys = oracles.ex.draw_many(n_examples)
    rows = [(int(x) << 1) | 1 for x in xs]  # bit 0 is the constant term
    z, rank, consistent = _gf2_solve(rows, [int(y) for y in ys], k + 1)
    if consistent:
        h = LinearHypothesis(k, z >> 1, z & 1)
        return _report(h, oracles, t0, exact=rank == k + 1, rank=rank, consistent=True)
    if k <= _AFFINE_FIT_MAX_K:
        s, c = _best_affine(xs, ys, k)
        h = LinearHypothesis(k, s, c)
    else:
        h = LinearHypothesis(k, z >> 1, z & 1)
    return _report(h, oracles, t0, exact=False, rank=rank, consistent=False)


# --- low degree (LMN) -------------------------------------------------------------

def low_degree_sets(k: int, t: int):
    for deg in range(t + 1):
        for combo in itertools.combinations(range(k), deg):
            yield sum(1 << i for i in combo)


def low_degree_learner(t: int, n_samples: int, oracles: LearningOracles, rng=None,
                       exhaustive: bool = False) -> LearnerReport:
    """Estimate every c_hat(S) with |S| <= t from one shared sample.

    ``exhaustive=True`` queries all 2^k points through the membership
    oracle instead of drawing random examples.
    """
    t0 = time.perf_counter()
    k = oracles.k
    if not 0 <= t <= k:
        raise InvalidParamsError("0 <= t <= k", f"t={t}, k={k}")
    if exhaustive:
        xs = np.arange(1 << k, dtype=np.int64)
        ys = np.array([oracles.mq(int(x)) for x in xs], dtype=np.uint8)
    else:
        xs, ys = oracles.ex.draw_many(n_samples)
    signs = 1.0 - 2.0 * ys.astype(np.float64)
    coeffs = {}
    for s in low_degree_sets(k, t):
        coeffs[s] = float(np.mean(signs * (1.0 - 2.0 * _parity(xs & s))))
    h = SignedPolynomialHypothesis(k, coeffs)
    return _report(h, oracles, t0, degree=t, n_samples=int(len(xs)))


# --- junta learner ------------------------------------------------------------------

def junta_learner(j: int, oracles: LearningOracles, rng=None, max_fourier_samples: int = 200,
                  n_examples: int = 2000, patience: int = 50) -> LearnerReport:
    """Find the relevant variables from Fourier samples, then fill the subtable.

    Sampling stops once the union of sampled sets has not grown for
    ``patience`` consecutive samples, or after ``max_fourier_samples``.
    """
    t0 = time.perf_counter()
    if j > 20:
        raise InvalidParamsError("junta bound j <= 20", f"j={j}")
    support = 0
    stable = 0
    drawn = 0
    while drawn < max_fourier_samples and stable < patience:
        s = oracles.fs.sample()
        drawn += 1
        if s | support != support:
            support |= s
            stable = 0
            if support.bit_count() > j:
                raise NotAJuntaError(f"found {support.bit_count()} relevant variables, bound is {j}")
        else:
            stable += 1
    variables = tuple(i for i in range(oracles.k) if (support >> i) & 1)
    xs, ys = oracles.ex.draw_many(n_examples)
    idx = np.zeros(xs.shape, dtype=np.int64)
    for pos, v in enumerate(variables):
        idx |= ((xs >> v) & 1) << pos
    size = 1 << len(variables)
    ones = np.bincount(idx, weights=ys.astype(np.float64), minlength=size)
    seen = np.bincount(idx, minlength=size)
    sub = (2 * ones > seen).astype(np.uint8)
    unseen = np.flatnonzero(seen == 0)
    for r in unseen:
        remaining = oracles.budget.remaining
        if remaining is not None and remaining < 1:
            break
        x = sum(1 << v for pos, v in enumerate(variables) if (r >> pos) & 1)
        sub[r] = oracles.mq(x)
    h = JuntaHypothesis(oracles.k, variables, sub)
    return _report(h, oracles, t0, fourier_samples=drawn, stabilised=stable >= patience,
                   unseen_restrictions=int(len(unseen)))


# --- extremes -------------------------------------------------------------------

def memorizing_learner(oracles: LearningOracles, budget: int, rng: np.random.Generator) -> LearnerReport:
    """Query ``budget`` distinct uniform points; coin-flip elsewhere."""
    t0 = time.perf_counter()
    n = 1 << oracles.k
    budget = min(budget, n)
    if 2 * budget >= n:
        points = rng.permutation(n)[:budget]
    else:
        chosen: set[int] = set()
        order = []
        while len(order) < budget:
            x = int(rng.integers(0, n))
            if x not in chosen:
                chosen.add(x)
                order.append(x)
        points = order
    memo = {int(x): oracles.mq(int(x)) for x in points}
    salt = int(rng.integers(0, 1 << 63))
    h = MemoHypothesis(oracles.k, memo, salt)
    return _report(h, oracles, t0, exact=budget == n)


def cheat_learner(target) -> LearnerReport:
    """The target itself, at zero cost."""
    t0 = time.perf_counter()
    f = as_boolfn(target)
    h = TableHypothesis(f.k, f.bits)
    return LearnerReport(h, 0, time.perf_counter() - t0, True)


def harness_cheat_learner(oracles: LearningOracles, rng: np.random.Generator) -> LearnerReport:
    """Cheat when the harness exposes the planted target; otherwise a coin.

    On the uniform arm there is no key to cheat with, so the hypothesis is a
    salted coin (a documented harness convention).
    """
    if oracles.planted is not None:
        return cheat_learner(oracles.planted)
    return LearnerReport(CoinHypothesis(int(rng.integers(0, 1 << 63))), 0, 0.0, False, {"coin": True})


def make_learner(name: str, **kw) -> Callable[[LearningOracles, np.random.Generator], LearnerReport]:
    """Bind hyper-parameters; returns ``learner(oracles, rng)``."""
    if name == "gf2":
        n = kw.get("n_examples", 64)
        return lambda o, rng: gf2_linear_learner(o, n, rng)
    if name == "low-degree":
        t, n = kw.get("degree", 1), kw.get("n_samples", 1000)
        ex = kw.get("exhaustive", False)
        return lambda o, rng: low_degree_learner(t, n, o, rng, exhaustive=ex)
    if name == "junta":
        j = kw.get("j", 4)
        opts = {key: kw[key] for key in ("max_fourier_samples", "n_examples", "patience") if key in kw}
        return lambda o, rng: junta_learner(j, o, rng, **opts)
    if name == "memorize":
        q = kw.get("queries", 16)
        return lambda o, rng: memorizing_learner(o, q, rng)
    if name == "cheat":
        return harness_cheat_learner
    raise ValueError(f"unknown learner {name!r}")


def hypothesis_matches(h: Hypothesis, target) -> bool:
    f = as_boolfn(target)
    xs = np.arange(1 << f.k, dtype=np.int64)
    return bool(np.array_equal(h.evaluate_many(xs), f.bits))


__all__ = [
    "BoolFn", "CoinHypothesis", "Hypothesis", "JuntaHypothesis", "LearnerReport", "LinearHypothesis",
    "MemoHypothesis", "SignedPolynomialHypothesis", "TableHypothesis", "agreement", "cheat_learner",
    "gf2_linear_learner", "harness_cheat_learner", "hypothesis_matches", "junta_learner",
    "low_degree_learner", "make_learner", "memorizing_learner",
]
