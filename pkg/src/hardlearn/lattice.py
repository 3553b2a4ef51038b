"""LWE / RLWE / LWR / RLWR sample generators and the advantage estimator."""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from hardlearn.errors import InvalidParamsError, ParamMismatchError, TrialError
from hardlearn.ring import (
    RingElem,
    RingParams,
    is_power_of_two,
    parse_header,
    ring_add,
    ring_mul,
    round_elem,
    sample_uniform_ring,
    uniform_residues,
)
from hardlearn.sampling import (
    GaussianParams,
    RngSeed,
    derive_rng_stream,
    lift_mod,
    sample_error_ring,
    sample_gaussian_array,
)

_CHUNK = 4096


@dataclass(frozen=True)
class LweParams:
    d: int
    q: int
    m: int
    chi: GaussianParams

    def __post_init__(self):
        if self.d < 1:
            raise InvalidParamsError("d >= 1", f"d={self.d}")
        if self.q < 2:
            raise InvalidParamsError("q >= 2", f"q={self.q}")
        if self.m < 1:
            raise InvalidParamsError("m >= 1", f"m={self.m}")

    @property
    def ring(self) -> RingParams:
        return RingParams(self.d, self.q)


@dataclass(frozen=True, eq=False)
class LweSample:
    a: np.ndarray
    b: int

    def __eq__(self, other):
        return isinstance(other, LweSample) and self.b == other.b and np.array_equal(self.a, other.a)


@dataclass(frozen=True)
class RlweSample:
    a: RingElem
    b: RingElem


# same shape; b lives in R_p
RlwrSample = RlweSample


@dataclass(frozen=True)
class Planted:
    secret: object


@dataclass(frozen=True)
class Uniform:
    pass


UNIFORM = Uniform()


def dot_mod(a: np.ndarray, s: np.ndarray, q: int) -> np.ndarray:
    """(a @ s) mod q exactly, for a of shape (m, d) or (d,)."""
    d = a.shape[-1]
    if q <= 1 << 31 and d * (q - 1) ** 2 < 1 << 63:
        return (a.astype(np.int64) @ s.astype(np.int64)) % q
    out = np.asarray(a, dtype=object) @ np.asarray(s, dtype=object)
    if np.ndim(out) == 0:
        return int(out) % q
    return np.array([int(v) % q for v in out], dtype=object)


def _as_residues(values, q):
    if q < 1 << 64:
        return np.asarray(values, dtype=np.uint64)
    return np.asarray(values, dtype=object)


def iter_lwe_samples(params: LweParams, source, rng: np.random.Generator,
                     errors: list | None = None) -> Iterator[LweSample]:
    """Stream ``params.m`` LWE samples; planted errors are appended to ``errors``."""
    d, q = params.d, params.q
    if isinstance(source, Planted):
        s = np.asarray([int(v) for v in source.secret], dtype=object)
        if s.shape != (d,):
            raise ParamMismatchError(f"secret has dimension {s.shape[0]}, expected {d}")
        s = _as_residues(s, q)
    remaining = params.m
    while remaining:
        n = min(remaining, _CHUNK)
        a = uniform_residues(rng, q, n * d).reshape(n, d)
        if isinstance(source, Planted):
            e = sample_gaussian_array(params.chi, rng, n)
            dot = dot_mod(a, s, q)
            if dot.dtype == object:
                b = [(int(x) + int(y)) % q for x, y in zip(dot, e)]
            else:
                b = (dot + e) % q
            if errors is not None:
                errors.extend(int(v) for v in e)
        else:
            b = uniform_residues(rng, q, n)
        for i in range(n):
            yield LweSample(a[i], int(b[i]))
        remaining -= n


def gen_lwe_batch(params: LweParams, source, rng: np.random.Generator,
                  errors: list | None = None) -> list[LweSample]:
    return list(iter_lwe_samples(params, source, rng, errors))


def _ring_secret(params: RingParams, source) -> RingElem:
    s = source.secret
    if not isinstance(s, RingElem) or s.params != params:
        raise ParamMismatchError(f"secret must be an element of {params}")
    return s


def iter_rlwe_samples(params: RingParams, chi: GaussianParams, m: int, source,
                      rng: np.random.Generator, errors: list | None = None) -> Iterator[RlweSample]:
    s = _ring_secret(params, source) if isinstance(source, Planted) else None
    for _ in range(m):
        a = sample_uniform_ring(params, rng)
        if s is None:
            b = sample_uniform_ring(params, rng)
        else:
            e = sample_error_ring(params, chi, rng)
            b = ring_add(ring_mul(a, s), e)
            if errors is not None:
                errors.append(e)
        yield RlweSample(a, b)


def gen_rlwe_batch(params: RingParams, chi: GaussianParams, m: int, source,
                   rng: np.random.Generator, errors: list | None = None) -> list[RlweSample]:
    return list(iter_rlwe_samples(params, chi, m, source, rng, errors))


def _check_p(p, q):
    if not (is_power_of_two(p) and is_power_of_two(q)):
        raise InvalidParamsError("p and q are powers of two", f"p={p}, q={q}")
    if not 2 <= p <= q:
        raise InvalidParamsError("2 <= p <= q", f"p={p}, q={q}")


def iter_rlwr_samples(params: RingParams, p: int, m: int, source,
                      rng: np.random.Generator) -> Iterator[RlwrSample]:
    _check_p(p, params.q)
    s = _ring_secret(params, source) if isinstance(source, Planted) else None
    target = RingParams(params.d, p)
    for _ in range(m):
        a = sample_uniform_ring(params, rng)
        if s is None:
            b = sample_uniform_ring(target, rng)
        else:
            b = round_elem(ring_mul(a, s), p)
        yield RlwrSample(a, b)


def gen_rlwr_batch(params: RingParams, p: int, m: int, source,
                   rng: np.random.Generator) -> list[RlwrSample]:
    return list(iter_rlwr_samples(params, p, m, source, rng))


def normal_form_secret(params: RingParams, g: GaussianParams, rng: np.random.Generator) -> RingElem:
    """Secret drawn coefficient-wise from the error distribution."""
    return sample_error_ring(params, g, rng)


def normal_form_lwe_secret(d: int, q: int, g: GaussianParams, rng: np.random.Generator) -> np.ndarray:
    return lift_mod(sample_gaussian_array(g, rng, d), q)


# --- sample batch files ---------------------------------------------------

def batch_header(kind: str, d: int, q: int, m: int, p: int | None = None) -> str:
    head = f"type={kind} d={d} q={q}"
    if p is not None:
        head += f" p={p}"
    return head + f" m={m}"


def format_sample(sample) -> str:
    if isinstance(sample, LweSample):
        return ",".join(str(int(v)) for v in sample.a) + f",{sample.b}"
    return ",".join(str(v) for v in sample.a.to_list() + sample.b.to_list())


def write_batch(fh, header: str, samples: Iterable) -> int:
    """Stream samples to an open text file; returns the count written."""
    fh.write(header + "\n")
    n = 0
    for s in samples:
        fh.write(format_sample(s) + "\n")
        n += 1
    return n


def read_batch(fh) -> tuple[dict, Iterator]:
    """Parse a batch file lazily: returns (header fields, sample iterator)."""
    hdr = parse_header(fh.readline())
    kind = hdr["type"]
    d, q = int(hdr["d"]), int(hdr["q"])
    p = int(hdr["p"]) if "p" in hdr else None
    info = {"type": kind, "d": d, "q": q, "m": int(hdr["m"]), "p": p}

    def _rows():
        for line in fh:
            if not line.strip():
                continue
            vals = [int(t) for t in line.split(",")]
            if kind == "lwe":
                yield LweSample(_as_residues(vals[:d], q), vals[d])
            else:
                bq = p if kind == "rlwr" else q
                yield RlweSample(RingElem(RingParams(d, q), vals[:d]), RingElem(RingParams(d, bq), vals[d:]))

    return info, _rows()


# --- distinguishing advantage ----------------------------------------------

@dataclass(frozen=True)
class AdvantageEstimate:
    trials: int
    p_planted: float
    p_uniform: float
    advantage: float
    stderr: float
    ci_low: float
    ci_high: float
    method: str = "wald"

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "p_planted": self.p_planted,
            "p_uniform": self.p_uniform,
            "advantage": self.advantage,
            "stderr": self.stderr,
            "ci": [self.ci_low, self.ci_high],
            "ci_method": self.method,
        }


def clopper_pearson(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    alpha = 1 - level
    lo = 0.0 if k == 0 else float(stats.beta.ppf(alpha / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(stats.beta.ppf(1 - alpha / 2, k + 1, n - k))
    return lo, hi


def advantage_from_counts(ones_planted: int, ones_uniform: int, trials: int,
                          method: str = "wald") -> AdvantageEstimate:
    pp, pu = ones_planted / trials, ones_uniform / trials
    adv = abs(pp - pu)
    se = math.sqrt(pp * (1 - pp) / trials + pu * (1 - pu) / trials)
    if method == "wald":
        # normal approximation; degenerate (zero-width) at p in {0, 1}
        lo, hi = max(0.0, adv - 1.96 * se), min(1.0, adv + 1.96 * se)
    elif method == "clopper-pearson":
        lp, hp = clopper_pearson(ones_planted, trials)
        lu, hu = clopper_pearson(ones_uniform, trials)
        hi = max(hp - lu, hu - lp)
        lo = max(0.0, lp - hu, lu - hp)
    else:
        raise ValueError(f"unknown CI method {method!r}")
    return AdvantageEstimate(trials, pp, pu, adv, se, lo, hi, method)


def estimate_advantage(
    distinguisher: Callable,
    gen_planted: Callable,
    gen_uniform: Callable,
    trials: int,
    seed: RngSeed | int | np.random.Generator,
    workers: int = 1,
    method: str = "wald",
) -> AdvantageEstimate:
    """Monte-Carlo |Pr[D(planted)=1] - Pr[D(uniform)=1]|.

    Trial ``i`` draws its planted instance, uniform instance and the
    distinguisher's coins from four derived streams, so the estimate does
    not depend on ``workers``.
    """
    if trials < 1:
        raise InvalidParamsError("trials >= 1", f"trials={trials}")
    if isinstance(seed, np.random.Generator):
        seed = RngSeed(int(seed.integers(0, 1 << 63)))

    def run(i):
        try:
            inst = gen_planted(derive_rng_stream(seed, (i, 0)))
            hit_p = int(distinguisher(inst, derive_rng_stream(seed, (i, 1))))
            inst = gen_uniform(derive_rng_stream(seed, (i, 2)))
            hit_u = int(distinguisher(inst, derive_rng_stream(seed, (i, 3))))
        except Exception as exc:
            raise TrialError(i, exc) from exc
        return hit_p, hit_u

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, range(trials)))
    else:
        results = [run(i) for i in range(trials)]
    ones_p = sum(r[0] for r in results)
    ones_u = sum(r[1] for r in results)
    return advantage_from_counts(ones_p, ones_u, trials, method)
