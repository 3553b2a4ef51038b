"""Seeded streams and truncated discrete Gaussian errors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from hardlearn.errors import InvalidParamsError
from hardlearn.ring import RingElem, RingParams

# untruncated tail mass allowed outside the default cutoff
TAIL_TOLERANCE = 1e-6


@dataclass(frozen=True)
class RngSeed:
    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            v = getattr(self, name)
            if not 0 <= v < 1 << 64:
                raise InvalidParamsError(f"{name} is an unsigned 64-bit integer", f"{name}={v}")


def derive_rng_stream(seed: RngSeed | int, index: int | tuple = 0) -> np.random.Generator:
    """Independent Philox stream keyed by (master seed, stream index[, index]).

    ``index`` may be a tuple to address nested streams, e.g. ``(trial, arm)``.
    """
    if isinstance(seed, int):
        seed = RngSeed(seed)
    path = index if isinstance(index, tuple) else (index,)
    ss = np.random.SeedSequence(seed.master_seed, spawn_key=(seed.stream_index, *path))
    return np.random.Generator(np.random.Philox(ss))


def child_seed(rng: np.random.Generator) -> int:
    """Draw a fresh 64-bit master seed from an existing stream."""
    return int(rng.integers(0, 1 << 63, dtype=np.int64))


def _gauss_weights(sigma, lo, hi):
    x = np.arange(lo, hi + 1, dtype=np.float64)
    return x, np.exp(-(x * x) / (2.0 * sigma * sigma))


@dataclass(frozen=True)
class GaussianParams:
    """Discrete Gaussian over Z with parameter ``sigma``, truncated to [-B, B].

    ``tail_bound`` defaults to ceil(6 sigma).
    """

    sigma: float
    tail_bound: int | None = None

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidParamsError("sigma > 0", f"sigma={self.sigma}")
        default = self.tail_bound is None
        bound = max(1, math.ceil(6 * self.sigma)) if default else int(self.tail_bound)
        if bound < 0:
            raise InvalidParamsError("tail_bound >= 0", f"tail_bound={bound}")
        object.__setattr__(self, "tail_bound", bound)
        if default and self.untruncated_tail_mass() > TAIL_TOLERANCE:
            raise InvalidParamsError("P(|e| > B) <= 1e-6", f"tail={self.untruncated_tail_mass()}")

    @cached_property
    def support(self) -> np.ndarray:
        return np.arange(-self.tail_bound, self.tail_bound + 1, dtype=np.int64)

    @cached_property
    def pmf(self) -> np.ndarray:
        """Normalised probabilities on ``support``."""
        _, w = _gauss_weights(self.sigma, -self.tail_bound, self.tail_bound)
        return w / w.sum()

    @cached_property
    def cdf(self) -> np.ndarray:
        c = np.cumsum(self.pmf)
        c[-1] = 1.0
        return c

    @property
    def variance(self) -> float:
        x = self.support.astype(np.float64)
        return float(np.sum(self.pmf * x * x))

    def untruncated_tail_mass(self) -> float:
        """P(|e| > B) for the discrete Gaussian without the cutoff."""
        b = self.tail_bound
        far = b + int(40 * self.sigma) + 10
        _, inner = _gauss_weights(self.sigma, -b, b)
        _, outer = _gauss_weights(self.sigma, b + 1, far)
        total = inner.sum() + 2 * outer.sum()
        return float(2 * outer.sum() / total)


def sample_gaussian_array(g: GaussianParams, rng: np.random.Generator, size) -> np.ndarray:
    """Vectorised CDF-table inversion; int64 array of shape ``size``."""
    u = rng.random(size)
    idx = np.searchsorted(g.cdf, u, side="right")
    np.minimum(idx, len(g.cdf) - 1, out=idx)
    return g.support[idx]


def sample_discrete_gaussian(g: GaussianParams, rng: np.random.Generator) -> int:
    return int(sample_gaussian_array(g, rng, 1)[0])


def lift_mod(values: np.ndarray, q: int) -> np.ndarray:
    """Reduce signed integers into [0, q) in the ring's storage dtype."""
    if q < 1 << 63:
        return np.mod(values.astype(np.int64), q).astype(np.uint64)
    out = [int(v) % q for v in values]
    return np.array(out, dtype=np.uint64 if q < 1 << 64 else object)


def sample_error_ring(params: RingParams, g: GaussianParams, rng: np.random.Generator) -> RingElem:
    e = sample_gaussian_array(g, rng, params.d)
    return RingElem._trusted(params, lift_mod(e, params.q))
