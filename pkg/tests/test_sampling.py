import math

import numpy as np
import pytest
from scipy import stats

from hardlearn.errors import InvalidParamsError
from hardlearn.ring import RingParams
from hardlearn.sampling import (
    GaussianParams,
    RngSeed,
    child_seed,
    derive_rng_stream,
    lift_mod,
    sample_discrete_gaussian,
    sample_error_ring,
    sample_gaussian_array,
)


def test_default_tail_bound_is_six_sigma():
    assert GaussianParams(3.0).tail_bound == 18
    assert GaussianParams(0.1).tail_bound == 1
    assert GaussianParams(2.5, tail_bound=4).tail_bound == 4


@pytest.mark.parametrize("sigma", [0.0, -1.0])
def test_sigma_must_be_positive(sigma):
    with pytest.raises(InvalidParamsError, match="sigma"):
        GaussianParams(sigma)


def test_pmf_normalised_and_symmetric():
    g = GaussianParams(2.0)
    assert abs(g.pmf.sum() - 1.0) < 1e-12
    assert np.allclose(g.pmf, g.pmf[::-1])
    assert g.cdf[-1] == 1.0


def test_variance_close_to_sigma_squared():
    # discrete Gaussian variance differs from sigma^2 by an exponentially small term
    g = GaussianParams(3.0)
    assert abs(g.variance - 9.0) < 1e-6


def test_untruncated_tail_mass_small():
    for s in (0.5, 1.0, 3.0, 10.0):
        assert GaussianParams(s).untruncated_tail_mass() <= 1e-6


def test_samples_follow_pmf():
    g = GaussianParams(2.0)
    rng = derive_rng_stream(11)
    x = sample_gaussian_array(g, rng, 200_000)
    assert x.min() >= -g.tail_bound and x.max() <= g.tail_bound
    observed = np.bincount(x + g.tail_bound, minlength=len(g.support))
    expected = g.pmf * len(x)
    keep = expected > 5
    chi2 = ((observed[keep] - expected[keep]) ** 2 / expected[keep]).sum()
    assert stats.chi2.sf(chi2, keep.sum() - 1) > 1e-4


def test_tiny_sigma_is_zero():
    g = GaussianParams(1e-9)
    assert not np.any(sample_gaussian_array(g, derive_rng_stream(1), 1000))
    assert sample_discrete_gaussian(g, derive_rng_stream(1)) == 0


def test_streams_are_deterministic_and_distinct():
    a = derive_rng_stream(5, 3).integers(0, 1 << 62, size=8)
    b = derive_rng_stream(5, 3).integers(0, 1 << 62, size=8)
    c = derive_rng_stream(5, 4).integers(0, 1 << 62, size=8)
    d = derive_rng_stream(RngSeed(5, 1), 3).integers(0, 1 << 62, size=8)
    e = derive_rng_stream(5, (3, 0)).integers(0, 1 << 62, size=8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)
    assert not np.array_equal(a, e)


def test_stream_independent_of_access_order():
    first = [derive_rng_stream(9, i).random() for i in range(5)]
    second = [derive_rng_stream(9, i).random() for i in reversed(range(5))][::-1]
    assert first == second


@pytest.mark.parametrize("seed", [-1, 1 << 64])
def test_seed_range_checked(seed):
    with pytest.raises(InvalidParamsError):
        RngSeed(seed)


def test_child_seed_deterministic():
    assert child_seed(derive_rng_stream(1)) == child_seed(derive_rng_stream(1))


def test_lift_mod():
    v = np.array([-3, -1, 0, 1, 5])
    assert lift_mod(v, 7).tolist() == [4, 6, 0, 1, 5]
    assert [int(x) for x in lift_mod(v, 1 << 64)] == [(1 << 64) - 3, (1 << 64) - 1, 0, 1, 5]
    q = (1 << 80) + 1
    assert [int(x) for x in lift_mod(v, q)][0] == q - 3


def test_error_ring_is_small():
    ring = RingParams(64, 1 << 20)
    g = GaussianParams(3.0)
    e = sample_error_ring(ring, g, derive_rng_stream(4))
    assert max(abs(c) for c in e.centered()) <= g.tail_bound
    assert math.isclose(np.var(e.centered()), 9.0, rel_tol=0.6)
