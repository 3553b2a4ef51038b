import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardlearn.errors import InvalidParamsError, ParamMismatchError
from hardlearn.ring import (
    RingElem,
    RingParams,
    dumps,
    loads,
    monomial,
    msb_first_coeff,
    one,
    ring_add,
    ring_mul,
    ring_neg,
    ring_sub,
    round_coeff,
    round_elem,
    sample_uniform_ring,
    zero,
)

MODULI = [2, 3, 257, 1 << 10, 12289, (1 << 31) - 1, 1 << 32, (1 << 62) + 135, (1 << 64) - 59, 1 << 64,
          (1 << 89) - 1]


@st.composite
def ring_triples(draw):
    d = draw(st.sampled_from([1, 2, 4, 8, 16]))
    q = draw(st.sampled_from(MODULI))
    ring = RingParams(d, q)
    coeff = st.lists(st.integers(0, q - 1), min_size=d, max_size=d)
    return tuple(RingElem(ring, draw(coeff)) for _ in range(3))


@settings(max_examples=150, deadline=None)
@given(ring_triples())
def test_ring_axioms(triple):
    a, b, c = triple
    ring = a.params
    assert ring_add(a, b) == ring_add(b, a)
    assert ring_mul(a, b) == ring_mul(b, a)
    assert ring_mul(ring_mul(a, b), c) == ring_mul(a, ring_mul(b, c))
    assert ring_mul(a, ring_add(b, c)) == ring_add(ring_mul(a, b), ring_mul(a, c))
    assert ring_add(a, ring_neg(a)) == zero(ring)
    assert ring_mul(a, one(ring)) == a
    assert ring_sub(a, b) == ring_add(a, ring_neg(b))
    assert ring_mul(a, b) == ring_mul(a, b, method="schoolbook")


def test_x_pow_d_is_minus_one():
    ring = RingParams(8, 97)
    x = monomial(ring, 1)
    acc = one(ring)
    for _ in range(8):
        acc = acc * x
    assert acc == monomial(ring, 0, -1)
    assert monomial(ring, 8) == monomial(ring, 0, -1)
    assert monomial(ring, 16) == one(ring)


def test_operators_match_functions():
    rng = np.random.default_rng(1)
    ring = RingParams(16, 3329)
    a, b = sample_uniform_ring(ring, rng), sample_uniform_ring(ring, rng)
    assert a + b == ring_add(a, b)
    assert a - b == ring_sub(a, b)
    assert -a == ring_neg(a)
    assert a * b == ring_mul(a, b)


def test_add_wraps_near_two_to_sixty_four():
    q = (1 << 64) - 59
    ring = RingParams(2, q)
    a = RingElem(ring, [q - 1, q - 2])
    assert ring_add(a, a).to_list() == [q - 2, q - 4]


@pytest.mark.parametrize("d", [0, 3, 12])
def test_d_must_be_power_of_two(d):
    with pytest.raises(InvalidParamsError, match="power of two"):
        RingParams(d, 17)


def test_q_must_be_at_least_two():
    with pytest.raises(InvalidParamsError):
        RingParams(4, 1)


def test_coefficients_validated():
    ring = RingParams(4, 17)
    with pytest.raises(InvalidParamsError):
        RingElem(ring, [0, 1, 2])
    with pytest.raises(InvalidParamsError):
        RingElem(ring, [0, 1, 2, 17])
    with pytest.raises(InvalidParamsError):
        RingElem(ring, [0, -1, 2, 3])


def test_elements_are_immutable():
    a = sample_uniform_ring(RingParams(4, 17), np.random.default_rng(0))
    with pytest.raises(ValueError):
        a.coeffs[0] = 1


def test_mismatched_rings_rejected():
    a = one(RingParams(4, 17))
    b = one(RingParams(4, 19))
    with pytest.raises(ParamMismatchError):
        ring_add(a, b)
    with pytest.raises(ParamMismatchError):
        ring_mul(a, b)


def test_centered_lift():
    a = RingElem(RingParams(4, 17), [0, 8, 9, 16])
    assert a.centered() == [0, 8, -8, -1]


@pytest.mark.parametrize("q,p", [(16, 2), (1 << 10, 4), (1 << 16, 1 << 4), (1 << 12, 1 << 12)])
def test_round_elem_matches_formula(q, p):
    xs = list(range(q))
    got = round_elem(RingElem(RingParams(q, q), xs), p).to_list()
    assert got == [round_coeff(x, q, p) for x in xs]


def test_round_half_goes_up():
    # x/q * p = 1/2 exactly rounds to 1
    assert round_coeff(2, 16, 4) == 1
    assert round_coeff(1, 16, 4) == 0
    assert round_coeff(15, 16, 4) == 0  # 3.75 rounds to 4 = 0 mod 4


def test_round_wide_modulus():
    q, p = 1 << 70, 4
    vals = [0, (1 << 67) - 1, 1 << 67, q - 1, q // 2]
    elem = RingElem(RingParams(8, q), vals + [0, 0, 0])
    assert round_elem(elem, p).to_list()[:5] == [round_coeff(v, q, p) for v in vals]


@pytest.mark.parametrize("q,p", [(1000, 4), (1 << 10, 3), (16, 32)])
def test_round_rejects_bad_moduli(q, p):
    with pytest.raises(InvalidParamsError):
        round_elem(one(RingParams(4, q)), p)


def test_msb_first_coeff():
    ring = RingParams(2, 4)
    assert [msb_first_coeff(RingElem(ring, [c, 0])) for c in range(4)] == [0, 0, 1, 1]


def test_uniform_sampling_is_in_range_and_covers():
    rng = np.random.default_rng(0)
    for q in (5, 1 << 64, (1 << 70) + 3):
        vals = [c for _ in range(200) for c in sample_uniform_ring(RingParams(4, q), rng).to_list()]
        assert all(0 <= v < q for v in vals)
    counts = np.bincount([c for _ in range(2000) for c in sample_uniform_ring(RingParams(4, 5), rng).to_list()])
    assert len(counts) == 5 and counts.min() > 1400


@settings(max_examples=50, deadline=None)
@given(ring_triples())
def test_text_round_trip(triple):
    a = triple[0]
    assert loads(dumps(a)) == a


def test_hash_consistent_with_eq():
    ring = RingParams(4, 17)
    assert hash(RingElem(ring, [1, 2, 3, 4])) == hash(RingElem(ring, np.array([1, 2, 3, 4])))
