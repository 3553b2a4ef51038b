import numpy as np
import pytest

from hardlearn.errors import BudgetExceededError, InvalidParamsError, NotAJuntaError
from hardlearn.fourier import BoolFn, LearningOracles
from hardlearn.learners import (
    CoinHypothesis,
    JuntaHypothesis,
    LinearHypothesis,
    MemoHypothesis,
    SignedPolynomialHypothesis,
    TableHypothesis,
    _gf2_solve,
    agreement,
    cheat_learner,
    gf2_linear_learner,
    harness_cheat_learner,
    hypothesis_matches,
    junta_learner,
    low_degree_learner,
    low_degree_sets,
    make_learner,
    memorizing_learner,
)
from hardlearn.prf import LazyRandomFunction, QueryBudget
from hardlearn.sampling import derive_rng_stream


def oracles_for(f, seed=0, budget=None):
    return LearningOracles.for_target(f, derive_rng_stream(seed), QueryBudget(budget))


def majority(k):
    return BoolFn(k, [int(bin(x).count("1") > k // 2) for x in range(1 << k)])


def test_gf2_solver():
    # z = 0b101: rows . z
    rows = [0b001, 0b010, 0b100, 0b111]
    rhs = [1, 0, 1, 0]
    z, rank, ok = _gf2_solve(rows, rhs, 3)
    assert (z, rank, ok) == (0b101, 3, True)
    _, _, ok = _gf2_solve([0b1, 0b1], [0, 1], 1)
    assert not ok


@pytest.mark.parametrize("s,c", [(0, 0), (0b1011, 1), (0xFFFF, 0), (0x8001, 1)])
def test_gf2_learner_recovers_parity(s, c):
    f = BoolFn.parity(16, s, c)
    rep = gf2_linear_learner(oracles_for(f, 1), 64)
    assert rep.exact and rep.hypothesis == LinearHypothesis(16, s, c)
    assert rep.oracle_calls_used == 64


def test_gf2_learner_best_affine_fallback():
    rep = gf2_linear_learner(oracles_for(majority(5), 2), 200)
    assert rep.exact is False and rep.info["consistent"] is False
    assert agreement(rep.hypothesis, majority(5), 5) == pytest.approx(0.6875)


def test_low_degree_sets():
    assert sorted(low_degree_sets(3, 1)) == [0, 1, 2, 4]
    assert len(list(low_degree_sets(6, 2))) == 1 + 6 + 15


def test_low_degree_exhaustive_on_majority():
    f = majority(5)
    rep = low_degree_learner(1, 0, oracles_for(f), exhaustive=True)
    assert rep.oracle_calls_used == 32
    # degree-1 sign approximation of majority is majority itself
    assert hypothesis_matches(rep.hypothesis, f)


def test_low_degree_tie_maps_to_zero():
    h = SignedPolynomialHypothesis(2, {1: 0.5, 2: 0.5})
    # x=1 gives -0.5 + 0.5 = 0, counted as +1 i.e. bit 0
    assert h.evaluate(1) == 0
    assert h.evaluate(3) == 1


def test_low_degree_degree_checked():
    with pytest.raises(InvalidParamsError):
        low_degree_learner(5, 10, oracles_for(majority(3)))


def test_junta_learner_exact():
    k = 12
    f = BoolFn(k, [((x >> 2) & 1) ^ (((x >> 7) & 1) & ((x >> 9) & 1)) for x in range(1 << k)])
    rep = junta_learner(3, oracles_for(f, 3), derive_rng_stream(4))
    assert rep.hypothesis.variables == (2, 7, 9)
    assert hypothesis_matches(rep.hypothesis, f)


def test_junta_learner_detects_non_junta():
    f = BoolFn.parity(10, 0b1111111)
    with pytest.raises(NotAJuntaError):
        junta_learner(3, oracles_for(f), derive_rng_stream(0))


def test_junta_learner_respects_budget():
    f = BoolFn.parity(8, 0b11)
    with pytest.raises(BudgetExceededError):
        junta_learner(2, oracles_for(f, budget=100), derive_rng_stream(0))


def test_memorizing_learner():
    f = LazyRandomFunction(8, derive_rng_stream(1))
    o = LearningOracles.for_target(f, derive_rng_stream(2), QueryBudget(16))
    rep = memorizing_learner(o, 16, derive_rng_stream(3))
    assert rep.oracle_calls_used == 16 and len(rep.hypothesis.memo) == 16
    for x, b in rep.hypothesis.memo.items():
        assert rep.hypothesis.evaluate(x) == b == f(x)
    full = memorizing_learner(oracles_for(BoolFn.parity(4, 3)), 100, derive_rng_stream(0))
    assert full.exact and hypothesis_matches(full.hypothesis, BoolFn.parity(4, 3))


def test_coin_hypothesis_balanced_and_deterministic():
    h = CoinHypothesis(12345)
    xs = np.arange(1 << 14)
    bits = h.evaluate_many(xs)
    assert np.array_equal(bits, CoinHypothesis(12345).evaluate_many(xs))
    assert abs(bits.mean() - 0.5) < 0.02


def test_cheat_learners():
    f = BoolFn(4, np.random.default_rng(0).integers(0, 2, size=16))
    assert hypothesis_matches(cheat_learner(f).hypothesis, f)
    o = LearningOracles.for_target(f, derive_rng_stream(0), planted=f)
    assert hypothesis_matches(harness_cheat_learner(o, derive_rng_stream(1)).hypothesis, f)
    plain = LearningOracles.for_target(f, derive_rng_stream(0))
    rep = harness_cheat_learner(plain, derive_rng_stream(1))
    assert isinstance(rep.hypothesis, CoinHypothesis) and rep.oracle_calls_used == 0


def test_make_learner_names():
    f = BoolFn.parity(8, 0b110)
    for name in ("gf2", "low-degree", "junta", "memorize", "cheat"):
        rep = make_learner(name)(oracles_for(f), derive_rng_stream(1))
        assert 0.0 <= agreement(rep.hypothesis, f, 8) <= 1.0
    with pytest.raises(ValueError):
        make_learner("oracle")


def test_hypothesis_serialisation_tags():
    hs = [TableHypothesis(2, np.array([0, 1, 1, 0])), LinearHypothesis(3, 5, 1),
          SignedPolynomialHypothesis(2, {1: 0.25}), JuntaHypothesis(4, (1, 3), np.array([0, 1, 1, 0])),
          MemoHypothesis(3, {1: 1}, 7), CoinHypothesis(9)]
    kinds = [h.to_dict()["kind"] for h in hs]
    assert kinds == ["truth_table", "linear", "signed_polynomial", "junta", "memo", "coin"]


def test_agreement_sampled_for_large_k():
    h = LinearHypothesis(20, 1)
    f = BoolFn.parity(20, 1)
    assert agreement(h, f, 20, derive_rng_stream(0), samples=1000) == 1.0
    with pytest.raises(ValueError):
        agreement(h, f, 20)
