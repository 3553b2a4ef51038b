"""Learner-to-distinguisher reductions and the hardness-theorem arithmetic.

Parameter reports work with base-2 logarithms throughout; every report can
be re-derived by ``*_exact`` twins that evaluate the same quantities with
mpmath at high precision, without taking logarithms first.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import mpmath
import numpy as np

from hardlearn.errors import InvalidParamsError
from hardlearn.fourier import BoolFn, LearningOracles
from hardlearn.lattice import AdvantageEstimate, estimate_advantage
from hardlearn.learners import LearnerReport, splitmix64
from hardlearn.pke import (
    Ciphertext,
    KeyPair,
    PkeParams,
    decode,
    encrypt_with,
    phase,
    pke_keygen,
)
from hardlearn.prf import LazyRandomFunction, PrfParams, QueryBudget, prf_keygen, prf_truth_table
from hardlearn.sampling import RngSeed, derive_rng_stream

# relative slack for comparing the two sides of an inequality in log space
LOG_RTOL = 1e-12


# --- learner -> PRF distinguisher -----------------------------------------------

@dataclass
class DistinguisherSpec:
    learner: Callable[[LearningOracles, np.random.Generator], LearnerReport]
    budget: int | None
    challenges: int = 1


@dataclass
class GameInstance:
    """One arm's function; ``cheat`` marks that the harness may reveal it."""

    target: object
    cheat: bool = False


def learner_to_prf_distinguisher(spec: DistinguisherSpec):
    """Distinguisher that trains the learner on its oracle and tests a fresh point.

    Outputs 1 iff the hypothesis agrees with the oracle on every one of
    ``spec.challenges`` fresh uniform inputs. A learner that raises
    (including on budget overrun) makes the distinguisher output 0.
    """

    def distinguish(instance: GameInstance, rng: np.random.Generator) -> int:
        target = instance.target
        oracle_rng, learner_rng, challenge_rng = rng.spawn(3)
        budget = QueryBudget(spec.budget)
        oracles = LearningOracles.for_target(target, oracle_rng, budget,
                                             planted=target if instance.cheat else None)
        try:
            report = spec.learner(oracles, learner_rng)
        except Exception:
            return 0
        xs = challenge_rng.integers(0, 1 << target.k, size=spec.challenges, dtype=np.int64)
        predicted = report.hypothesis.evaluate_many(xs)
        actual = np.array([target(int(x)) for x in xs], dtype=np.uint8)
        return int(np.array_equal(predicted, actual))

    return distinguish


def prf_family(params: PrfParams) -> Callable[[np.random.Generator], BoolFn]:
    def sample(rng):
        key = prf_keygen(params, rng)
        return BoolFn(params.k, prf_truth_table(key))
    return sample


def linear_family(k: int) -> Callable[[np.random.Generator], BoolFn]:
    def sample(rng):
        return BoolFn.parity(k, int(rng.integers(0, 1 << k)))
    return sample


def prf_distinguishing_game(spec: DistinguisherSpec, family_sampler, k: int, trials: int,
                            seed: RngSeed | int, workers: int = 1) -> AdvantageEstimate:
    """Advantage of the learner-built distinguisher: family vs. random functions."""
    D = learner_to_prf_distinguisher(spec)
    return estimate_advantage(
        D,
        lambda rng: GameInstance(family_sampler(rng), cheat=True),
        lambda rng: GameInstance(LazyRandomFunction(k, rng), cheat=False),
        trials,
        seed,
        workers=workers,
    )


def random_prediction_bound(k: int, queries: int) -> float:
    """Upper bound 1/2 + sqrt(k q / 2^k) on predicting a random function."""
    if k < 1 or queries < 0:
        raise InvalidParamsError("k >= 1 and queries >= 0", f"k={k}, queries={queries}")
    return min(1.0, 0.5 + math.sqrt(k * queries / 2.0 ** k))


def memorizer_success(k: int, queries: int) -> float:
    """Exact success of the memorising learner on a fresh uniform point."""
    return 0.5 + min(queries, 2 ** k) / 2.0 ** (k + 1)


# --- parameter reports ------------------------------------------------------

@dataclass
class Link:
    name: str
    lhs_log2: float
    rhs_log2: float
    relation: str = ">="

    @property
    def margin(self) -> float:
        return self.lhs_log2 - self.rhs_log2 if self.relation == ">=" else self.rhs_log2 - self.lhs_log2

    @property
    def passed(self) -> bool:
        scale = max(1.0, abs(self.lhs_log2), abs(self.rhs_log2))
        return self.margin >= -LOG_RTOL * scale

    def to_dict(self) -> dict:
        return {"name": self.name, "lhs_log2": self.lhs_log2, "rhs_log2": self.rhs_log2,
                "relation": self.relation, "margin_log2": self.margin, "pass": self.passed}


@dataclass
class ParamsReport:
    theorem: str
    inputs: dict
    derived: dict
    links: list[Link]
    flags: list[str] = field(default_factory=list)
    asymptotic: list[Link] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(link.passed for link in self.links) and not self.flags

    def link(self, name: str) -> Link:
        for ln in self.links + self.asymptotic:
            if ln.name == name:
                return ln
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "inputs": self.inputs,
            "derived": self.derived,
            "links": [ln.to_dict() for ln in self.links],
            "asymptotic_checks": [ln.to_dict() for ln in self.asymptotic],
            "flags": list(self.flags),
            "all_pass": self.all_pass,
        }


def _log2(x) -> float:
    return math.log2(x)


def corollary_feasibility(M: float, k: float, a: float, t_log2: float, beta: float) -> ParamsReport:
    """Check t(M) <= M^(D-a) and beta >= 2 sqrt(k / M^a) with D = k / log M.

    ``t_log2`` is log2 of the learner's running time (times can be huge).
    """
    if M < 2:
        raise InvalidParamsError("M >= 2", f"M={M}")
    lm = _log2(M)
    D = k / lm
    flags = []
    if not 2 <= D <= M / (4 * lm):
        flags.append(f"D={D!r} outside [2, M/(4 log M)]")
    links = [
        Link("time_le_M_pow_D_minus_a", (D - a) * lm, t_log2),
        Link("beta_ge_2sqrt_k_over_M_pow_a", _log2(beta), 1 + 0.5 * (_log2(k) - a * lm)),
    ]
    derived = {"D": D, "log2_M": lm}
    return ParamsReport("corollary", {"M": M, "k": k, "a": a, "t_log2": t_log2, "beta": beta},
                        derived, links, flags)


def corollary_feasibility_exact(M, k, a, t_log2, beta, dps: int = 60) -> dict:
    with mpmath.workdps(dps):
        M, k, a, beta = (mpmath.mpf(v) for v in (M, k, a, beta))
        D = k / mpmath.log(M, 2)
        return {
            "time_le_M_pow_D_minus_a": (mpmath.log(mpmath.power(M, D - a), 2), mpmath.mpf(t_log2)),
            "beta_ge_2sqrt_k_over_M_pow_a": (mpmath.log(beta, 2),
                                             mpmath.log(2 * mpmath.sqrt(k / mpmath.power(M, a)), 2)),
            "D": D,
        }


def default_time_log2(n: float) -> float:
    """log2 of the quasi-polynomial running time n^{log n} used when none is given."""
    return _log2(n) ** 2


def tc0_param_report(n: float, alpha: float, tau: float, delta: float,
                     t_log2: float | None = None) -> ParamsReport:
    """Parameter chain of the TC0 hardness theorem.

    k = log^alpha n, gamma = n^tau, log q = gamma k/(k+1), M = (k+1) log q,
    D = k / log M, a = 2(delta+1)/tau, beta = n^-delta.
    """
    flags = []
    if not alpha > 2:
        flags.append("precondition alpha > 2 violated")
    if not 0 < tau < 1:
        flags.append("precondition 0 < tau < 1 violated")
    if not delta > 0:
        flags.append("precondition delta > 0 violated")
    ln_ = _log2(n)
    k = ln_ ** alpha
    log_gamma = tau * ln_
    log_q = 2.0 ** log_gamma * k / (k + 1)
    lM = log_gamma + alpha * _log2(ln_)  # log2(gamma * k)
    D = k / lM
    a = 2 * (delta + 1) / tau
    log_beta = -delta * ln_
    if t_log2 is None:
        t_log2 = default_time_log2(n)
    bound_ca = -(tau * a / 2 - 1) * ln_
    key_term = 1 + 0.5 * (alpha * (1 - a) * _log2(ln_) - tau * a * ln_)
    links = [
        Link("beta_ge_n_pow_minus_ca_half_plus_1", log_beta, bound_ca),
        Link("n_pow_ca_bound_ge_2sqrt_k_over_M_pow_a", bound_ca, key_term),
        Link("beta_ge_2sqrt_k_over_M_pow_a", log_beta, 1 + 0.5 * (_log2(k) - a * lM)),
        Link("D_ge_2", _log2(D) if D > 0 else -math.inf, 1.0),
        Link("D_le_M_over_4logM", _log2(D) if D > 0 else -math.inf, lM - 2 - _log2(lM), "<="),
        Link("D_minus_a_positive", D - a, 0.0),
        Link("M_pow_D_minus_a_ge_t", (D - a) * lM, t_log2),
    ]
    # the proof's closed-form lower bound on D - a only holds once tau log n >= alpha log log n
    asymptotic = [Link("D_minus_a_ge_logn_pow_alpha_minus_1_over_2tau", D - a, ln_ ** (alpha - 1) / (2 * tau))]
    derived = {"k": k, "log2_gamma": log_gamma, "log2_q": log_q, "log2_M": lM, "D": D, "a": a,
               "log2_beta": log_beta, "log2_t": t_log2}
    return ParamsReport("tc0", {"n": n, "alpha": alpha, "tau": tau, "delta": delta}, derived, links,
                        flags, asymptotic)


def tc0_param_report_exact(n, alpha, tau, delta, t_log2=None, dps: int = 80) -> dict:
    """Same chain as ``tc0_param_report`` evaluated on the raw quantities."""
    with mpmath.workdps(dps):
        n, alpha, tau, delta = (mpmath.mpf(v) for v in (n, alpha, tau, delta))
        lg = lambda x: mpmath.log(x, 2)  # noqa: E731
        logn = lg(n)
        k = mpmath.power(logn, alpha)
        gamma = mpmath.power(n, tau)
        M = gamma * k
        D = k / lg(M)
        a = 2 * (delta + 1) / tau
        beta = mpmath.power(n, -delta)
        t = mpmath.power(2, mpmath.mpf(t_log2) if t_log2 is not None else logn ** 2)
        ca = mpmath.power(n, -(tau * a / 2 - 1))
        return {
            "k": k, "log2_M": lg(M), "D": D, "a": a,
            "beta_ge_n_pow_minus_ca_half_plus_1": (lg(beta), lg(ca)),
            "n_pow_ca_bound_ge_2sqrt_k_over_M_pow_a": (
                lg(ca), lg(2 * mpmath.sqrt(mpmath.power(logn, alpha * (1 - a)) / mpmath.power(n, tau * a)))),
            "beta_ge_2sqrt_k_over_M_pow_a": (lg(beta), lg(2 * mpmath.sqrt(k / mpmath.power(M, a)))),
            "D_ge_2": (lg(D), mpmath.mpf(1)),
            "D_le_M_over_4logM": (lg(D), lg(M / (4 * lg(M)))),
            "D_minus_a_positive": (D - a, mpmath.mpf(0)),
            "M_pow_D_minus_a_ge_t": (lg(mpmath.power(M, D - a)), lg(t)),
        }


def ac0_param_report(n: float, c: float, eta: float, a: float,
                     beta_log2: float | None = None) -> ParamsReport:
    """Parameter chain of the AC0 hardness theorem.

    d = log^c n, k = d^(1/eta), log q = k^2 log d/(k+1), M = k^2 log d,
    D = sqrt(M)/log M, t = 2^(d^(1/eta)). ``beta_log2`` defaults to the
    smallest bias the theorem allows, 2 (log n)^{c(1-2a)/(2 eta)}.
    """
    flags = []
    if not c > eta > 2:
        flags.append("precondition c > eta > 2 violated")
    elif not c / eta > 2:
        flags.append("precondition c/eta > 2 violated")
    if not a >= 2:
        flags.append("precondition a >= 2 violated")
    ln_ = _log2(n)
    log_d = c * _log2(ln_)
    d = 2.0 ** log_d
    log_k = log_d / eta
    k = 2.0 ** log_k
    log_q = k * k * log_d / (k + 1)
    M = k * k * log_d
    lM = _log2(M)
    D = math.sqrt(M) / lM
    t_log2 = k  # log2 of 2^(d^(1/eta))
    min_beta = 1 + c * (1 - 2 * a) / (2 * eta) * _log2(ln_)
    if beta_log2 is None:
        beta_log2 = min_beta
    key_term = 1 + 0.5 * (log_k - a * lM)
    links = [
        Link("beta_ge_theorem_minimum", beta_log2, min_beta),
        Link("theorem_minimum_ge_2sqrt_k_over_M_pow_a", min_beta, key_term),
        Link("D_ge_2", _log2(D), 1.0),
        Link("D_le_M_over_4logM", _log2(D), lM - 2 - _log2(lM), "<="),
        Link("D_minus_a_logM_ge_sqrtM_over_2", _log2(max(D - a, 1e-300) * lM), 0.5 * lM - 1),
        Link("sqrtM_over_2_ge_k_sqrt_logd_over_2", 0.5 * lM - 1, log_k + 0.5 * _log2(log_d) - 1),
        Link("k_sqrt_logd_over_2_ge_k", log_k + 0.5 * _log2(log_d) - 1, log_k),
        Link("M_pow_D_minus_a_ge_t", _log2(max(D - a, 1e-300)) + _log2(lM), _log2(t_log2)),
    ]
    derived = {"d": d, "log2_d": log_d, "k": k, "log2_q": log_q, "M": M, "log2_M": lM, "D": D,
               "D_times_log2_M": D * lM, "log2_t": t_log2, "log2_beta": beta_log2,
               "nu_max": c / eta - 1}
    return ParamsReport("ac0", {"n": n, "c": c, "eta": eta, "a": a}, derived, links, flags)


def ac0_param_report_exact(n, c, eta, a, beta_log2=None, dps: int = 80) -> dict:
    with mpmath.workdps(dps):
        n, c, eta, a = (mpmath.mpf(v) for v in (n, c, eta, a))
        lg = lambda x: mpmath.log(x, 2)  # noqa: E731
        logn = lg(n)
        d = mpmath.power(logn, c)
        k = mpmath.power(d, 1 / eta)
        M = k * k * lg(d)
        D = mpmath.sqrt(M) / lg(M)
        t = mpmath.power(2, k)
        min_beta = 2 * mpmath.power(logn, c * (1 - 2 * a) / (2 * eta))
        beta = min_beta if beta_log2 is None else mpmath.power(2, beta_log2)
        return {
            "d": d, "k": k, "M": M, "D": D,
            "beta_ge_theorem_minimum": (lg(beta), lg(min_beta)),
            "theorem_minimum_ge_2sqrt_k_over_M_pow_a": (lg(min_beta), lg(2 * mpmath.sqrt(k / mpmath.power(M, a)))),
            "D_ge_2": (lg(D), mpmath.mpf(1)),
            "D_le_M_over_4logM": (lg(D), lg(M / (4 * lg(M)))),
            "D_minus_a_logM_ge_sqrtM_over_2": (lg((D - a) * lg(M)), lg(mpmath.sqrt(M) / 2)),
            "sqrtM_over_2_ge_k_sqrt_logd_over_2": (lg(mpmath.sqrt(M) / 2), lg(k * mpmath.sqrt(lg(d)) / 2)),
            "k_sqrt_logd_over_2_ge_k": (lg(k * mpmath.sqrt(lg(d)) / 2), lg(k)),
            # both sides as log2(log2(.)): M^(D-a) and 2^k overflow any float
            "M_pow_D_minus_a_ge_t": (lg(lg(mpmath.power(M, D - a))), lg(lg(t))),
        }


def compare_with_exact(report: ParamsReport, exact: dict) -> float:
    """Largest relative disagreement between report links and the exact twin."""
    worst = 0.0
    for link in report.links:
        lhs, rhs = exact[link.name]
        for got, want in ((link.lhs_log2, lhs), (link.rhs_log2, rhs)):
            want = float(want)
            err = abs(got - want) / max(abs(want), 1e-300) if want != 0 else abs(got)
            worst = max(worst, err)
    return worst


# --- learner -> PKE adversary -------------------------------------------------------

def example_state_gap(t: int, L: int) -> float:
    """t * || psi_ideal - psi_real ||^2 = t (2 - 2 sqrt((L-1)/L))."""
    if L < 2:
        raise InvalidParamsError("L >= 2", f"L={L}")
    if t < 0:
        raise InvalidParamsError("t >= 0", f"t={t}")
    # 2 - 2 sqrt(1 - 1/L) written without cancellation
    single = 2.0 / L / (1.0 + math.sqrt((L - 1) / L))
    return t * single


class MultisetExampleOracle:
    """Uniform draws (with replacement) from a fixed labelled multiset."""

    def __init__(self, examples: list[tuple[Ciphertext, int]], rng: np.random.Generator,
                 budget: QueryBudget | None = None):
        self.examples = examples
        self.rng = rng
        self.budget = budget
        self.draws = 0

    def draw_many(self, n: int) -> list[tuple[Ciphertext, int]]:
        if self.budget is not None:
            self.budget.charge(n)
        self.draws += n
        idx = self.rng.integers(0, len(self.examples), size=n)
        return [self.examples[i] for i in idx]


@dataclass
class PkeLearnerContext:
    """What a PKE-side learner may see; ``keypair`` is exposed only to cheats."""

    params: PkeParams
    public: object
    keypair: KeyPair | None = None


def pke_cheat_learner(ex: MultisetExampleOracle, draws: int, rng, ctx: PkeLearnerContext):
    kp = ctx.keypair
    q = ctx.params.q
    return lambda ct: decode(phase(kp.s, ct, q), q)


def pke_coin_learner(ex: MultisetExampleOracle, draws: int, rng, ctx: PkeLearnerContext):
    salt = int(rng.integers(0, 1 << 63))
    return lambda ct: splitmix64((hash(ct.key()) ^ salt) & ((1 << 64) - 1)) & 1


def pke_memorizing_learner(ex: MultisetExampleOracle, draws: int, rng, ctx: PkeLearnerContext):
    memo = {ct.key(): b for ct, b in ex.draw_many(draws)}
    salt = int(rng.integers(0, 1 << 63))

    def h(ct):
        hit = memo.get(ct.key())
        if hit is not None:
            return hit
        return splitmix64(hash(ct.key()) ^ salt) & 1

    return h


PKE_LEARNERS = {
    "cheat": pke_cheat_learner,
    "coin": pke_coin_learner,
    "memorize": pke_memorizing_learner,
}


@dataclass
class PkeAdversarySpec:
    learner: Callable
    L: int = 256
    draws: int = 64  # t(n): examples handed to the learner

    def __post_init__(self):
        if self.L < 2:
            raise InvalidParamsError("L >= 2", f"L={self.L}")


def learner_to_pke_adversary(spec: PkeAdversarySpec, params: PkeParams, trials: int,
                             seed: RngSeed | int) -> dict:
    """Monte-Carlo success of the training-set adversary against the scheme.

    Per trial: fresh keys, a challenge encryption e* of a uniform bit b*, and
    L-1 fresh (r, b) pairs forming the training multiset; the learner sees
    uniform draws from that multiset and its hypothesis is applied to e*.
    """
    if trials < 1:
        raise InvalidParamsError("trials >= 1", f"trials={trials}")
    hits = 0
    failures = 0
    dec_errors = 0
    q, m = params.q, params.m
    for i in range(trials):
        key_rng, chal_rng, train_rng, draw_rng, learn_rng = (
            derive_rng_stream(seed, (i, j)) for j in range(5))
        kp = pke_keygen(params, key_rng)
        b_star = int(chal_rng.integers(0, 2))
        e_star = encrypt_with(kp, b_star, chal_rng.integers(0, 2, size=m))
        dec_errors += decode(phase(kp.s, e_star, q), q) != b_star
        training = []
        for _ in range(spec.L - 1):
            b = int(train_rng.integers(0, 2))
            training.append((encrypt_with(kp, b, train_rng.integers(0, 2, size=m)), b))
        ex = MultisetExampleOracle(training, draw_rng, QueryBudget(spec.draws))
        ctx = PkeLearnerContext(params, kp.public, kp)
        try:
            h = spec.learner(ex, spec.draws, learn_rng, ctx)
            guess = int(h(e_star))
        except Exception:
            failures += 1
            guess = int(learn_rng.integers(0, 2))
        hits += guess == b_star
    p = hits / trials
    se = math.sqrt(p * (1 - p) / trials)
    err = dec_errors / trials
    return {
        "trials": trials,
        "success": p,
        "stderr": se,
        "ci": [max(0.0, p - 1.96 * se), min(1.0, p + 1.96 * se)],
        "advantage": abs(2 * p - 1),
        "learner_failures": failures,
        "decryption_error_rate": err,
        "L": spec.L,
        "draws": spec.draws,
        "example_state_gap": example_state_gap(spec.draws, spec.L),
    }


def random_prediction_experiment(k: int, queries: int, challenges: int, seed: RngSeed | int,
                                 learner=None) -> dict:
    """Success of a learner at predicting fresh random functions on a fresh point.

    Each challenge draws a new lazily sampled random function, lets the learner
    (memorising by default) spend ``queries`` membership queries, then checks a
    uniform x*. Compared against the closed form and the lemma's bound.
    """
    from hardlearn.learners import memorizing_learner

    if learner is None:
        learner = lambda o, rng: memorizing_learner(o, queries, rng)  # noqa: E731
    hits = 0
    for i in range(challenges):
        fn_rng, oracle_rng, learn_rng, x_rng = (derive_rng_stream(seed, (i, j)) for j in range(4))
        f = LazyRandomFunction(k, fn_rng)
        oracles = LearningOracles.for_target(f, oracle_rng, QueryBudget(queries))
        h = learner(oracles, learn_rng).hypothesis
        x = int(x_rng.integers(0, 1 << k))
        hits += h.evaluate(x) == f(x)
    p = hits / challenges
    expected = memorizer_success(k, queries)
    sigma = math.sqrt(expected * (1 - expected) / challenges)
    return {
        "k": k,
        "queries": queries,
        "challenges": challenges,
        "success": p,
        "expected": expected,
        "sigma": sigma,
        "z": (p - expected) / sigma if sigma > 0 else 0.0,
        "bound": random_prediction_bound(k, queries),
        "within_bound": p <= random_prediction_bound(k, queries) + 3 * sigma,
    }
