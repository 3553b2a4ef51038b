"""Command-line experiment runner.

Every subcommand resolves an ``ExperimentConfig`` (preset, then config file,
then ``--set key=value`` pairs, then explicit flags), runs one operation and
emits a ``ResultRecord`` as canonical JSON on stdout or to ``--out``.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from hardlearn import __version__
from hardlearn.errors import HardlearnError, InvalidParamsError
from hardlearn.ring import is_power_of_two

SEED_ENV = "HARDLEARN_SEED"

PRESETS: dict[str, dict] = {
    "desk-prf": {"d": 8, "k": 16, "q": 1 << 20, "p": 4, "sigma": 3.0, "secret": "gaussian"},
    "desk-pke": {"d": 32, "m": 300, "q": 1 << 15, "sigma": 10.0},
    # inputs to the theorem arithmetic only; nothing here is instantiable at desk scale
    "paper-asymptotic": {"n_log2": 20, "alpha": 3.0, "tau": 0.5, "delta": 1.0,
                         "ac0_n_log2": 32, "c": 5.0, "eta": 2.25, "a": 2.0},
}
PRESET_ALIASES = {"desk": None, "paper": "paper-asymptotic"}
ASYMPTOTIC_WARNING = "paper-asymptotic parameters feed the theorem arithmetic only"

INT_KEYS = {"d", "q", "m", "p", "k", "tail_bound", "trials", "seed", "budget", "L", "draws",
            "n_log2", "ac0_n_log2", "queries", "count", "workers", "n_examples", "degree", "j",
            "challenges", "bit", "x", "n_samples"}
FLOAT_KEYS = {"sigma", "alpha", "tau", "delta", "c", "eta", "a", "t_log2", "beta_log2"}


@dataclass
class ExperimentConfig:
    values: dict = field(default_factory=dict)
    preset: str | None = None
    warnings: list = field(default_factory=list)

    def get(self, key, default=None):
        return self.values.get(key, default)

    def require(self, key):
        if key not in self.values:
            raise InvalidParamsError(f"{key} is set", "pass it as a flag, --set or in the config file")
        return self.values[key]


@dataclass
class ResultRecord:
    config: dict
    seed: int
    metrics: dict
    wall_time: float = 0.0
    tool_version: str = __version__

    def to_dict(self) -> dict:
        return {"tool_version": self.tool_version, "config": self.config, "seed": self.seed,
                "metrics": self.metrics, "wall_time": self.wall_time}


# --- canonical JSON -------------------------------------------------------------

def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _encode(obj) -> str:
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isfinite(obj):
            text = format(obj, ".17g")
            # keep floats recognisable as floats after a round trip
            return text if any(ch in text for ch in ".en") else text + ".0"
        return json.dumps(repr(obj))
    if isinstance(obj, list):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(json.dumps(k) + ":" + _encode(v) for k, v in items) + "}"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def canonical_json(obj) -> str:
    """Sorted keys, no whitespace, floats with 17 significant digits."""
    return _encode(_plain(obj))


def write_result(record: ResultRecord | dict, path: str | None = None) -> str:
    data = record.to_dict() if isinstance(record, ResultRecord) else record
    text = canonical_json(data) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)
    return text


# --- configuration -----------------------------------------------------------------

def parse_kv_text(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParamsError("config lines are key=value", f"line {lineno}: {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = value
    return out


def _coerce(key: str, value):
    if value is None or not isinstance(value, str):
        return value
    try:
        if key in INT_KEYS:
            return int(value, 0)
        if key in FLOAT_KEYS:
            return float(value)
    except ValueError:
        raise InvalidParamsError(f"{key} is numeric", f"got {value!r}") from None
    return value


def resolve_preset(name: str | None, command: str | None = None) -> str | None:
    if name is None:
        return None
    if name in PRESET_ALIASES:
        alias = PRESET_ALIASES[name]
        if alias is None:
            alias = {"pke": "desk-pke"}.get(command, "desk-prf")
        name = alias
    if name not in PRESETS:
        raise InvalidParamsError(f"preset is one of {sorted(PRESETS)}", f"got {name!r}")
    return name


def validate_config(values: dict):
    q, p = values.get("q"), values.get("p")
    if q is not None and q < 2:
        raise InvalidParamsError("q >= 2", f"q={q}")
    if p is not None and q is not None:
        if not is_power_of_two(q):
            raise InvalidParamsError("q is a power of two when rounding to p", f"q={q}, p={p}")
        if not (is_power_of_two(p) and 2 <= p <= q):
            raise InvalidParamsError("p is a power of two with 2 <= p <= q", f"q={q}, p={p}")
    if values.get("sigma") is not None and values["sigma"] < 0:
        raise InvalidParamsError("sigma >= 0", f"sigma={values['sigma']}")


def load_config(path: str | None = None, preset: str | None = None, overrides: dict | None = None,
                flags: dict | None = None, command: str | None = None) -> ExperimentConfig:
    """Merge preset < file < overrides < flags, then validate."""
    name = resolve_preset(preset, command)
    values: dict = dict(PRESETS[name]) if name else {}
    if path is not None:
        with open(path) as fh:
            file_values = parse_kv_text(fh.read())
        if name is None and "preset" in file_values:
            name = resolve_preset(file_values.pop("preset"), command)
            values = {**PRESETS[name], **values}
        file_values.pop("preset", None)
        values.update({k: _coerce(k, v) for k, v in file_values.items()})
    for k, v in (overrides or {}).items():
        values[k] = _coerce(k, v)
    for k, v in (flags or {}).items():
        if v is not None:
            values[k] = _coerce(k, v)
    validate_config(values)
    cfg = ExperimentConfig(values, name)
    if name == "paper-asymptotic":
        cfg.warnings.append(ASYMPTOTIC_WARNING)
    return cfg


def resolve_seed(cfg: ExperimentConfig) -> int:
    seed = cfg.get("seed")
    if seed is None:
        env = os.environ.get(SEED_ENV)
        seed = int(env, 0) if env else 0
    if not 0 <= seed < 1 << 64:
        raise InvalidParamsError("seed fits in 64 unsigned bits", f"seed={seed}")
    return seed


# --- shared builders ---------------------------------------------------------------

def _gaussian(cfg):
    from hardlearn.sampling import GaussianParams
    return GaussianParams(float(cfg.require("sigma")), cfg.get("tail_bound"))


def _prf_params(cfg):
    from hardlearn.prf import PrfParams
    secret = cfg.get("secret", "uniform")
    if secret not in ("uniform", "gaussian"):
        raise InvalidParamsError("secret is uniform or gaussian", f"got {secret!r}")
    g = _gaussian(cfg) if secret == "gaussian" else None
    return PrfParams(cfg.require("d"), cfg.require("q"), cfg.require("p"), cfg.require("k"), g)


def _pke_params(cfg):
    from hardlearn.pke import PkeParams
    return PkeParams(cfg.require("d"), cfg.require("q"), cfg.require("m"), _gaussian(cfg))


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _write_text(path: str, text: str):
    with open(path, "w") as fh:
        fh.write(text)


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


class _HashingWriter(io.TextIOBase):
    """Text sink that hashes everything written and forwards it."""

    def __init__(self, fh):
        self.fh = fh
        self.digest = hashlib.sha256()

    def write(self, s):
        self.digest.update(s.encode())
        return self.fh.write(s)


# --- subcommands ------------------------------------------------------------------

def cmd_selftest(args, cfg, seed):
    from hardlearn import kernels
    from hardlearn.fourier import BoolFn, wht_spectrum, wht_unscaled
    from hardlearn.ring import (
        RingElem,
        RingParams,
        ring_add,
        ring_mul,
        round_coeff,
        round_elem,
        sample_uniform_ring,
    )
    from hardlearn.sampling import derive_rng_stream

    rng = derive_rng_stream(seed, 0)
    checks = {}
    ok_mul = ok_law = True
    for d, q in ((4, 257), (8, 1 << 10), (64, 1 << 16), (16, (1 << 64) - 59)):
        ring = RingParams(d, q)
        for _ in range(20):
            a, b, c = (sample_uniform_ring(ring, rng) for _ in range(3))
            ok_mul &= ring_mul(a, b) == ring_mul(a, b, method="schoolbook")
            ok_law &= ring_mul(a, b) == ring_mul(b, a)
            ok_law &= ring_mul(a, ring_add(b, c)) == ring_add(ring_mul(a, b), ring_mul(a, c))
    checks["ring_mul_matches_schoolbook"] = ok_mul
    checks["ring_laws"] = ok_law
    q, p = 1 << 16, 1 << 4
    xs = np.arange(q, dtype=np.uint64)
    elem = RingElem(RingParams(q, q), xs)
    expect = [((p * x + q // 2) // q) % p for x in range(q)]
    checks["rounding_exhaustive"] = round_elem(elem, p).to_list() == expect
    checks["rounding_identity_p_eq_q"] = all(round_coeff(x, 64, 64) == x for x in range(64))
    ok_parseval = ok_double = ok_point = True
    for _ in range(10):
        f = BoolFn(10, rng.integers(0, 2, size=1 << 10))
        ok_parseval &= abs(wht_spectrum(f).parseval() - 1.0) <= 1e-9
        signs = f.signs()
        ok_double &= np.array_equal(wht_unscaled(wht_unscaled(signs)), signs * (1 << 10))
        s = int(rng.integers(0, 1 << 10))
        spec = wht_spectrum(BoolFn.parity(10, s))
        ok_point &= spec.coeffs[s] == 1.0 and np.count_nonzero(spec.coeffs) == 1
    checks["parseval"] = ok_parseval
    checks["double_wht"] = ok_double
    checks["linear_point_mass"] = ok_point
    checks["backend"] = kernels.BACKEND
    passed = all(v for k, v in checks.items() if k != "backend")
    return {"checks": checks, "pass": passed}, 0 if passed else 1


def cmd_gen(args, cfg, seed):
    from hardlearn.lattice import (
        UNIFORM,
        LweParams,
        Planted,
        batch_header,
        iter_lwe_samples,
        iter_rlwe_samples,
        iter_rlwr_samples,
        write_batch,
    )
    from hardlearn.ring import RingParams, sample_uniform_ring, uniform_residues
    from hardlearn.sampling import derive_rng_stream

    kind = args.kind
    d, q, m = cfg.require("d"), cfg.require("q"), cfg.require("m")
    secret_rng, sample_rng = derive_rng_stream(seed, 0), derive_rng_stream(seed, 1)
    planted = args.source == "planted"
    p = None
    if kind == "lwe":
        params = LweParams(d, q, m, _gaussian(cfg))
        source = Planted(uniform_residues(secret_rng, q, d)) if planted else UNIFORM
        samples = iter_lwe_samples(params, source, sample_rng)
    else:
        ring = RingParams(d, q)
        source = Planted(sample_uniform_ring(ring, secret_rng)) if planted else UNIFORM
        if kind == "rlwe":
            samples = iter_rlwe_samples(ring, _gaussian(cfg), m, source, sample_rng)
        else:
            p = cfg.require("p")
            samples = iter_rlwr_samples(ring, p, m, source, sample_rng)
    header = batch_header(kind, d, q, m, p)
    if args.samples is None or args.samples == "-":
        sink = _HashingWriter(io.StringIO())
        n = write_batch(sink, header, samples)
        if args.samples == "-":
            sys.stderr.write(sink.fh.getvalue())
    else:
        with open(args.samples, "w") as fh:
            sink = _HashingWriter(fh)
            n = write_batch(sink, header, samples)
    return {"kind": kind, "source": args.source, "count": n, "header": header,
            "sha256": sink.digest.hexdigest()}, 0


def cmd_prf(args, cfg, seed):
    from hardlearn.prf import (
        dump_key,
        load_key,
        prf_eval_bit,
        prf_keygen,
        prf_truth_table,
        qprf_regime,
    )
    from hardlearn.sampling import derive_rng_stream

    action = args.action
    if action == "keygen":
        params = _prf_params(cfg)
        key = prf_keygen(params, derive_rng_stream(seed, 0))
        text = dump_key(key)
        if args.key:
            _write_text(args.key, text)
        return {"params": params.header(), "key_sha256": _sha256(text)}, 0
    if action == "regime":
        return qprf_regime(_prf_params(cfg)), 0
    if args.key:
        key = load_key(_read(args.key))
    else:
        key = prf_keygen(_prf_params(cfg), derive_rng_stream(seed, 0))
    if action == "eval":
        x = cfg.require("x")
        return {"x": x, "bit": prf_eval_bit(key, x)}, 0
    table = prf_truth_table(key)
    if args.table:
        _write_text(args.table, table.dumps())
    ones = int(table.bits.sum())
    n = 1 << key.params.k
    metrics = {"k": key.params.k, "ones": ones, "fraction_ones": ones / n,
               "monobit_z": (ones - n / 2) / math.sqrt(n / 4), "table_sha256": _sha256(table.dumps())}
    if n <= 1 << 12:
        metrics["hex"] = table.to_hex()
    return metrics, 0


def _parse_ct(text: str):
    from hardlearn.pke import Ciphertext
    return Ciphertext.from_csv(text)


def cmd_pke(args, cfg, seed):
    from hardlearn.pke import (
        dump_keypair,
        estimate_decryption_error,
        load_keypair,
        pke_decrypt,
        pke_encrypt,
        pke_keygen,
    )
    from hardlearn.sampling import derive_rng_stream

    action = args.action
    if action == "error-rate":
        params = _pke_params(cfg)
        trials = cfg.get("trials", 1000)
        res = estimate_decryption_error(params, trials, seed)
        out = res.to_dict()
        out["noise_budget"] = params.noise_budget()
        out["correctness_condition"] = params.correctness_condition()
        return out, 0
    if action == "keygen":
        params = _pke_params(cfg)
        kp = pke_keygen(params, derive_rng_stream(seed, 0))
        text = dump_keypair(kp)
        if args.key:
            _write_text(args.key, text)
        return {"params": params.header(), "key_sha256": _sha256(text)}, 0
    if not args.key:
        raise InvalidParamsError("--key names a key file", f"pke {action} needs a key")
    kp = load_keypair(_read(args.key))
    if action == "enc":
        bit = cfg.require("bit")
        ct = pke_encrypt(kp, bit, derive_rng_stream(seed, 1))
        if args.ct:
            _write_text(args.ct, ct.to_csv() + "\n")
        return {"bit": bit, "ciphertext": ct.to_csv()}, 0
    if not args.ct:
        raise InvalidParamsError("--ct names a ciphertext file", "pke dec needs a ciphertext")
    ct = _parse_ct(_read(args.ct))
    return {"bit": pke_decrypt(kp, ct, rule=args.rule), "rule": args.rule}, 0


def _learner_kwargs(cfg) -> dict:
    names = {"n_examples": "n_examples", "degree": "degree", "n_samples": "n_samples", "j": "j",
             "queries": "queries"}
    return {dst: cfg.get(src) for src, dst in names.items() if cfg.get(src) is not None}


def cmd_learn(args, cfg, seed):
    from hardlearn.fourier import BoolFn, LearningOracles
    from hardlearn.learners import agreement, make_learner
    from hardlearn.prf import QueryBudget
    from hardlearn.sampling import derive_rng_stream

    target = BoolFn(*_load_table(args.target))
    budget = QueryBudget(cfg.get("budget"))
    oracles = LearningOracles.for_target(target, derive_rng_stream(seed, 0), budget)
    learner = make_learner(args.algo, **_learner_kwargs(cfg))
    report = learner(oracles, derive_rng_stream(seed, 1))
    out = report.to_dict()
    out.pop("wall_time", None)
    out["agreement"] = agreement(report.hypothesis, target, target.k, derive_rng_stream(seed, 2))
    out["budget"] = budget.limit
    return out, 0


def _load_table(path):
    from hardlearn.prf import TruthTable
    table = TruthTable.loads(_read(path))
    return table.k, table


def cmd_fourier(args, cfg, seed):
    from hardlearn.fourier import BoolFn, fourier_sample, wht_spectrum
    from hardlearn.sampling import derive_rng_stream

    target = BoolFn(*_load_table(args.target))
    spec = wht_spectrum(target)
    if args.csv:
        _write_text(args.csv, spec.to_csv())
    top = np.argsort(-spec.weights, kind="stable")[:8]
    out = {"k": target.k, "parseval": spec.parseval(),
           "top": [{"S": int(s), "coefficient": float(spec.coeffs[s])} for s in top],
           "spectrum_sha256": _sha256(spec.to_csv())}
    n = cfg.get("n_samples")
    if n:
        out["samples"] = fourier_sample(spec, derive_rng_stream(seed, 0), n)
    return out, 0


def cmd_reduce(args, cfg, seed):
    from hardlearn import reductions as red

    action = args.action
    if action == "bound":
        k, queries = cfg.require("k"), cfg.require("queries")
        return {"k": k, "queries": queries, "bound": red.random_prediction_bound(k, queries),
                "memorizer_success": red.memorizer_success(k, queries)}, 0
    if action == "params-tc0":
        n_log2 = cfg.get("n_log2", 20)
        rep = red.tc0_param_report(2.0 ** n_log2, cfg.get("alpha", 3.0), cfg.get("tau", 0.5),
                                   cfg.get("delta", 1.0), cfg.get("t_log2"))
        exact = red.tc0_param_report_exact(2.0 ** n_log2, cfg.get("alpha", 3.0), cfg.get("tau", 0.5),
                                           cfg.get("delta", 1.0), cfg.get("t_log2"))
        out = rep.to_dict()
        out["max_rel_error_vs_exact"] = red.compare_with_exact(rep, exact)
        return out, 0 if rep.all_pass else 1
    if action == "params-ac0":
        n_log2 = cfg.get("ac0_n_log2", cfg.get("n_log2", 32))
        argv = (2.0 ** n_log2, cfg.get("c", 5.0), cfg.get("eta", 2.25), cfg.get("a", 2.0),
                cfg.get("beta_log2"))
        rep = red.ac0_param_report(*argv)
        out = rep.to_dict()
        out["max_rel_error_vs_exact"] = red.compare_with_exact(rep, red.ac0_param_report_exact(*argv))
        return out, 0 if rep.all_pass else 1
    if action == "prf-dist":
        from hardlearn.learners import make_learner
        family = args.family
        if family == "linear":
            k = cfg.require("k")
            sampler = red.linear_family(k)
        else:
            params = _prf_params(cfg)
            k = params.k
            sampler = red.prf_family(params)
        spec = red.DistinguisherSpec(make_learner(args.learner, **_learner_kwargs(cfg)),
                                     cfg.get("budget"), cfg.get("challenges", 1))
        est = red.prf_distinguishing_game(spec, sampler, k, cfg.get("trials", 200), seed,
                                          workers=cfg.get("workers", 1))
        out = est.to_dict()
        out.update({"family": family, "learner": args.learner, "k": k, "budget": spec.budget,
                    "random_prediction_bound": red.random_prediction_bound(k, spec.budget)
                    if spec.budget is not None else None})
        return out, 0
    if action == "pke-adv":
        params = _pke_params(cfg)
        spec = red.PkeAdversarySpec(red.PKE_LEARNERS[args.learner], cfg.get("L", 256), cfg.get("draws", 64))
        out = red.learner_to_pke_adversary(spec, params, cfg.get("trials", 200), seed)
        out["learner"] = args.learner
        return out, 0
    raise InvalidParamsError("known reduce action", action)


COMMANDS = {
    "selftest": cmd_selftest,
    "gen": cmd_gen,
    "prf": cmd_prf,
    "pke": cmd_pke,
    "learn": cmd_learn,
    "fourier": cmd_fourier,
    "reduce": cmd_reduce,
}


# --- argument parsing ---------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("experiment")
    g.add_argument("--config", help="key=value config file")
    g.add_argument("--preset", help="desk-prf, desk-pke, paper-asymptotic (or desk)")
    g.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="config override")
    g.add_argument("--seed", type=lambda s: int(s, 0), help=f"master seed (fallback ${SEED_ENV})")
    g.add_argument("--out", help="write the result record here instead of stdout")
    for name in ("d", "q", "m", "p", "k", "trials", "budget", "queries", "tail-bound", "n-examples",
                 "degree", "j", "L", "draws", "workers", "challenges", "n-samples", "x", "bit"):
        g.add_argument(f"--{name}", type=lambda s: int(s, 0), default=None)
    for name in ("sigma", "alpha", "tau", "delta", "c", "eta", "a", "n-log2", "t-log2", "beta-log2"):
        g.add_argument(f"--{name}", type=float, default=None)
    g.add_argument("--secret", choices=("uniform", "gaussian"))
    return common


FLAG_KEYS = ("d", "q", "m", "p", "k", "trials", "budget", "queries", "tail_bound", "n_examples", "degree",
             "j", "L", "draws", "workers", "challenges", "n_samples", "x", "bit", "sigma", "alpha", "tau",
             "delta", "c", "eta", "a", "n_log2", "t_log2", "beta_log2", "secret", "seed")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="hardlearn", description="Desk-scale lattice PRFs, PKE and "
                                     "learning reductions.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("selftest", parents=[common], help="ring and Fourier invariant suites")

    gen = sub.add_parser("gen", parents=[common], help="stream an LWE/RLWE/RLWR batch")
    gen.add_argument("kind", choices=("lwe", "rlwe", "rlwr"))
    gen.add_argument("--source", choices=("planted", "uniform"), default="planted")
    gen.add_argument("--samples", help="batch file to write ('-' for stderr)")

    prf = sub.add_parser("prf", parents=[common], help="one-bit RLWR PRF")
    prf.add_argument("action", choices=("keygen", "eval", "table", "regime"))
    prf.add_argument("--key", help="key file (written by keygen, read otherwise)")
    prf.add_argument("--table", help="truth-table file to write")

    pke = sub.add_parser("pke", parents=[common], help="LWE public-key encryption")
    pke.add_argument("action", choices=("keygen", "enc", "dec", "error-rate"))
    pke.add_argument("--key", help="key-pair file")
    pke.add_argument("--ct", help="ciphertext file")
    pke.add_argument("--rule", choices=("nearest", "literal"), default="nearest")

    learn = sub.add_parser("learn", parents=[common], help="run a learner on a truth-table target")
    learn.add_argument("algo", choices=("gf2", "low-degree", "junta", "memorize", "cheat"))
    learn.add_argument("--target", required=True, help="truth-table file (k=..., then hex)")

    fourier = sub.add_parser("fourier", parents=[common], help="Walsh-Hadamard spectrum of a target")
    fourier.add_argument("--target", required=True)
    fourier.add_argument("--csv", help="write S,coefficient rows here")

    red = sub.add_parser("reduce", parents=[common], help="reductions and theorem arithmetic")
    red.add_argument("action", choices=("prf-dist", "pke-adv", "bound", "params-tc0", "params-ac0"))
    red.add_argument("--family", choices=("linear", "prf"), default="linear")
    red.add_argument("--learner", default="gf2")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    flags = {key: getattr(args, key, None) for key in FLAG_KEYS}
    try:
        overrides = dict(item.split("=", 1) for item in args.set if "=" in item)
        if len(overrides) != len(args.set):
            parser.error("--set expects KEY=VALUE")
        context = "pke" if getattr(args, "action", None) == "pke-adv" else args.command
        cfg = load_config(args.config, args.preset, overrides, flags, command=context)
        seed = resolve_seed(cfg)
        if args.command == "reduce" and args.action == "pke-adv" and args.learner not in _pke_learners():
            raise InvalidParamsError(f"pke learner is one of {sorted(_pke_learners())}", args.learner)
        t0 = time.perf_counter()
        metrics, code = COMMANDS[args.command](args, cfg, seed)
        wall = time.perf_counter() - t0
    except SystemExit as exc:
        return int(exc.code or 0)
    except (HardlearnError, ValueError, OSError, KeyError) as exc:
        sys.stderr.write(f"hardlearn: error: {exc}\n")
        return 1
    for w in cfg.warnings:
        sys.stderr.write(f"hardlearn: warning: {w}\n")
    config_echo = {"command": args.command, "preset": cfg.preset, **cfg.values}
    for extra in ("kind", "action", "algo", "source", "family", "learner", "rule"):
        if hasattr(args, extra):
            config_echo[extra] = getattr(args, extra)
    config_echo.pop("seed", None)
    record = ResultRecord(config_echo, seed, metrics, wall)
    write_result(record, args.out)
    return code


def _pke_learners():
    from hardlearn.reductions import PKE_LEARNERS
    return PKE_LEARNERS


if __name__ == "__main__":
    sys.exit(main())
