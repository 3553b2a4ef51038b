"""Regev's LWE public-key encryption of single bits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hardlearn.errors import InvalidParamsError, ParamMismatchError
from hardlearn.lattice import clopper_pearson, dot_mod
from hardlearn.ring import parse_header, uniform_residues
from hardlearn.sampling import GaussianParams, RngSeed, derive_rng_stream, sample_gaussian_array

RULES = ("nearest", "literal")


@dataclass(frozen=True)
class PkeParams:
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

    def correctness_condition(self, eps: float = 0.1) -> dict:
        """Advisory: m >= (1 + eps)(d + 1) log2 q."""
        need = (1 + eps) * (self.d + 1) * math.log2(self.q)
        return {"m": self.m, "required": need, "holds": self.m >= need}

    def noise_budget(self) -> dict:
        """sigma * sqrt(m/2) against q/8, the rule used for desk presets."""
        spread = self.chi.sigma * math.sqrt(self.m / 2)
        return {"noise_spread": spread, "q_over_8": self.q / 8, "holds": spread <= self.q / 8}

    def header(self) -> str:
        return (f"d={self.d} q={self.q} m={self.m} sigma={self.chi.sigma!r} "
                f"tail_bound={self.chi.tail_bound}")


def _residue_dtype(q):
    return np.int64 if q <= 1 << 62 else object


@dataclass(frozen=True, eq=False)
class PublicKey:
    params: PkeParams
    A: np.ndarray  # (m, d)
    b: np.ndarray  # (m,)


@dataclass(frozen=True, eq=False)
class KeyPair:
    params: PkeParams
    s: np.ndarray
    A: np.ndarray
    b: np.ndarray
    e: np.ndarray | None = None  # kept only in debug mode

    @property
    def public(self) -> PublicKey:
        return PublicKey(self.params, self.A, self.b)


@dataclass(frozen=True, eq=False)
class Ciphertext:
    a: np.ndarray
    c: int

    def key(self) -> tuple:
        return (*(int(v) for v in self.a), int(self.c))

    def __eq__(self, other):
        return isinstance(other, Ciphertext) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_csv(self) -> str:
        return ",".join(str(v) for v in self.key())

    @classmethod
    def from_csv(cls, line: str) -> "Ciphertext":
        vals = [int(t) for t in line.strip().split(",")]
        return cls(np.array(vals[:-1], dtype=object), vals[-1])


def _uniform(rng, q, shape):
    vals = uniform_residues(rng, q, int(np.prod(shape)))
    return vals.astype(_residue_dtype(q)).reshape(shape)


def pke_keygen(params: PkeParams, rng: np.random.Generator, debug: bool = False,
               noiseless: bool = False) -> KeyPair:
    """Fresh (s, A, b = A s + e). ``noiseless`` sets e = 0 (testing only)."""
    q = params.q
    s = _uniform(rng, q, (params.d,))
    A = _uniform(rng, q, (params.m, params.d))
    e = sample_gaussian_array(params.chi, rng, params.m)
    if noiseless:
        e = np.zeros_like(e)
    b = (np.asarray(dot_mod(A, s, q), dtype=object) + e.astype(object)) % q
    b = b.astype(_residue_dtype(q))
    return KeyPair(params, s, A, b, e if debug else None)


def encrypt_with(pub: PublicKey | KeyPair, bit: int, subset_mask: np.ndarray) -> Ciphertext:
    """Encryption with an explicit subset indicator 1_S in {0,1}^m."""
    if bit not in (0, 1):
        raise InvalidParamsError("bit in {0, 1}", f"bit={bit}")
    q = pub.params.q
    mask = np.asarray(subset_mask, dtype=np.int64)
    if mask.shape != (pub.params.m,):
        raise ParamMismatchError(f"subset mask has shape {mask.shape}, expected ({pub.params.m},)")
    a = dot_mod(pub.A.T, mask, q)
    c = (int(dot_mod(pub.b, mask, q)) + bit * (q // 2)) % q
    return Ciphertext(np.asarray(a, dtype=_residue_dtype(q)), c)


def pke_encrypt(pub: PublicKey | KeyPair, bit: int, rng: np.random.Generator) -> Ciphertext:
    """Pick S by m fair coins and encrypt ``bit``."""
    mask = rng.integers(0, 2, size=pub.params.m)
    return encrypt_with(pub, bit, mask)


def decode(v: int, q: int, rule: str = "nearest") -> int:
    """Map the phase v = c - <a, s> mod q to a bit.

    ``nearest``: 0 iff v is within floor(q/4) of 0 on the circle.
    ``literal``: 0 iff v <= floor(q/4), the one-sided threshold.
    """
    quarter = q // 4
    if rule == "nearest":
        return 0 if v <= quarter or v >= q - quarter else 1
    if rule == "literal":
        return 0 if v <= quarter else 1
    raise ValueError(f"unknown decryption rule {rule!r}")


def phase(s: np.ndarray, ct: Ciphertext, q: int) -> int:
    if len(ct.a) != len(s):
        raise ParamMismatchError(f"ciphertext dimension {len(ct.a)} != key dimension {len(s)}")
    return (int(ct.c) - int(dot_mod(np.asarray(ct.a, dtype=object).astype(_residue_dtype(q)), s, q))) % q


def pke_decrypt(priv: KeyPair | np.ndarray, ct: Ciphertext, rule: str = "nearest", q: int | None = None) -> int:
    if isinstance(priv, KeyPair):
        s, q = priv.s, priv.params.q
    else:
        s = priv
        if q is None:
            raise ValueError("q is required with a bare secret vector")
    return decode(phase(s, ct, q), q, rule)


@dataclass(frozen=True)
class ErrorRate:
    trials: int
    errors: dict  # rule -> count

    def rate(self, rule="nearest") -> float:
        return self.errors[rule] / self.trials

    def to_dict(self) -> dict:
        out = {"trials": self.trials}
        for rule, n in sorted(self.errors.items()):
            p = n / self.trials
            se = math.sqrt(p * (1 - p) / self.trials)
            lo, hi = clopper_pearson(n, self.trials)
            out[rule] = {"errors": n, "rate": p, "stderr": se,
                         "wald_ci": [max(0.0, p - 1.96 * se), min(1.0, p + 1.96 * se)],
                         "exact_ci": [lo, hi]}
        return out


def estimate_decryption_error(params: PkeParams, trials: int, seed: RngSeed | int) -> ErrorRate:
    """Pr[dec(enc(b)) != b] over fresh keys, coins and uniform bits, per rule."""
    if trials < 1:
        raise InvalidParamsError("trials >= 1", f"trials={trials}")
    errors = {rule: 0 for rule in RULES}
    q = params.q
    for i in range(trials):
        rng = derive_rng_stream(seed, i)
        kp = pke_keygen(params, rng)
        bit = int(rng.integers(0, 2))
        ct = pke_encrypt(kp, bit, rng)
        v = phase(kp.s, ct, q)
        for rule in RULES:
            errors[rule] += decode(v, q, rule) != bit
    return ErrorRate(trials, errors)


# --- key files ---------------------------------------------------------------

def _csv(values) -> str:
    return ",".join(str(int(v)) for v in values)


def dump_keypair(kp: KeyPair) -> str:
    lines = [kp.params.header(), "[s]", _csv(kp.s), "[A]"]
    lines += [_csv(row) for row in kp.A]
    lines += ["[b]", _csv(kp.b)]
    return "\n".join(lines) + "\n"


def load_keypair(text: str) -> KeyPair:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    hdr = parse_header(lines[0])
    params = PkeParams(int(hdr["d"]), int(hdr["q"]), int(hdr["m"]),
                       GaussianParams(float(hdr["sigma"]), int(hdr["tail_bound"])))
    blocks: dict[str, list[list[int]]] = {}
    current = None
    for ln in lines[1:]:
        if ln.startswith("["):
            current = ln.strip("[]")
            blocks[current] = []
        else:
            blocks[current].append([int(t) for t in ln.split(",")])
    dt = _residue_dtype(params.q)
    s = np.array(blocks["s"][0], dtype=dt) if "s" in blocks else np.zeros(0, dtype=dt)
    A = np.array(blocks["A"], dtype=dt)
    b = np.array(blocks["b"][0], dtype=dt)
    if A.shape != (params.m, params.d) or b.shape != (params.m,):
        raise ParamMismatchError("key blocks do not match the header dimensions")
    return KeyPair(params, s, A, b)
