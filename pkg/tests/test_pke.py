import numpy as np
import pytest

from hardlearn.errors import InvalidParamsError, ParamMismatchError
from hardlearn.lattice import dot_mod
from hardlearn.pke import (
    Ciphertext,
    PkeParams,
    decode,
    dump_keypair,
    encrypt_with,
    estimate_decryption_error,
    load_keypair,
    phase,
    pke_decrypt,
    pke_encrypt,
    pke_keygen,
)
from hardlearn.sampling import GaussianParams, derive_rng_stream

DESK = PkeParams(32, 1 << 15, 300, GaussianParams(10.0))


def test_keygen_relation():
    kp = pke_keygen(DESK, derive_rng_stream(1), debug=True)
    q = DESK.q
    resid = (kp.b.astype(np.int64) - dot_mod(kp.A, kp.s, q)) % q
    assert np.array_equal(resid, kp.e % q)
    assert kp.A.shape == (300, 32) and kp.b.shape == (300,)
    assert pke_keygen(DESK, derive_rng_stream(1)).e is None


def test_encrypt_with_definition():
    kp = pke_keygen(DESK, derive_rng_stream(2))
    mask = derive_rng_stream(3).integers(0, 2, size=DESK.m)
    ct = encrypt_with(kp.public, 1, mask)
    q = DESK.q
    assert np.array_equal(ct.a.astype(np.int64), (kp.A.astype(np.int64) * mask[:, None]).sum(0) % q)
    assert ct.c == (int((kp.b.astype(np.int64) * mask).sum()) + q // 2) % q


def test_round_trip_desk():
    kp = pke_keygen(DESK, derive_rng_stream(4))
    rng = derive_rng_stream(5)
    for _ in range(200):
        bit = int(rng.integers(0, 2))
        assert pke_decrypt(kp, pke_encrypt(kp.public, bit, rng)) == bit


def test_decode_rules():
    q = 1 << 15
    quarter = q // 4
    assert decode(0, q) == 0 and decode(quarter, q) == 0 and decode(quarter + 1, q) == 1
    assert decode(q - quarter, q) == 0 and decode(q - quarter - 1, q) == 1
    assert decode(q // 2, q) == 1
    assert decode(q - 1, q, "nearest") == 0
    assert decode(q - 1, q, "literal") == 1
    with pytest.raises(ValueError):
        decode(0, q, "other")


def test_bad_bit_and_mask():
    kp = pke_keygen(DESK, derive_rng_stream(6))
    with pytest.raises(InvalidParamsError):
        encrypt_with(kp, 2, np.zeros(DESK.m))
    with pytest.raises(ParamMismatchError):
        encrypt_with(kp, 0, np.zeros(DESK.m - 1))


def test_dimension_mismatch_on_decrypt():
    kp = pke_keygen(DESK, derive_rng_stream(6))
    with pytest.raises(ParamMismatchError):
        phase(kp.s, Ciphertext(np.zeros(5, dtype=np.int64), 0), DESK.q)


def test_large_noise_gives_coin_flip_errors():
    params = PkeParams(16, 1 << 15, 64, GaussianParams((1 << 15) / 4, tail_bound=1 << 14))
    rate = estimate_decryption_error(params, 1500, 3).rate("nearest")
    assert 0.4 < rate < 0.6


def test_error_rate_deterministic():
    small = PkeParams(16, 1 << 12, 100, GaussianParams(3.0))
    assert estimate_decryption_error(small, 50, 9) == estimate_decryption_error(small, 50, 9)


def test_advisory_conditions():
    nb = DESK.noise_budget()
    assert nb["holds"] and nb["noise_spread"] == pytest.approx(10 * np.sqrt(150))
    cc = DESK.correctness_condition()
    assert cc["holds"] is False


def test_wide_modulus_round_trip():
    params = PkeParams(8, (1 << 70) + 25, 40, GaussianParams(5.0))
    kp = pke_keygen(params, derive_rng_stream(7))
    rng = derive_rng_stream(8)
    for bit in (0, 1, 1, 0):
        assert pke_decrypt(kp, pke_encrypt(kp, bit, rng)) == bit


def test_keypair_and_ciphertext_text_round_trip():
    kp = pke_keygen(DESK, derive_rng_stream(10))
    back = load_keypair(dump_keypair(kp))
    assert np.array_equal(back.s, kp.s) and np.array_equal(back.A, kp.A) and np.array_equal(back.b, kp.b)
    ct = pke_encrypt(kp, 1, derive_rng_stream(11))
    assert Ciphertext.from_csv(ct.to_csv()) == ct
    assert pke_decrypt(back, Ciphertext.from_csv(ct.to_csv())) == 1


def test_bare_secret_needs_modulus():
    kp = pke_keygen(DESK, derive_rng_stream(12))
    ct = pke_encrypt(kp, 0, derive_rng_stream(13))
    assert pke_decrypt(kp.s, ct, q=DESK.q) == 0
    with pytest.raises(ValueError):
        pke_decrypt(kp.s, ct)
