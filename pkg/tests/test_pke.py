"""Test key generation, encryption and decryption (single and double)."""

from fractions import Fraction

import numpy as np
import pytest

from quantum_mceliece import codes, formats, gf2, pke, qsim
from quantum_mceliece.errors import DimensionError, ParameterError, SupportOutsideImage
from quantum_mceliece.gf2 import BitVector


def test_keygen_relation(hamming):
    """Test that G' = SGP."""
    for seed in range(100):
        keys = pke.keygen(hamming, seed)
        sk = keys.private
        assert gf2.mat_mul(gf2.mat_mul(sk.S, hamming.G), sk.P) == keys.public.g_prime
        assert gf2.rank(keys.public.g_prime) == 4


def test_keygen_identity_scrambling(hamming):
    """Test keygen with identity S and P."""
    keys = pke.keygen(hamming, 0, scrambler=gf2.identity(4), permutation=gf2.identity(7))
    assert keys.public.g_prime == hamming.generator


def test_keygen_is_deterministic(hamming):
    """Test that keygen depends only on the seed."""
    first = formats.dumps(formats.public_key_to_file(pke.keygen(hamming, 7).public))
    second = formats.dumps(formats.public_key_to_file(pke.keygen(hamming, 7).public))
    assert first == second


def test_private_key_validation(hamming):
    """Test private key consistency checks."""
    with pytest.raises(ParameterError):
        pke.PrivateKey(scrambler=gf2.BitMatrix.zeros(4, 4), code=hamming, permutation=gf2.identity(7))
    with pytest.raises(ParameterError):
        pke.PrivateKey(scrambler=gf2.identity(4), code=hamming, permutation=gf2.BitMatrix.zeros(7, 7))


def test_encrypt_without_error_or_scrambling(hamming):
    """Test encryption that reduces to the isometry."""
    keys = pke.keygen(hamming, 0, scrambler=gf2.identity(4), permutation=gf2.identity(7))
    pk = pke.PublicKey(keys.public.g_prime, t=0)
    m = BitVector.from_string("1011")
    cipher = pke.encrypt(pk, qsim.basis_state(m), rng=1)
    assert qsim.support(cipher).tolist() == [codes.encode(hamming, m).value]


def test_encrypt_norm_and_size(hamming_keys, rng):
    """Test ciphertext size and norm."""
    cipher = pke.encrypt(hamming_keys.public, qsim.random_state(4, rng), rng)
    assert cipher.qubits == 7
    assert np.linalg.norm(cipher.amplitudes) == pytest.approx(1.0)
    with pytest.raises(DimensionError):
        pke.encrypt(hamming_keys.public, qsim.random_state(3, rng), rng)


def test_two_encryptions_differ_by_a_low_weight_mask(hamming_keys):
    """Test that two encryptions differ by an X mask of weight at most 2t."""
    message = qsim.basis_state(BitVector.from_string("1000"))
    a = qsim.support(pke.encrypt(hamming_keys.public, message, 1))[0]
    b = qsim.support(pke.encrypt(hamming_keys.public, message, 2))[0]
    assert int(a ^ b).bit_count() <= 2 * hamming_keys.public.t


def test_roundtrip_random_states(hamming_keys, rng):
    """Test decryption of random states."""
    for _ in range(100):
        s = qsim.random_state(4, rng)
        cipher = pke.encrypt(hamming_keys.public, s, rng)
        assert qsim.fidelity(pke.decrypt(hamming_keys.private, cipher), s) >= 1 - 1e-9


def test_roundtrip_exhaustive_sweep(hamming_keys):
    """All 16 basis messages under each of the 7 weight-1 errors."""
    g_prime = hamming_keys.public.g_prime
    count = 0
    for m in range(16):
        message = qsim.basis_state(BitVector(4, m))
        encoded = qsim.apply_isometry(message, g_prime)
        for i in range(7):
            cipher = qsim.apply_x(encoded, BitVector.unit(7, i))
            decrypted = pke.decrypt(hamming_keys.private, cipher)
            assert qsim.fidelity(decrypted, message) >= 1 - 1e-9
            count += 1
    assert count == 112


def test_roundtrip_with_weight_at_most_t(hamming_keys, rng):
    """Test decryption with error weight at most t."""
    for _ in range(20):
        s = qsim.random_state(4, rng)
        cipher = pke.encrypt(hamming_keys.public, s, rng, leq_weight=True)
        assert qsim.fidelity(pke.decrypt(hamming_keys.private, cipher), s) >= 1 - 1e-9


def test_roundtrip_with_simulated_syndrome_measurement(hamming_keys, rng):
    """Test decryption that measures the syndrome."""
    for _ in range(10):
        s = qsim.random_state(4, rng)
        cipher = pke.encrypt(hamming_keys.public, s, rng)
        decrypted = pke.decrypt(hamming_keys.private, cipher, simulate_measurement=True)
        assert qsim.fidelity(decrypted, s) >= 1 - 1e-9


def test_syndrome_outcome_independent_of_message(hamming_keys, rng):
    """Same r, different messages: the simulated syndrome register reads the same value."""
    code = hamming_keys.private.code
    r = BitVector.unit(7, 2)
    outcomes = set()
    for _ in range(10):
        cipher = qsim.apply_x(qsim.apply_isometry(qsim.random_state(4, rng), hamming_keys.public.g_prime), r)
        unpermuted = qsim.apply_isometry(cipher, hamming_keys.private.permutation_inverse)
        joint = qsim.apply_isometry(unpermuted, gf2.hstack(gf2.identity(7), code.parity_check_t))
        outcome, _ = qsim.measure_register(joint, 7, 10)
        outcomes.add(outcome)
    assert len(outcomes) == 1


def test_decrypt_rejects_foreign_cipher(hamming_keys, rng):
    """Test decryption of a state that was not encrypted with the key."""
    with pytest.raises(SupportOutsideImage):
        pke.decrypt(hamming_keys.private, qsim.random_state(7, rng))
    with pytest.raises(DimensionError):
        pke.decrypt(hamming_keys.private, qsim.random_state(4, rng))


def test_classical_decryption_recovers_every_correctable_cipher(hamming_keys):
    """Test classical decryption for every message and correctable error."""
    g_prime = hamming_keys.public.g_prime
    for m in range(16):
        message = BitVector(4, m)
        for i in range(7):
            c = gf2.vec_mat(message, g_prime) ^ BitVector.unit(7, i)
            assert pke.decrypt_classical(hamming_keys.private, c) == message


class TestDoubleEncryption:
    """Encode, Hadamard, encode."""

    def test_key_compatibility(self, hamming):
        """Test that the second key's dimension must equal the first key's length."""
        with pytest.raises(ParameterError):
            pke.keygen_double(hamming, codes.random_code(15, 8, 1, seed=1), seed=0)

    def test_roundtrip(self, double_keys, rng):
        """Test double encryption and decryption."""
        pk1, pk2 = double_keys.first.public, double_keys.second.public
        for _ in range(50):
            s = qsim.random_state(4, rng)
            cipher = pke.encrypt_double(pk1, pk2, s, rng)
            assert cipher.qubits == 15
            decrypted = pke.decrypt_double(double_keys.first.private, double_keys.second.private, cipher)
            assert qsim.fidelity(decrypted, s) >= 1 - 1e-9

    def test_zero_randomness_reduces_to_isometries(self, hamming, rng):
        """Test the double scheme with both masks set to zero."""
        second = codes.random_code(15, 7, 1, seed=4)
        k1 = pke.keygen(hamming, 0, scrambler=gf2.identity(4), permutation=gf2.identity(7))
        k2 = pke.keygen(second, 0, scrambler=gf2.identity(7), permutation=gf2.identity(15))
        pk1 = pke.PublicKey(k1.public.g_prime, t=0)
        pk2 = pke.PublicKey(k2.public.g_prime, t=0)
        s = qsim.random_state(4, rng)
        cipher = pke.encrypt_double(pk1, pk2, s, rng)
        expected = qsim.apply_isometry(
            qsim.apply_h_all(qsim.apply_isometry(s, hamming.generator)), second.generator
        )
        np.testing.assert_allclose(cipher.amplitudes, expected.amplitudes, atol=1e-12)

    def test_cipher_matches_closed_form(self, double_keys, rng):
        """Σ_k [Σ_m α_m (−1)^{k·(mG₁'⊕r₁)}] |kG₂'⊕r₂⟩ / √2ⁿ, evaluated term by term."""
        pk1, pk2 = double_keys.first.public, double_keys.second.public
        s = qsim.random_state(4, rng)
        replica = np.random.default_rng(77)
        r1 = gf2.random_weight_vector(pk1.n, pk1.t, replica)
        r2 = gf2.random_weight_vector(pk2.n, pk2.t, replica)
        cipher = pke.encrypt_double(pk1, pk2, s, np.random.default_rng(77))

        expected = np.zeros(1 << pk2.n, dtype=complex)
        for k in range(1 << pk1.n):
            kv = BitVector(pk1.n, k)
            total = 0j
            for m in range(1 << pk1.k):
                word = gf2.vec_mat(BitVector(pk1.k, m), pk1.g_prime) ^ r1
                total += s.amplitudes[m] * (-1) ** kv.dot(word)
            expected[(gf2.vec_mat(kv, pk2.g_prime) ^ r2).value] = total / np.sqrt(1 << pk1.n)
        np.testing.assert_allclose(cipher.amplitudes, expected, atol=1e-12)


def test_expansion_report():
    """Test the ciphertext and key expansion ratios."""
    report = pke.expansion_report(524, 1024, 2048)
    assert report.key_bit_expansion == 3
    assert 3.9 <= float(report.cipher_expansion) <= 4.0
    assert report.random_bits == 3072
    assert pke.expansion_report(4, 7, 15).cipher_expansion == Fraction(15, 4)
    assert pke.expansion_report(3, 9, 9).key_bit_expansion == 2
    with pytest.raises(ParameterError):
        pke.expansion_report(0, 7, 15)
