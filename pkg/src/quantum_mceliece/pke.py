"""Quantum McEliece public-key encryption and its double-encryption variant.

Key generation is classical McEliece: ``G' = S·G·P`` with an invertible
scrambler ``S`` and a permutation ``P``. Encryption maps a k-qubit message
Σ α_m|m⟩ to Σ α_m|mG' ⊕ r⟩ for a fresh low-weight ``r``; decryption undoes the
permutation, reads the (classical) syndrome register, removes the error and
uncomputes the code and the scrambler.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Optional, Tuple

import numpy as np

from . import codes, gf2, qsim
from .codes import LinearCode
from .errors import DimensionError, ParameterError, SupportOutsideImage
from .gf2 import BitMatrix, BitVector, RngLike
from .qsim import StateVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PublicKey:
    """(G', t)."""

    g_prime: BitMatrix
    t: int

    def __post_init__(self) -> None:
        if not 0 <= self.t <= self.n:
            raise ParameterError(f"Error weight t={self.t} infeasible for n={self.n}")

    @property
    def k(self) -> int:
        return self.g_prime.rows

    @property
    def n(self) -> int:
        return self.g_prime.cols


@dataclass(frozen=True)
class PrivateKey:
    """(S, G, P) together with the code's decoder."""

    scrambler: BitMatrix
    code: LinearCode
    permutation: BitMatrix

    def __post_init__(self) -> None:
        k, n = self.code.k, self.code.n
        if self.scrambler.shape != (k, k) or gf2.rank(self.scrambler) != k:
            raise ParameterError(f"Scrambler must be an invertible {k}x{k} matrix")
        if self.permutation.shape != (n, n) or not gf2.is_permutation(self.permutation):
            raise ParameterError(f"P must be an {n}x{n} permutation matrix")

    @property
    def S(self) -> BitMatrix:
        return self.scrambler

    @property
    def P(self) -> BitMatrix:
        return self.permutation

    @cached_property
    def scrambler_inverse(self) -> BitMatrix:
        return gf2.invert(self.scrambler)

    @cached_property
    def permutation_inverse(self) -> BitMatrix:
        return gf2.transpose(self.permutation)

    def public_key(self) -> PublicKey:
        g_prime = gf2.mat_mul(
            gf2.mat_mul(self.scrambler, self.code.generator), self.permutation
        )
        return PublicKey(g_prime=g_prime, t=self.code.t)


class KeyPair(NamedTuple):
    public: PublicKey
    private: PrivateKey


@dataclass(frozen=True)
class DoubleKey:
    """Two key pairs; the second layer encrypts the first layer's n-qubit output."""

    first: KeyPair
    second: KeyPair

    def __post_init__(self) -> None:
        if self.second.public.k != self.first.public.n:
            raise ParameterError(
                f"Second layer must encrypt {self.first.public.n} qubits, "
                f"got k={self.second.public.k}"
            )


def keygen(
    code: LinearCode,
    seed: RngLike = None,
    scrambler: Optional[BitMatrix] = None,
    permutation: Optional[BitMatrix] = None,
) -> KeyPair:
    """Sample S and P (unless supplied) and return the paired keys."""
    rng = gf2.as_rng(seed)
    if scrambler is None:
        scrambler = gf2.random_invertible(code.k, rng)
    if permutation is None:
        permutation = gf2.random_permutation(code.n, rng)
    private = PrivateKey(scrambler=scrambler, code=code, permutation=permutation)
    public = private.public_key()
    logger.info(f"Generated keys for a [{code.n},{code.k},{code.d}] code with t={code.t}")
    return KeyPair(public, private)


def keygen_double(
    first_code: LinearCode, second_code: LinearCode, seed: RngLike = None
) -> DoubleKey:
    if second_code.k != first_code.n:
        raise ParameterError(
            f"Second code must have k={first_code.n}, got k={second_code.k}"
        )
    rng = gf2.as_rng(seed)
    return DoubleKey(first=keygen(first_code, rng), second=keygen(second_code, rng))


def encrypt(
    pk: PublicKey, message: StateVector, rng: RngLike = None, leq_weight: bool = False
) -> StateVector:
    """Σ α_m|m⟩ ↦ Σ α_m|mG' ⊕ r⟩; ``r`` is drawn first from ``rng`` and discarded."""
    if message.qubits != pk.k:
        raise DimensionError(f"Public key encrypts {pk.k} qubits, got {message.qubits}")
    r = gf2.random_weight_vector(pk.n, pk.t, rng, leq_weight=leq_weight)
    logger.debug(f"Encrypting {pk.k}-qubit message into {pk.n} qubits")
    return qsim.apply_x(qsim.apply_isometry(message, pk.g_prime), r)


def _measure_syndrome(
    code: LinearCode,
    state: StateVector,
    simulate_measurement: bool,
    rng: RngLike,
) -> Tuple[BitVector, StateVector]:
    syndrome_bits = code.n - code.k
    if simulate_measurement:
        joint = qsim.apply_isometry(
            state, gf2.hstack(gf2.identity(code.n), code.parity_check_t)
        )
        return qsim.measure_register(joint, code.n, code.n + syndrome_bits, rng)

    syndromes = np.unique(gf2.map_indices(qsim.support(state), code.parity_check_t))
    if syndromes.size != 1:
        raise SupportOutsideImage(
            f"Cipher support carries {syndromes.size} distinct syndromes; "
            "it was not produced by this key"
        )
    return BitVector(syndrome_bits, int(syndromes[0])), state


def decrypt(
    sk: PrivateKey,
    cipher: StateVector,
    simulate_measurement: bool = False,
    rng: RngLike = None,
) -> StateVector:
    """Recover the k-qubit message from a ciphertext of the paired public key."""
    code = sk.code
    if cipher.qubits != code.n:
        raise DimensionError(f"Private key decrypts {code.n} qubits, got {cipher.qubits}")
    unscrambled = qsim.apply_isometry(cipher, sk.permutation_inverse)
    syndrome, unscrambled = _measure_syndrome(
        code, unscrambled, simulate_measurement, rng
    )
    error = codes.decode_error(code, syndrome)
    logger.debug(f"Syndrome register measured; correcting a weight-{error.weight} error")
    codeword_state = qsim.apply_x(unscrambled, error)
    scrambled_message = qsim.apply_isometry_inverse(codeword_state, code.generator)
    return qsim.apply_isometry(scrambled_message, sk.scrambler_inverse)


def decrypt_classical(sk: PrivateKey, cipher: BitVector) -> BitVector:
    """Decrypt a classical ciphertext by preparing |c⟩ and measuring the result."""
    message = decrypt(sk, qsim.basis_state(cipher))
    outcome, _ = qsim.measure_register(message, 0, message.qubits)
    return outcome


def encrypt_double(
    first: PublicKey,
    second: PublicKey,
    message: StateVector,
    rng: RngLike = None,
    leq_weight: bool = False,
) -> StateVector:
    """encrypt₂ ∘ H^{⊗n} ∘ encrypt₁."""
    if second.k != first.n:
        raise DimensionError(f"Second key encrypts {second.k} qubits, first emits {first.n}")
    gen = gf2.as_rng(rng)
    inner = encrypt(first, message, gen, leq_weight=leq_weight)
    return encrypt(second, qsim.apply_h_all(inner), gen, leq_weight=leq_weight)


def decrypt_double(
    first: PrivateKey,
    second: PrivateKey,
    cipher: StateVector,
    simulate_measurement: bool = False,
    rng: RngLike = None,
) -> StateVector:
    """decrypt₁ ∘ H^{⊗n} ∘ decrypt₂."""
    gen = gf2.as_rng(rng)
    outer = decrypt(second, cipher, simulate_measurement, gen)
    return decrypt(first, qsim.apply_h_all(outer), simulate_measurement, gen)


@dataclass(frozen=True)
class ExpansionReport:
    k: int
    n: int
    n_prime: int
    cipher_expansion: Fraction
    key_bit_expansion: Fraction
    random_bits: int


def expansion_report(k: int, n: int, n_prime: int) -> ExpansionReport:
    """Ciphertext expansion n′/k and random-key expansion (n′+n)/n."""
    if min(k, n, n_prime) <= 0:
        raise ParameterError(f"Parameters must be positive, got k={k}, n={n}, n'={n_prime}")
    return ExpansionReport(
        k=k,
        n=n,
        n_prime=n_prime,
        cipher_expansion=Fraction(n_prime, k),
        key_bit_expansion=Fraction(n_prime + n, n),
        random_bits=n + n_prime,
    )
