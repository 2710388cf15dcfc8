"""What an eavesdropper can do with a public key and a quantum ciphertext.

Covers the ciphertext transform that splits a cipher state into a measured
leak ``r(I ⊕ G'⁻G')`` and a bit-flipped copy of the message, its two-layer
variant against double encryption, the classical bit-leak and its low-weight
search problem, exact leak probabilities, and a sampling harness for
distinguishing two plaintexts.
"""

import logging
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from math import comb
from typing import Callable, List, Literal, Sequence, Tuple

import numpy as np
from scipy.stats import chi2_contingency, norm

from . import gf2, qsim
from .errors import BudgetError, DimensionError, ParameterError
from .gf2 import BitMatrix, BitVector, RngLike
from .pke import PublicKey
from .qsim import Basis, StateVector

logger = logging.getLogger(__name__)

Engine = Literal["greedy", "random", "exhaustive"]
ENGINES: Tuple[str, ...] = ("greedy", "random", "exhaustive")

# Exhaustive search enumerates all 2^n choices of u.
EXHAUSTIVE_MAX_N = 20


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for one trial, derived from (master seed, trial index)."""
    return np.random.default_rng([seed, index])


@dataclass(frozen=True)
class AttackOutcome:
    """Measured leak, the residual message register and the inverse used."""

    leak: BitVector
    residual_state: StateVector
    applied_inverse: BitMatrix


@dataclass(frozen=True)
class DoubleAttackOutcome:
    outer: AttackOutcome
    intermediate: StateVector
    inner: AttackOutcome

    @property
    def residual_state(self) -> StateVector:
        return self.inner.residual_state

    @property
    def leaks(self) -> Tuple[BitVector, BitVector]:
        """(outer leak r₂(I⊕G₂'⁻G₂'), inner leak r₁(I⊕G₁'⁻G₁'))."""
        return self.outer.leak, self.inner.leak


def leak_matrix(g_prime: BitMatrix, inverse: BitMatrix) -> BitMatrix:
    """I ⊕ G'⁻G' (n×n)."""
    n = g_prime.cols
    if inverse.shape != (n, g_prime.rows):
        raise DimensionError(f"Inverse must be {n}x{g_prime.rows}, got {inverse.shape}")
    return gf2.identity(n) ^ gf2.mat_mul(inverse, g_prime)


def leak_rank(g_prime: BitMatrix, inverse: BitMatrix) -> int:
    """Number of independent bits of ``r`` exposed by the leak."""
    return gf2.rank(leak_matrix(g_prime, inverse))


def attack_transform(
    pk: PublicKey, cipher: StateVector, u: BitMatrix, rng: RngLike = None
) -> AttackOutcome:
    """Split a cipher into the leak register and X(rG'⁻)·message.

    |c⟩ ↦ |c ⊕ cG'⁻G'⟩|cG'⁻⟩; for c = mG' ⊕ r the first register holds
    r(I ⊕ G'⁻G') for every m, so measuring it leaves Σ α_m|m ⊕ rG'⁻⟩.
    """
    if cipher.qubits != pk.n:
        raise DimensionError(f"Public key has n={pk.n}, cipher has {cipher.qubits} qubits")
    inverse = gf2.right_inverse_member(pk.g_prime, gf2.right_inverse(pk.g_prime), u)
    transform = gf2.hstack(leak_matrix(pk.g_prime, inverse), inverse)
    registers = qsim.apply_isometry(cipher, transform)
    leak, residual = qsim.measure_register(registers, 0, pk.n, rng)
    logger.debug(f"Attack on [{pk.n},{pk.k}] cipher leaked a weight-{leak.weight} vector")
    return AttackOutcome(leak=leak, residual_state=residual, applied_inverse=inverse)


def attack_transform_double(
    pk1: PublicKey,
    pk2: PublicKey,
    cipher: StateVector,
    u2: BitMatrix,
    u1: BitMatrix,
    rng: RngLike = None,
) -> DoubleAttackOutcome:
    """Peel both layers of a double-encryption cipher.

    The intermediate state after the Hadamard layer is
    Z(r₂G₂'⁻)·Σ α_m|mG₁' ⊕ r₁⟩ and the residual is
    X(r₁G₁'⁻)·Σ α_m (−1)^{(r₂G₂'⁻)·(mG₁' ⊕ r₁)}|m⟩.
    """
    if pk2.k != pk1.n:
        raise DimensionError(f"Second key encrypts {pk2.k} qubits, first emits {pk1.n}")
    outer = attack_transform(pk2, cipher, u2, rng)
    intermediate = qsim.apply_h_all(outer.residual_state)
    inner = attack_transform(pk1, intermediate, u1, rng)
    return DoubleAttackOutcome(outer=outer, intermediate=intermediate, inner=inner)


def classical_bit_leak(c: BitVector, inverse: BitMatrix) -> BitVector:
    """c·G₂'⁻ = m ⊕ rG₂'⁻; bit i is m_i ⊕ r·e_i for column e_i."""
    return gf2.vec_mat(c, inverse)


def mask_fidelity(s: StateVector, e: BitVector) -> float:
    """|Σ_m α_m* α_{m⊕e}|, the fidelity between ``s`` and X(e)·s."""
    if e.length != s.qubits:
        raise DimensionError(f"Mask length {e.length} != {s.qubits} qubits")
    shifted = s.amplitudes[np.arange(len(s), dtype=np.int64) ^ e.value]
    return float(abs(np.vdot(s.amplitudes, shifted)))


# -- low-weight search -----------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    """Best ``u`` found for e = g_i ⊕ (I ⊕ G₁'⁻G')·u."""

    u: BitVector
    e: BitVector
    engine: str
    trials: int
    seed: int
    column_index: int

    @property
    def weight(self) -> int:
        return self.e.weight


def search_residual(
    ginv1: BitMatrix, g_prime: BitMatrix, column_index: int, u: BitVector
) -> BitVector:
    """e = g_i ⊕ (I ⊕ G₁'⁻G')·u with vectors read as columns."""
    a = leak_matrix(g_prime, ginv1)
    product = gf2.vec_mat(u, gf2.transpose(a))
    return ginv1.column(column_index) ^ product


def _random_starts(n: int, budget: int, seed: int) -> List[int]:
    return [gf2.random_vector(n, trial_rng(seed, i)).value for i in range(budget)]


def low_weight_search(
    ginv1: BitMatrix,
    g_prime: BitMatrix,
    column_index: int,
    engine: str = "greedy",
    budget: int = 32,
    seed: int = 0,
    exhaustive_max_n: int = EXHAUSTIVE_MAX_N,
) -> SearchResult:
    """Search for a low-weight column e_i of some right inverse of G'.

    ``random`` keeps the best of ``budget`` uniform u; ``greedy`` runs
    steepest single-bit descent from u = 0 and from those same ``budget``
    points, so it never does worse than ``random`` for equal seed and budget;
    ``exhaustive`` scans all 2^n u.
    """
    n, k = ginv1.shape
    if g_prime.shape != (k, n):
        raise DimensionError(f"G' must be {k}x{n}, got {g_prime.shape}")
    if not 0 <= column_index < k:
        raise DimensionError(f"Column {column_index} outside [0, {k})")
    if engine not in ENGINES:
        raise ParameterError(f"Unknown search engine: {engine} (expected one of {ENGINES})")

    a = leak_matrix(g_prime, ginv1)
    a_t = gf2.transpose(a)
    columns = list(a_t.row_bits)
    target = ginv1.column(column_index).value

    def image(u: int) -> int:
        acc = target
        for j, col in enumerate(columns):
            if (u >> (n - 1 - j)) & 1:
                acc ^= col
        return acc

    if engine == "exhaustive":
        if n > exhaustive_max_n:
            raise BudgetError(f"Exhaustive search over 2^{n} vectors exceeds 2^{exhaustive_max_n}")
        values = np.int64(target) ^ gf2.basis_images(a_t)
        best_u = int(np.argmin(np.bitwise_count(values)))
        trials = 1 << n
    elif engine == "random":
        if budget <= 0:
            raise ParameterError("Random search needs a positive budget")
        starts = _random_starts(n, budget, seed)
        best_u = min(starts, key=lambda u: image(u).bit_count())
        trials = budget
    else:
        trials = 0
        best_u, best_weight = 0, None
        for start in [0] + _random_starts(n, budget, seed):
            u, current = start, image(start)
            while True:
                trials += n
                flips = [(current ^ col).bit_count() for col in columns]
                j = int(np.argmin(flips))
                if flips[j] >= current.bit_count():
                    break
                u ^= 1 << (n - 1 - j)
                current ^= columns[j]
            if best_weight is None or current.bit_count() < best_weight:
                best_u, best_weight = u, current.bit_count()

    u_vec = BitVector(n, best_u)
    e = search_residual(ginv1, g_prime, column_index, u_vec)
    logger.debug(f"{engine} search on n={n}: weight {e.weight} after {trials} evaluations")
    return SearchResult(
        u=u_vec, e=e, engine=engine, trials=trials, seed=seed, column_index=column_index
    )


def search_instance(n: int, k: int, seed: int) -> Tuple[BitMatrix, BitMatrix]:
    """Random full-row-rank G' and its canonical right inverse for one seed."""
    g_prime = gf2.random_full_row_rank(k, n, gf2.as_rng(seed))
    return g_prime, gf2.right_inverse(g_prime)


def search_experiment(
    n: int,
    k: int,
    engine: str,
    budget: int,
    seeds: Sequence[int],
    column_index: int = 0,
    exhaustive_max_n: int = EXHAUSTIVE_MAX_N,
) -> List[SearchResult]:
    """One random instance per seed, searched with ``engine``."""
    results = []
    for seed in seeds:
        g_prime, ginv1 = search_instance(n, k, seed)
        results.append(
            low_weight_search(
                ginv1, g_prime, column_index, engine, budget, seed, exhaustive_max_n
            )
        )
    if results:
        mean = sum(r.weight for r in results) / len(results)
        logger.info(f"{engine} search over {len(results)} [{n},{k}] instances: mean weight {mean:.3f}")
    return results


def minimum_hit_fraction(
    results: Sequence[SearchResult], oracle: Sequence[SearchResult]
) -> Fraction:
    """Share of instances on which ``results`` match the ``oracle`` weight.

    Both lists must come from :func:`search_experiment` over the same seeds.
    """
    if len(results) != len(oracle) or not results:
        raise ParameterError(
            f"Need two equally long, non-empty result lists, got {len(results)} and {len(oracle)}"
        )
    if any(a.seed != b.seed for a, b in zip(results, oracle)):
        raise ParameterError("Result lists were run on different seeds")
    hits = sum(a.weight == b.weight for a, b in zip(results, oracle))
    return Fraction(hits, len(results))


# -- leak probabilities ----------------------------------------------------


def prob_r_dot_e_zero(n: int, t: int, w: int) -> Fraction:
    """Exact Pr[r·e = 0] for r uniform over weight-t vectors and weight(e) = w."""
    if not (0 <= w <= n and 0 <= t <= n):
        raise ParameterError(f"Require 0 <= w, t <= n, got n={n}, t={t}, w={w}")
    favourable = sum(
        comb(w, j) * comb(n - w, t - j) for j in range(0, min(w, t) + 1, 2)
    )
    return Fraction(favourable, comb(n, t))


def format_rational(value: Fraction, digits: int = 30) -> str:
    """Decimal rendering with ``digits`` significant digits."""
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(value.numerator) / Decimal(value.denominator))


def estimate_r_dot_e_zero(n: int, t: int, w: int, trials: int, seed: int = 0) -> float:
    """Monte Carlo companion of :func:`prob_r_dot_e_zero`."""
    if trials <= 0:
        raise ParameterError("Need at least one trial")
    e = BitVector(n, ((1 << w) - 1) << (n - w)) if w else BitVector.zeros(n)
    hits = sum(
        gf2.random_weight_vector(n, t, trial_rng(seed, i)).dot(e) == 0
        for i in range(trials)
    )
    return hits / trials


# -- distinguishability ----------------------------------------------------

Preparation = Callable[[np.random.Generator], StateVector]


@dataclass(frozen=True)
class DistinguishabilityReport:
    trials: int
    basis: str
    tv_estimate: float
    statistic: float
    dof: int
    p_value: float
    z: float


def _sample_outcomes(prep: Preparation, basis: Basis, trials: int, seed: int, offset: int) -> np.ndarray:
    counts = None
    for i in range(trials):
        rng = trial_rng(seed, 2 * i + offset)
        dist = qsim.basis_distribution(prep(rng), basis)
        if counts is None:
            counts = np.zeros(dist.size, dtype=np.int64)
        elif dist.size != counts.size:
            raise DimensionError("Preparations produced states of different sizes")
        counts[rng.choice(dist.size, p=dist / dist.sum())] += 1
    return counts


def distinguishability_trial(
    prep_a: Preparation,
    prep_b: Preparation,
    basis: Basis = "computational",
    trials: int = 10_000,
    seed: int = 0,
) -> DistinguishabilityReport:
    """Measure ``trials`` fresh states from each preparation and compare outcomes.

    Reports the empirical total-variation distance and a χ² homogeneity test,
    with ``z`` the standard normal quantile of its p-value. A large ``z`` is
    evidence the two plaintexts are distinguishable; this is a falsification
    harness, not a security proof.
    """
    if trials <= 0:
        raise ParameterError("Need at least one trial")
    counts_a = _sample_outcomes(prep_a, basis, trials, seed, 0)
    counts_b = _sample_outcomes(prep_b, basis, trials, seed, 1)
    if counts_a.size != counts_b.size:
        raise DimensionError("Preparations produced states of different sizes")
    tv = 0.5 * float(np.abs(counts_a - counts_b).sum()) / trials

    table = np.vstack([counts_a, counts_b])
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        statistic, p_value, dof, z = 0.0, 1.0, 0, 0.0
    else:
        statistic, p_value, dof, _ = chi2_contingency(table, correction=False)
        z = float(norm.isf(max(float(p_value), 1e-300)))
    logger.info(f"Distinguishability over {trials} trials ({basis} basis): TV={tv:.4f}, z={z:.2f}")
    return DistinguishabilityReport(
        trials=trials,
        basis=basis,
        tv_estimate=tv,
        statistic=float(statistic),
        dof=int(dof),
        p_value=float(p_value),
        z=z,
    )


def exact_tv_distance(a: StateVector, b: StateVector, basis: Basis = "computational") -> float:
    """Total-variation distance between the exact outcome distributions."""
    return qsim.total_variation(qsim.basis_distribution(a, basis), qsim.basis_distribution(b, basis))
