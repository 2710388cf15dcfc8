"""Dense state-vector simulation for the encryption and attack circuits.

Only pure states are modelled. Amplitude index ``b`` of a q-qubit state reads
its bits left to right as qubits 0..q-1, i.e. ``b = Σ b_i · 2^(q-1-i)``, which
is the integer value of the corresponding :class:`~quantum_mceliece.gf2.BitVector`.

Basis-linear isometries ``|m⟩ → |mG⟩`` are applied as amplitude re-indexing;
the compute-copy-uncompute ancilla bookkeeping of the circuits is collapsed
into that injective map, which is observationally identical.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np

from . import gf2
from .errors import (
    DimensionError,
    NotFullRowRank,
    ParameterError,
    QubitCapError,
    SupportOutsideImage,
)
from .gf2 import BitMatrix, BitVector, RngLike

logger = logging.getLogger(__name__)

Basis = Literal["computational", "x"]

_settings = {
    "max_qubits": 24,
    "tolerance": 1e-9,
    "support_tolerance": 1e-10,
}


def configure(
    max_qubits: Optional[int] = None,
    tolerance: Optional[float] = None,
    support_tolerance: Optional[float] = None,
) -> None:
    """Update the simulator limits (normally called through ``Config.apply``)."""
    if max_qubits is not None:
        _settings["max_qubits"] = int(max_qubits)
    if tolerance is not None:
        _settings["tolerance"] = float(tolerance)
    if support_tolerance is not None:
        _settings["support_tolerance"] = float(support_tolerance)
    logger.debug(f"Simulator settings: {_settings}")


def max_qubits() -> int:
    return int(_settings["max_qubits"])


def tolerance() -> float:
    return float(_settings["tolerance"])


def _check_cap(qubits: int) -> None:
    if qubits > max_qubits():
        raise QubitCapError(f"{qubits} qubits exceed the configured cap of {max_qubits()}")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state over ``qubits`` qubits."""

    qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.qubits < 0:
            raise DimensionError(f"Negative qubit count: {self.qubits}")
        _check_cap(self.qubits)
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != 1 << self.qubits:
            raise DimensionError(
                f"{amps.size} amplitudes do not describe {self.qubits} qubits"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > tolerance():
            raise ParameterError(f"State is not normalized (norm {norm:.12g})")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, values, normalize: bool = False) -> "StateVector":
        amps = np.asarray(values, dtype=np.complex128).reshape(-1)
        size = amps.size
        if size == 0 or size & (size - 1):
            raise DimensionError(f"Amplitude count {size} is not a power of two")
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise ParameterError("Cannot normalize the zero vector")
            amps = amps / norm
        return cls(size.bit_length() - 1, amps)

    def __len__(self) -> int:
        return self.amplitudes.size


def basis_state(bits: BitVector) -> StateVector:
    _check_cap(bits.length)
    amps = np.zeros(1 << bits.length, dtype=np.complex128)
    amps[bits.value] = 1.0
    return StateVector(bits.length, amps)


def random_state(qubits: int, rng: RngLike = None) -> StateVector:
    """Haar-random pure state from normalized complex Gaussian amplitudes."""
    _check_cap(qubits)
    gen = gf2.as_rng(rng)
    size = 1 << qubits
    amps = gen.standard_normal(size) + 1j * gen.standard_normal(size)
    return StateVector.from_amplitudes(amps, normalize=True)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """``a ⊗ b`` with ``a`` occupying the leftmost qubits."""
    _check_cap(a.qubits + b.qubits)
    return StateVector(a.qubits + b.qubits, np.kron(a.amplitudes, b.amplitudes))


def _check_same_size(a: StateVector, b: StateVector) -> None:
    if a.qubits != b.qubits:
        raise DimensionError(f"States have {a.qubits} and {b.qubits} qubits")


def inner(a: StateVector, b: StateVector) -> complex:
    """⟨a|b⟩."""
    _check_same_size(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    """Pure-state fidelity |⟨a|b⟩|, clipped to [0, 1]."""
    return min(1.0, abs(inner(a, b)))


def probabilities(s: StateVector) -> np.ndarray:
    return np.abs(s.amplitudes) ** 2


def support(s: StateVector, threshold: Optional[float] = None) -> np.ndarray:
    """Indices whose amplitude magnitude exceeds the support threshold."""
    if threshold is None:
        threshold = float(_settings["support_tolerance"])
    return np.flatnonzero(np.abs(s.amplitudes) > threshold)


def apply_isometry(s: StateVector, g: BitMatrix) -> StateVector:
    """Σ α_m|m⟩ ↦ Σ α_m|mG⟩ for a full-row-rank k×n matrix ``G``."""
    if g.rows != s.qubits:
        raise DimensionError(f"{s.qubits}-qubit state cannot feed a {g.rows}x{g.cols} map")
    if gf2.rank(g) != g.rows:
        raise NotFullRowRank(
            f"Map m -> mG is not injective: rank {gf2.rank(g)} < {g.rows}"
        )
    _check_cap(g.cols)
    out = np.zeros(1 << g.cols, dtype=np.complex128)
    out[gf2.basis_images(g)] = s.amplitudes
    return StateVector(g.cols, out)


def apply_isometry_inverse(s: StateVector, g: BitMatrix) -> StateVector:
    """Undo :func:`apply_isometry` on states supported inside the row space of ``G``."""
    if g.cols != s.qubits:
        raise DimensionError(f"{s.qubits}-qubit state cannot be un-mapped by a {g.rows}x{g.cols} map")
    inverse = gf2.right_inverse(g)
    indices = support(s)
    preimages = gf2.map_indices(indices, inverse)
    outside = indices[gf2.map_indices(preimages, g) != indices]
    if outside.size:
        first = BitVector(s.qubits, int(outside[0]))
        raise SupportOutsideImage(
            f"{outside.size} supported basis states (e.g. {first}) lie outside the row space"
        )
    # Amplitudes under the support threshold are dropped; together they must be negligible.
    weights = probabilities(s)
    dropped = float(weights.sum() - weights[indices].sum())
    if dropped > tolerance():
        raise SupportOutsideImage(
            f"Probability {dropped:.3g} sits on basis states below the support threshold"
        )
    out = np.zeros(1 << g.rows, dtype=np.complex128)
    out[preimages] = s.amplitudes[indices]
    return StateVector.from_amplitudes(out, normalize=True)


def _check_mask(s: StateVector, mask: BitVector) -> None:
    if mask.length != s.qubits:
        raise DimensionError(f"Mask length {mask.length} != {s.qubits} qubits")


def apply_x(s: StateVector, e: BitVector) -> StateVector:
    """X(e): α_m ↦ α_{m⊕e}."""
    _check_mask(s, e)
    idx = np.arange(len(s), dtype=np.int64) ^ e.value
    return StateVector(s.qubits, s.amplitudes[idx])


def apply_z(s: StateVector, b: BitVector) -> StateVector:
    """Z(b): α_m ↦ (−1)^{b·m} α_m."""
    _check_mask(s, b)
    parity = np.bitwise_count(np.arange(len(s), dtype=np.int64) & b.value) & 1
    return StateVector(s.qubits, np.where(parity == 1, -s.amplitudes, s.amplitudes))


def walsh_hadamard(values: np.ndarray) -> np.ndarray:
    """Normalized fast Walsh–Hadamard transform of a length-2^q vector."""
    size = values.size
    out = np.asarray(values, dtype=np.complex128).copy()
    h = 1
    while h < size:
        blocks = out.reshape(-1, 2, h)
        left, right = blocks[:, 0, :], blocks[:, 1, :]
        out = np.stack((left + right, left - right), axis=1).reshape(size)
        h *= 2
    return out / np.sqrt(size)


def apply_h_all(s: StateVector) -> StateVector:
    """H^{⊗q}."""
    return StateVector(s.qubits, walsh_hadamard(s.amplitudes))


def measure_register(
    s: StateVector, start: int, stop: int, rng: RngLike = None
) -> Tuple[BitVector, StateVector]:
    """Measure qubits ``[start, stop)`` in the computational basis.

    Returns the outcome and the renormalized state of the remaining qubits.
    Without ``rng`` the measurement must be deterministic.
    """
    if not 0 <= start < stop <= s.qubits:
        raise DimensionError(f"Invalid register [{start}, {stop}) on {s.qubits} qubits")
    width = stop - start
    blocks = s.amplitudes.reshape(1 << start, 1 << width, 1 << (s.qubits - stop))
    marginal = (np.abs(blocks) ** 2).sum(axis=(0, 2))
    best = int(np.argmax(marginal))
    if marginal[best] >= 1.0 - tolerance():
        outcome = best
    elif rng is None:
        raise ParameterError(
            f"Register [{start}, {stop}) is not classical; an rng is required"
        )
    else:
        gen = gf2.as_rng(rng)
        outcome = int(gen.choice(marginal.size, p=marginal / marginal.sum()))
    rest = blocks[:, outcome, :].reshape(-1)
    logger.debug(f"Measured [{start}, {stop}) -> {outcome:0{width}b} (p={marginal[outcome]:.6g})")
    return BitVector(width, outcome), StateVector.from_amplitudes(rest, normalize=True)


def xbasis_distribution(s: StateVector) -> np.ndarray:
    """Exact outcome probabilities |⟨x|H^{⊗q}|s⟩|² of an X-basis measurement."""
    return np.abs(walsh_hadamard(s.amplitudes)) ** 2


def basis_distribution(s: StateVector, basis: Basis = "computational") -> np.ndarray:
    if basis == "computational":
        return probabilities(s)
    if basis == "x":
        return xbasis_distribution(s)
    raise ParameterError(f"Unknown measurement basis: {basis}")


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    if p.shape != q.shape:
        raise DimensionError(f"Distributions have shapes {p.shape} and {q.shape}")
    return float(0.5 * np.abs(p - q).sum())
