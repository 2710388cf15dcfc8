"""Whether a basis-state linear map m ↦ mH can be realized as a quantum transformation.

A map Σ α_m|m⟩ → Σ α_m|mH⟩ extends to a reversible circuit exactly when it is
injective on the messages it is applied to. On the full domain of n-bit
strings that is a rank condition; on a constant-weight domain it is decided by
scanning every weight-t word.
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Tuple, Union

import numpy as np

from . import gf2
from .errors import BudgetError, DimensionError, ParameterError
from .gf2 import BitMatrix, BitVector

logger = logging.getLogger(__name__)

# Constant-weight domains are enumerated word by word.
CW_SCAN_MAX_N = 24


@dataclass(frozen=True)
class FullDomain:
    bits: int

    def __post_init__(self) -> None:
        if self.bits <= 0:
            raise ParameterError(f"Domain needs a positive bit count, got {self.bits}")


@dataclass(frozen=True)
class ConstantWeightDomain:
    """All n-bit strings of weight exactly ``t``."""

    n: int
    t: int

    def __post_init__(self) -> None:
        if self.n <= 0 or not 0 <= self.t <= self.n:
            raise ParameterError(f"Invalid constant-weight domain n={self.n}, t={self.t}")

    @property
    def bits(self) -> int:
        return self.n


Domain = Union[FullDomain, ConstantWeightDomain]


def parse_domain(text: str, bits: int) -> Domain:
    """``full`` or ``cw:<t>`` over ``bits``-bit messages."""
    if text == "full":
        return FullDomain(bits)
    if text.startswith("cw:"):
        try:
            t = int(text[3:])
        except ValueError:
            raise ParameterError(f"Invalid constant-weight domain: {text}") from None
        return ConstantWeightDomain(bits, t)
    raise ParameterError(f"Unknown domain {text!r} (expected 'full' or 'cw:<t>')")


@dataclass(frozen=True)
class BasisMapSpec:
    """The map m ↦ m·matrix restricted to ``domain``."""

    matrix: BitMatrix
    domain: Domain

    def __post_init__(self) -> None:
        if self.domain.bits != self.matrix.rows:
            raise DimensionError(
                f"Domain has {self.domain.bits}-bit messages, matrix has {self.matrix.rows} rows"
            )


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: Optional[Tuple[BitVector, BitVector]] = None

    def __bool__(self) -> bool:
        return self.feasible


def _weight_words(n: int, t: int, max_n: int) -> np.ndarray:
    if n > max_n:
        raise BudgetError(f"Scanning weight-{t} words of length {n} exceeds the limit n <= {max_n}")
    words = [
        sum(1 << (n - 1 - p) for p in positions) for positions in combinations(range(n), t)
    ]
    return np.sort(np.asarray(words, dtype=np.int64))


def check_feasible(spec: BasisMapSpec, cw_scan_max_n: int = CW_SCAN_MAX_N) -> FeasibilityResult:
    """Feasible iff the map is injective on its domain; otherwise return m₁ ≠ m₂ with m₁H = m₂H."""
    matrix, domain = spec.matrix, spec.domain
    n = matrix.rows

    if isinstance(domain, FullDomain):
        if gf2.rank(matrix) == n:
            return FeasibilityResult(True)
        x = gf2.null_space(gf2.transpose(matrix)).row(0)
        m2 = BitVector.unit(n, x.support()[0])
        witness = (x ^ m2, m2)
    else:
        words = _weight_words(n, domain.t, cw_scan_max_n)
        images = gf2.map_indices(words, matrix)
        _, first, inverse = np.unique(images, return_index=True, return_inverse=True)
        colliding = np.flatnonzero(first[inverse] != np.arange(words.size))
        if colliding.size == 0:
            return FeasibilityResult(True)
        j = int(colliding[0])
        witness = (BitVector(n, int(words[first[inverse[j]]])), BitVector(n, int(words[j])))

    logger.debug(f"Map on {n}-bit domain collides at {witness[0]} and {witness[1]}")
    return FeasibilityResult(False, witness)


def annihilator_space(domain: Domain, cw_scan_max_n: int = CW_SCAN_MAX_N) -> BitMatrix:
    """Basis of {a : m·a = 0 for every m in the domain}."""
    if isinstance(domain, FullDomain):
        return BitMatrix((), domain.bits)

    n = domain.n
    # Incremental echelon basis keyed by leading bit; stops once the span is full.
    basis: dict = {}
    for word in _weight_words(n, domain.t, cw_scan_max_n):
        w = int(word)
        while w:
            lead = w.bit_length()
            if lead not in basis:
                basis[lead] = w
                break
            w ^= basis[lead]
        if len(basis) == n:
            break
    span = BitMatrix(tuple(basis.values()), n)
    return gf2.null_space(span)
