"""Binary linear codes with exact syndrome-table decoding, and constant-weight codes.

Desk-scale codes (n ≤ 24) stand in for the Goppa codes of classical McEliece:
the private decoder is an exhaustive syndrome table over every error of weight
at most ``t``, which is exact inside the correction radius.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Dict, Optional

import numpy as np

from . import gf2
from .errors import (
    BudgetError,
    DecodeError,
    DimensionError,
    NotFullRowRank,
    ParameterError,
    UnknownSyndrome,
)
from .gf2 import BitMatrix, BitVector, RngLike

logger = logging.getLogger(__name__)

# Minimum distance and syndrome tables are computed exhaustively.
MAX_CODE_LENGTH = 24

# Parity part of the standard-form Hamming [7,4] generator [I_4 | P].
_HAMMING_PARITY = ("110", "101", "011", "111")


@dataclass(frozen=True)
class LinearCode:
    """An [n, k, d] binary code with correction radius ``t``."""

    n: int
    k: int
    d: int
    t: int
    generator: BitMatrix
    parity_check: BitMatrix
    syndrome_table: Dict[int, int] = field(repr=False, compare=False)
    parity_check_t: BitMatrix = field(repr=False, compare=False)

    @property
    def G(self) -> BitMatrix:
        return self.generator

    @property
    def H(self) -> BitMatrix:
        return self.parity_check

    @property
    def radius(self) -> int:
        """Largest correctable weight ⌊(d−1)/2⌋."""
        return (self.d - 1) // 2

    @classmethod
    def from_generator(
        cls,
        generator: BitMatrix,
        t: Optional[int] = None,
        parity_check: Optional[BitMatrix] = None,
    ) -> "LinearCode":
        """Build a code from its generator, deriving d and the syndrome table.

        ``t=None`` selects the full radius; a larger ``t`` is rejected.
        """
        k, n = generator.shape
        if n > MAX_CODE_LENGTH:
            raise BudgetError(
                f"Code length {n} exceeds the exhaustive limit {MAX_CODE_LENGTH}"
            )
        if k >= n:
            raise ParameterError(f"Expected k < n, got k={k}, n={n}")
        if gf2.rank(generator) != k:
            raise NotFullRowRank(f"Generator of a [{n},{k}] code must have rank {k}")

        if parity_check is None:
            parity_check = gf2.null_space(generator)
        elif parity_check.shape != (n - k, n) or gf2.rank(parity_check) != n - k:
            raise ParameterError(
                f"Parity check must be a rank-{n - k} {n - k}x{n} matrix, "
                f"got shape {parity_check.shape}"
            )
        parity_check_t = gf2.transpose(parity_check)
        if any(gf2.mat_mul(generator, parity_check_t).row_bits):
            raise ParameterError("Generator and parity check violate G·Hᵀ = 0")

        d = minimum_distance(generator)
        radius = (d - 1) // 2
        if t is None:
            t = radius
        if t < 0 or t > radius:
            raise ParameterError(
                f"Correction radius t={t} infeasible for minimum distance d={d}"
            )

        table = _syndrome_table(n, t, parity_check_t)
        logger.debug(f"Built [{n},{k},{d}] code with t={t}, {len(table)} syndromes")
        return cls(
            n=n,
            k=k,
            d=d,
            t=t,
            generator=generator,
            parity_check=parity_check,
            syndrome_table=table,
            parity_check_t=parity_check_t,
        )


def _syndrome_table(n: int, t: int, parity_check_t: BitMatrix) -> Dict[int, int]:
    table: Dict[int, int] = {}
    for w in range(t + 1):
        for positions in combinations(range(n), w):
            error = 0
            for p in positions:
                error |= 1 << (n - 1 - p)
            s = gf2.vec_mat(BitVector(n, error), parity_check_t).value
            if s in table:
                raise ParameterError(
                    f"Syndrome collision for weight-{w} errors; t={t} is infeasible"
                )
            table[s] = error
    return table


def codewords(generator: BitMatrix) -> np.ndarray:
    """Every codeword ``m·G`` as integers, indexed by message ``m``."""
    if generator.rows > MAX_CODE_LENGTH:
        raise BudgetError(f"Cannot enumerate 2^{generator.rows} codewords")
    return gf2.basis_images(generator)


def minimum_distance(generator: BitMatrix) -> int:
    """True minimum distance by brute force over all nonzero codewords."""
    words = codewords(generator)
    return int(np.bitwise_count(words[1:]).min())


def hamming_7_4() -> LinearCode:
    """Standard-form [7,4,3] Hamming code, t = 1."""
    identity = gf2.identity(4).to_strings()
    generator = BitMatrix.from_strings([i + p for i, p in zip(identity, _HAMMING_PARITY)])
    parity = BitMatrix.from_strings(_HAMMING_PARITY)
    parity_check = gf2.hstack(gf2.transpose(parity), gf2.identity(3))
    return LinearCode.from_generator(generator, t=1, parity_check=parity_check)


def random_code(n: int, k: int, t: int, seed: RngLike = None) -> LinearCode:
    """Random [n, k] code; ``t`` is clamped to the true correction radius."""
    if n > MAX_CODE_LENGTH:
        raise BudgetError(f"Code length {n} exceeds the exhaustive limit {MAX_CODE_LENGTH}")
    if not 0 < k < n:
        raise ParameterError(f"Expected 0 < k < n, got k={k}, n={n}")
    generator = gf2.random_full_row_rank(k, n, seed)
    radius = (minimum_distance(generator) - 1) // 2
    if t > radius:
        logger.warning(f"Requested t={t} exceeds the radius {radius} of this [{n},{k}] code; using t={radius}")
        t = radius
    return LinearCode.from_generator(generator, t=max(t, 0))


def encode(code: LinearCode, m: BitVector) -> BitVector:
    if m.length != code.k:
        raise DimensionError(f"Message length {m.length} != k={code.k}")
    return gf2.vec_mat(m, code.generator)


def syndrome(code: LinearCode, c: BitVector) -> BitVector:
    if c.length != code.n:
        raise DimensionError(f"Word length {c.length} != n={code.n}")
    return gf2.vec_mat(c, code.parity_check_t)


def decode_error(code: LinearCode, s: BitVector) -> BitVector:
    """Minimal-weight error with syndrome ``s``, within radius ``t``."""
    if s.length != code.n - code.k:
        raise DimensionError(f"Syndrome length {s.length} != n-k={code.n - code.k}")
    try:
        return BitVector(code.n, code.syndrome_table[s.value])
    except KeyError:
        raise UnknownSyndrome(
            f"Syndrome {s} matches no error of weight <= {code.t}"
        ) from None


@dataclass(frozen=True)
class ConstantWeightCode:
    """Lexicographic combinadic code from k-bit messages to weight-t n-bit words."""

    n: int
    t: int

    def __post_init__(self) -> None:
        if self.n <= 0 or not 0 <= self.t <= self.n:
            raise ParameterError(f"Invalid constant-weight parameters n={self.n}, t={self.t}")

    @property
    def k(self) -> int:
        return comb(self.n, self.t).bit_length() - 1

    def unrank(self, index: int) -> int:
        """The ``index``-th weight-t word in lexicographic order."""
        if not 0 <= index < comb(self.n, self.t):
            raise ParameterError(f"Index {index} outside [0, C({self.n},{self.t}))")
        value, remaining = 0, self.t
        for pos in range(self.n):
            if remaining == 0:
                break
            with_zero = comb(self.n - pos - 1, remaining)
            if index >= with_zero:
                value |= 1 << (self.n - 1 - pos)
                index -= with_zero
                remaining -= 1
        return value

    def rank(self, value: int) -> int:
        index, remaining = 0, self.t
        for pos in range(self.n):
            if (value >> (self.n - 1 - pos)) & 1:
                index += comb(self.n - pos - 1, remaining)
                remaining -= 1
        return index


def cw_encode(cw: ConstantWeightCode, m: BitVector) -> BitVector:
    if m.length != cw.k:
        raise DimensionError(f"Message length {m.length} != k={cw.k}")
    return BitVector(cw.n, cw.unrank(m.value))


def cw_decode(cw: ConstantWeightCode, w: BitVector) -> BitVector:
    if w.length != cw.n:
        raise DimensionError(f"Word length {w.length} != n={cw.n}")
    if w.weight != cw.t:
        raise DecodeError(f"Word {w} has weight {w.weight}, expected {cw.t}")
    index = cw.rank(w.value)
    if index >> cw.k:
        raise DecodeError(f"Word {w} (rank {index}) is outside the image of 2^{cw.k} messages")
    return BitVector(cw.k, index)
