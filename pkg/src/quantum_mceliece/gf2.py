"""Exact GF(2) linear algebra on bit-packed vectors and matrices.

Rows are stored as Python integers. Bit index 0 is the leftmost character of a
textual rendering and the most significant bit of the integer, so the integer
value of a vector doubles as its basis-state index in the simulator.

All elimination uses the leftmost-pivot rule, which makes ranks, inverses,
null spaces and the canonical right inverse deterministic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DimensionError,
    NotFullRowRank,
    ParameterError,
    SamplingError,
    SingularMatrix,
)

logger = logging.getLogger(__name__)

RngLike = np.random.Generator | int | Sequence[int] | None

# Rejection loops for invertible and full-row-rank draws.
MAX_SAMPLING_TRIES = 256


def as_rng(seed: RngLike) -> np.random.Generator:
    """Return a numpy Generator for a seed, a seed sequence or an existing generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _pack_row(bits: np.ndarray) -> int:
    """Pack a 1-D array of 0/1 values into an integer, index 0 most significant."""
    if bits.size == 0:
        return 0
    packed = np.packbits(bits.astype(np.uint8) & 1)
    return int.from_bytes(packed.tobytes(), "big") >> (8 * packed.size - bits.size)


def _unpack_row(value: int, length: int) -> np.ndarray:
    if length == 0:
        return np.zeros(0, dtype=np.uint8)
    nbytes = (length + 7) // 8
    raw = (value << (8 * nbytes - length)).to_bytes(nbytes, "big")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[:length]


def _parse_bits(text: str) -> int:
    text = text.strip()
    if any(ch not in "01" for ch in text):
        raise ParameterError(f"Bit string must contain only '0'/'1': {text!r}")
    return int(text, 2) if text else 0


@dataclass(frozen=True)
class BitVector:
    """Row vector over GF(2)."""

    length: int
    value: int = 0

    def __post_init__(self) -> None:
        if self.length < 0:
            raise DimensionError(f"Negative vector length: {self.length}")
        if self.value < 0 or self.value >> self.length:
            raise DimensionError(
                f"Value {self.value} does not fit in {self.length} bits"
            )

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, 0)

    @classmethod
    def unit(cls, length: int, index: int) -> "BitVector":
        """Vector with a single 1 at position ``index`` (0 = leftmost)."""
        if not 0 <= index < length:
            raise DimensionError(f"Index {index} outside vector of length {length}")
        return cls(length, 1 << (length - 1 - index))

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        text = text.strip()
        return cls(len(text), _parse_bits(text))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        return cls.from_array(np.fromiter(bits, dtype=np.uint8))

    @classmethod
    def from_array(cls, array: np.ndarray) -> "BitVector":
        flat = np.asarray(array).reshape(-1)
        return cls(flat.size, _pack_row(flat))

    def to_string(self) -> str:
        return format(self.value, f"0{self.length}b") if self.length else ""

    def to_array(self) -> np.ndarray:
        return _unpack_row(self.value, self.length)

    def bit(self, index: int) -> int:
        if not 0 <= index < self.length:
            raise DimensionError(
                f"Index {index} outside vector of length {self.length}"
            )
        return (self.value >> (self.length - 1 - index)) & 1

    def support(self) -> List[int]:
        """Positions holding a 1, left to right."""
        return [i for i in range(self.length) if self.bit(i)]

    @property
    def weight(self) -> int:
        return self.value.bit_count()

    def dot(self, other: "BitVector") -> int:
        """Inner product mod 2."""
        self._check_same_length(other)
        return (self.value & other.value).bit_count() & 1

    def _check_same_length(self, other: "BitVector") -> None:
        if self.length != other.length:
            raise DimensionError(
                f"Vector lengths differ: {self.length} != {other.length}"
            )

    def __xor__(self, other: "BitVector") -> "BitVector":
        self._check_same_length(other)
        return BitVector(self.length, self.value ^ other.value)

    def __len__(self) -> int:
        return self.length

    def __iter__(self) -> Iterator[int]:
        return (self.bit(i) for i in range(self.length))

    def __str__(self) -> str:
        return self.to_string()


@dataclass(frozen=True)
class BitMatrix:
    """Dense matrix over GF(2), one packed integer per row.

    A matrix may have zero rows (an empty basis); the column count is always
    positive.
    """

    row_bits: Tuple[int, ...]
    cols: int

    def __post_init__(self) -> None:
        if self.cols <= 0:
            raise DimensionError(f"Matrix must have a positive column count: {self.cols}")
        object.__setattr__(self, "row_bits", tuple(int(r) for r in self.row_bits))
        for r in self.row_bits:
            if r < 0 or r >> self.cols:
                raise DimensionError(f"Row value {r} does not fit in {self.cols} bits")

    @property
    def rows(self) -> int:
        return len(self.row_bits)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls((0,) * rows, cols)

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> "BitMatrix":
        if not rows:
            raise DimensionError("Cannot infer column count from an empty row list")
        widths = {len(r.strip()) for r in rows}
        if len(widths) != 1:
            raise DimensionError(f"Rows have differing lengths: {sorted(widths)}")
        return cls(tuple(_parse_bits(r) for r in rows), widths.pop())

    @classmethod
    def from_vectors(cls, vectors: Sequence[BitVector], cols: Optional[int] = None) -> "BitMatrix":
        if cols is None:
            if not vectors:
                raise DimensionError("Cannot infer column count from no vectors")
            cols = vectors[0].length
        if any(v.length != cols for v in vectors):
            raise DimensionError("Vectors have differing lengths")
        return cls(tuple(v.value for v in vectors), cols)

    @classmethod
    def from_array(cls, array: np.ndarray) -> "BitMatrix":
        arr = np.asarray(array)
        if arr.ndim != 2:
            raise DimensionError(f"Expected a 2-D array, got shape {arr.shape}")
        return cls(tuple(_pack_row(row) for row in arr), arr.shape[1])

    def to_array(self) -> np.ndarray:
        if not self.row_bits:
            return np.zeros((0, self.cols), dtype=np.uint8)
        return np.stack([_unpack_row(r, self.cols) for r in self.row_bits])

    def to_strings(self) -> List[str]:
        return [format(r, f"0{self.cols}b") for r in self.row_bits]

    def row(self, index: int) -> BitVector:
        return BitVector(self.cols, self.row_bits[index])

    def column(self, index: int) -> BitVector:
        if not 0 <= index < self.cols:
            raise DimensionError(f"Column {index} outside matrix with {self.cols} columns")
        shift = self.cols - 1 - index
        value = 0
        for r in self.row_bits:
            value = (value << 1) | ((r >> shift) & 1)
        return BitVector(self.rows, value)

    def __xor__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"Shapes differ: {self.shape} != {other.shape}")
        return BitMatrix(
            tuple(a ^ b for a, b in zip(self.row_bits, other.row_bits)), self.cols
        )

    def __str__(self) -> str:
        return "\n".join(self.to_strings())


def identity(n: int) -> BitMatrix:
    return BitMatrix(tuple(1 << (n - 1 - i) for i in range(n)), n)


def transpose(a: BitMatrix) -> BitMatrix:
    if a.rows == 0:
        raise DimensionError("Cannot transpose a matrix with no rows")
    return BitMatrix.from_array(a.to_array().T)


def hstack(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.rows != b.rows:
        raise DimensionError(f"Row counts differ: {a.rows} != {b.rows}")
    return BitMatrix(
        tuple((x << b.cols) | y for x, y in zip(a.row_bits, b.row_bits)),
        a.cols + b.cols,
    )


def vstack(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.cols != b.cols:
        raise DimensionError(f"Column counts differ: {a.cols} != {b.cols}")
    return BitMatrix(a.row_bits + b.row_bits, a.cols)


def _combine_rows(selector: int, n_rows: int, row_bits: Sequence[int]) -> int:
    acc = 0
    for i, row in enumerate(row_bits):
        if (selector >> (n_rows - 1 - i)) & 1:
            acc ^= row
    return acc


def vec_mat(v: BitVector, a: BitMatrix) -> BitVector:
    """Row vector times matrix mod 2 (XOR of the rows selected by ``v``)."""
    if v.length != a.rows:
        raise DimensionError(
            f"Cannot multiply length-{v.length} vector by {a.rows}x{a.cols} matrix"
        )
    return BitVector(a.cols, _combine_rows(v.value, a.rows, a.row_bits))


def mat_mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.cols != b.rows:
        raise DimensionError(
            f"Inner dimensions disagree: {a.rows}x{a.cols} times {b.rows}x{b.cols}"
        )
    return BitMatrix(
        tuple(_combine_rows(r, b.rows, b.row_bits) for r in a.row_bits), b.cols
    )


def map_indices(indices: np.ndarray, a: BitMatrix) -> np.ndarray:
    """Multiply every integer in ``indices`` (as a row vector) by ``a``.

    Vectorized form of :func:`vec_mat` over basis-state indices; both
    dimensions must fit a signed 64-bit word.
    """
    if a.rows > 62 or a.cols > 62:
        raise DimensionError(f"Index maps support at most 62 bits, got {a.shape}")
    idx = np.asarray(indices, dtype=np.int64)
    out = np.zeros_like(idx)
    for i, row in enumerate(a.row_bits):
        if row:
            selected = (idx >> (a.rows - 1 - i)) & 1
            out ^= np.where(selected == 1, np.int64(row), np.int64(0))
    return out


def basis_images(a: BitMatrix) -> np.ndarray:
    """Images ``b·A`` of every basis index ``b`` in ``[0, 2^rows)``."""
    return map_indices(np.arange(1 << a.rows, dtype=np.int64), a)


def _rref(
    row_bits: Sequence[int], cols: int, track: Optional[List[int]] = None
) -> Tuple[List[int], List[int]]:
    """Reduced row echelon form with leftmost pivots.

    Row operations are mirrored on ``track`` when given. Returns the reduced
    rows and the pivot columns.
    """
    rows = list(row_bits)
    pivots: List[int] = []
    r = 0
    for col in range(cols):
        if r == len(rows):
            break
        mask = 1 << (cols - 1 - col)
        pivot = next((i for i in range(r, len(rows)) if rows[i] & mask), None)
        if pivot is None:
            continue
        if pivot != r:
            rows[r], rows[pivot] = rows[pivot], rows[r]
            if track is not None:
                track[r], track[pivot] = track[pivot], track[r]
        for i in range(len(rows)):
            if i != r and rows[i] & mask:
                rows[i] ^= rows[r]
                if track is not None:
                    track[i] ^= track[r]
        pivots.append(col)
        r += 1
    return rows, pivots


def rank(a: BitMatrix) -> int:
    return len(_rref(a.row_bits, a.cols)[1])


def invert(a: BitMatrix) -> BitMatrix:
    """Inverse of a square matrix via Gauss-Jordan elimination."""
    if a.rows != a.cols:
        raise DimensionError(f"Only square matrices can be inverted, got {a.shape}")
    n = a.rows
    track = list(identity(n).row_bits)
    _, pivots = _rref(a.row_bits, n, track)
    if len(pivots) < n:
        raise SingularMatrix(f"Matrix has rank {len(pivots)} < {n}")
    return BitMatrix(tuple(track), n)


def right_inverse(g: BitMatrix) -> BitMatrix:
    """Canonical right inverse ``X`` with ``G·X = I_k``.

    Solves ``G·X = I`` with every free variable set to zero: after ``E·G = R``
    (R in reduced echelon form) the pivot rows of ``X`` are the rows of ``E``.
    """
    k, n = g.shape
    if k > n:
        raise NotFullRowRank(f"A {k}x{n} matrix cannot have full row rank {k}")
    track = list(identity(k).row_bits)
    _, pivots = _rref(g.row_bits, n, track)
    if len(pivots) < k:
        raise NotFullRowRank(f"Matrix has rank {len(pivots)} < {k}")
    rows = [0] * n
    for i, p in enumerate(pivots):
        rows[p] = track[i]
    return BitMatrix(tuple(rows), k)


def right_inverse_member(g: BitMatrix, g1inv: BitMatrix, u: BitMatrix) -> BitMatrix:
    """Right inverse ``G1inv ⊕ U ⊕ G1inv·G·U`` selected by an n×k matrix ``U``."""
    k, n = g.shape
    if g1inv.shape != (n, k) or u.shape != (n, k):
        raise DimensionError(
            f"Expected {n}x{k} inverse and U, got {g1inv.shape} and {u.shape}"
        )
    if mat_mul(g, g1inv) != identity(k):
        raise ParameterError("G1inv is not a right inverse of G")
    return g1inv ^ u ^ mat_mul(g1inv, mat_mul(g, u))


def null_space(a: BitMatrix) -> BitMatrix:
    """Basis (as rows) of ``{x : A·xᵀ = 0}``; may have zero rows."""
    reduced, pivots = _rref(a.row_bits, a.cols)
    pivot_set = set(pivots)
    basis = []
    for free in range(a.cols):
        if free in pivot_set:
            continue
        free_mask = 1 << (a.cols - 1 - free)
        x = free_mask
        for i, p in enumerate(pivots):
            if reduced[i] & free_mask:
                x |= 1 << (a.cols - 1 - p)
        basis.append(x)
    return BitMatrix(tuple(basis), a.cols)


def is_permutation(a: BitMatrix) -> bool:
    if a.rows != a.cols:
        return False
    if any(r.bit_count() != 1 for r in a.row_bits):
        return False
    return len(set(a.row_bits)) == a.rows


# -- sampling --------------------------------------------------------------


def random_matrix(rows: int, cols: int, rng: RngLike = None) -> BitMatrix:
    gen = as_rng(rng)
    return BitMatrix.from_array(gen.integers(0, 2, size=(rows, cols), dtype=np.uint8))


def random_vector(n: int, rng: RngLike = None) -> BitVector:
    gen = as_rng(rng)
    return BitVector.from_array(gen.integers(0, 2, size=n, dtype=np.uint8))


def random_weight_vector(
    n: int, t: int, rng: RngLike = None, leq_weight: bool = False
) -> BitVector:
    """Uniform vector of weight exactly ``t`` (or uniform over weight ``<= t``)."""
    if t < 0 or t > n:
        raise ParameterError(f"Weight {t} is infeasible for length {n}")
    gen = as_rng(rng)
    w = t
    if leq_weight:
        counts = np.array([float(comb(n, j)) for j in range(t + 1)])
        w = int(gen.choice(t + 1, p=counts / counts.sum()))
    positions = gen.choice(n, size=w, replace=False) if w else []
    value = 0
    for p in positions:
        value |= 1 << (n - 1 - int(p))
    return BitVector(n, value)


def random_permutation(n: int, rng: RngLike = None) -> BitMatrix:
    gen = as_rng(rng)
    order = gen.permutation(n)
    return BitMatrix(tuple(1 << (n - 1 - int(j)) for j in order), n)


def random_full_row_rank(k: int, n: int, rng: RngLike = None) -> BitMatrix:
    if k > n:
        raise ParameterError(f"A {k}x{n} matrix cannot have full row rank")
    gen = as_rng(rng)
    for attempt in range(MAX_SAMPLING_TRIES):
        candidate = random_matrix(k, n, gen)
        if rank(candidate) == k:
            logger.debug(f"Full-row-rank {k}x{n} draw accepted after {attempt + 1} tries")
            return candidate
    raise SamplingError(f"No full-row-rank {k}x{n} matrix in {MAX_SAMPLING_TRIES} draws")


def random_invertible(n: int, rng: RngLike = None) -> BitMatrix:
    return random_full_row_rank(n, n, rng)


SAMPLE_KINDS = (
    "matrix",
    "vector",
    "weight_t_vector",
    "invertible",
    "permutation",
    "full_row_rank",
)


def sample(
    kind: str,
    dims: Tuple[int, ...],
    seed: RngLike = None,
    t: Optional[int] = None,
    leq_weight: bool = False,
) -> BitMatrix | BitVector:
    """Seeded draw of a matrix or vector of the requested kind.

    ``dims`` is ``(rows, cols)`` for matrices, ``(n,)`` for vectors and
    ``(n,)`` for square kinds.
    """
    if kind == "matrix":
        return random_matrix(dims[0], dims[1], seed)
    if kind == "vector":
        return random_vector(dims[0], seed)
    if kind == "weight_t_vector":
        if t is None:
            raise ParameterError("weight_t_vector sampling requires t")
        return random_weight_vector(dims[0], t, seed, leq_weight=leq_weight)
    if kind == "invertible":
        if len(dims) == 2 and dims[0] != dims[1]:
            raise DimensionError(f"Invertible matrices must be square, got {dims}")
        return random_invertible(dims[0], seed)
    if kind == "permutation":
        return random_permutation(dims[0], seed)
    if kind == "full_row_rank":
        return random_full_row_rank(dims[0], dims[1], seed)
    raise ParameterError(f"Unknown sample kind: {kind} (expected one of {SAMPLE_KINDS})")
