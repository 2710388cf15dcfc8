"""JSON artifacts (matrices, codes, states, keys) and CSV experiment reports.

Every JSON file carries a ``format_version``; files are written with sorted
keys and a fixed indent so reruns with the same seed are byte-identical.
Matrices are lists of '0'/'1' strings, one per row, index 0 leftmost.
"""

import csv
import json
import logging
from pathlib import Path
from typing import (
    Any,
    Dict,
    Iterable,
    List,
    Literal,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Type,
    TypeVar,
)

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator

from .codes import LinearCode
from .errors import FormatError
from .gf2 import BitMatrix
from .pke import DoubleKey, KeyPair, PrivateKey, PublicKey
from .qsim import StateVector

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
SUPPORTED_VERSIONS = frozenset({FORMAT_VERSION})

Model = TypeVar("Model", bound=BaseModel)


class VersionedFile(BaseModel):
    format_version: int = Field(default=FORMAT_VERSION, description="Artifact format version")

    @field_validator("format_version")
    @classmethod
    def _known_version(cls, value: int) -> int:
        if value not in SUPPORTED_VERSIONS:
            raise ValueError(f"Unsupported format_version {value}")
        return value


class MatrixFile(VersionedFile):
    cols: int = Field(..., gt=0)
    rows: List[str] = Field(default_factory=list)


class CodeFile(VersionedFile):
    n: int
    k: int
    d: int
    t: int
    G: List[str]
    H: List[str]


class StateFile(VersionedFile):
    qubits: int = Field(..., ge=0)
    amplitudes: List[Tuple[float, float]] = Field(..., description="[re, im] pairs, index b = Σ b_i 2^(q-1-i)")


class KeyParameters(BaseModel):
    n: int
    k: int
    t: int
    d: Optional[int] = None


class PublicKeyFile(VersionedFile):
    kind: Literal["public"] = "public"
    parameters: KeyParameters
    matrices: Dict[str, List[str]] = Field(..., description="G_prime")


class PrivateKeyFile(VersionedFile):
    kind: Literal["private"] = "private"
    parameters: KeyParameters
    matrices: Dict[str, List[str]] = Field(..., description="S, G, H and P")


class DoubleKeyFile(VersionedFile):
    kind: Literal["double"] = "double"
    first_public: PublicKeyFile
    second_public: PublicKeyFile
    first_private: Optional[PrivateKeyFile] = None
    second_private: Optional[PrivateKeyFile] = None


# -- model <-> domain ------------------------------------------------------


def _rows_to_matrix(rows: Sequence[str], cols: int, name: str) -> BitMatrix:
    if any(len(r) != cols or set(r) - {"0", "1"} for r in rows):
        raise FormatError(f"Matrix {name} must be rows of {cols} '0'/'1' characters")
    return BitMatrix(tuple(int(r, 2) for r in rows), cols)


def _matrix(matrices: Mapping[str, List[str]], name: str, cols: int) -> BitMatrix:
    if name not in matrices:
        raise FormatError(f"Key file is missing matrix {name}")
    return _rows_to_matrix(matrices[name], cols, name)


def matrix_to_file(a: BitMatrix) -> MatrixFile:
    return MatrixFile(cols=a.cols, rows=a.to_strings())


def matrix_from_file(f: MatrixFile) -> BitMatrix:
    return _rows_to_matrix(f.rows, f.cols, "matrix")


def code_to_file(code: LinearCode) -> CodeFile:
    return CodeFile(
        n=code.n,
        k=code.k,
        d=code.d,
        t=code.t,
        G=code.generator.to_strings(),
        H=code.parity_check.to_strings(),
    )


def code_from_file(f: CodeFile) -> LinearCode:
    """Rebuild the code (and its syndrome table) and check the stored parameters."""
    generator = _rows_to_matrix(f.G, f.n, "G")
    parity_check = _rows_to_matrix(f.H, f.n, "H")
    code = LinearCode.from_generator(generator, t=f.t, parity_check=parity_check)
    if (code.k, code.d) != (f.k, f.d):
        raise FormatError(f"Stored parameters k={f.k}, d={f.d} disagree with the matrices")
    return code


def state_to_file(s: StateVector) -> StateFile:
    return StateFile(
        qubits=s.qubits,
        amplitudes=[[float(a.real), float(a.imag)] for a in s.amplitudes],
    )


def state_from_file(f: StateFile, norm_tolerance: float = 1e-6) -> StateVector:
    amps = np.asarray(f.amplitudes, dtype=np.float64)
    if amps.shape != (1 << f.qubits, 2):
        raise FormatError(f"Expected {1 << f.qubits} [re, im] pairs for {f.qubits} qubits")
    values = amps[:, 0] + 1j * amps[:, 1]
    norm = float(np.linalg.norm(values))
    if abs(norm - 1.0) > norm_tolerance:
        raise FormatError(f"State norm {norm:.9g} deviates from 1 by more than {norm_tolerance}")
    return StateVector.from_amplitudes(values, normalize=True)


def public_key_to_file(pk: PublicKey) -> PublicKeyFile:
    return PublicKeyFile(
        parameters=KeyParameters(n=pk.n, k=pk.k, t=pk.t),
        matrices={"G_prime": pk.g_prime.to_strings()},
    )


def public_key_from_file(f: PublicKeyFile) -> PublicKey:
    p = f.parameters
    g_prime = _matrix(f.matrices, "G_prime", p.n)
    if g_prime.rows != p.k:
        raise FormatError(f"G_prime has {g_prime.rows} rows, parameters say k={p.k}")
    return PublicKey(g_prime=g_prime, t=p.t)


def private_key_to_file(sk: PrivateKey) -> PrivateKeyFile:
    code = sk.code
    return PrivateKeyFile(
        parameters=KeyParameters(n=code.n, k=code.k, t=code.t, d=code.d),
        matrices={
            "S": sk.scrambler.to_strings(),
            "G": code.generator.to_strings(),
            "H": code.parity_check.to_strings(),
            "P": sk.permutation.to_strings(),
        },
    )


def private_key_from_file(f: PrivateKeyFile) -> PrivateKey:
    p = f.parameters
    code = LinearCode.from_generator(
        _matrix(f.matrices, "G", p.n), t=p.t, parity_check=_matrix(f.matrices, "H", p.n)
    )
    if code.k != p.k or (p.d is not None and code.d != p.d):
        raise FormatError(f"Stored parameters k={p.k}, d={p.d} disagree with the matrices")
    return PrivateKey(
        scrambler=_matrix(f.matrices, "S", p.k),
        code=code,
        permutation=_matrix(f.matrices, "P", p.n),
    )


def double_key_to_file(dk: DoubleKey, include_private: bool = True) -> DoubleKeyFile:
    return DoubleKeyFile(
        first_public=public_key_to_file(dk.first.public),
        second_public=public_key_to_file(dk.second.public),
        first_private=private_key_to_file(dk.first.private) if include_private else None,
        second_private=private_key_to_file(dk.second.private) if include_private else None,
    )


def double_public_from_file(f: DoubleKeyFile) -> tuple[PublicKey, PublicKey]:
    return public_key_from_file(f.first_public), public_key_from_file(f.second_public)


def double_key_from_file(f: DoubleKeyFile) -> DoubleKey:
    if f.first_private is None or f.second_private is None:
        raise FormatError("Double key file carries no private halves")
    first_private = private_key_from_file(f.first_private)
    second_private = private_key_from_file(f.second_private)
    first_public, second_public = double_public_from_file(f)
    if first_private.public_key() != first_public or second_private.public_key() != second_public:
        raise FormatError("Public halves do not match S·G·P of the private halves")
    return DoubleKey(
        first=KeyPair(first_public, first_private),
        second=KeyPair(second_public, second_private),
    )


# -- files -----------------------------------------------------------------


def dumps(model: BaseModel) -> str:
    return json.dumps(model.model_dump(), indent=2, sort_keys=True) + "\n"


def save(model: BaseModel, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(model))
    logger.info(f"Wrote {type(model).__name__} to {path}")


def load(model_cls: Type[Model], path: str | Path) -> Model:
    """Parse ``path`` as ``model_cls``; malformed input raises FormatError."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FormatError(f"{path}: invalid JSON ({e})") from e
    try:
        return model_cls.model_validate(data)
    except ValidationError as e:
        raise FormatError(f"{path}: not a valid {model_cls.__name__}: {e}") from e


def write_report(
    path: str | Path,
    config: Mapping[str, Any],
    fieldnames: Sequence[str],
    rows: Iterable[Mapping[str, Any]],
) -> int:
    """CSV with a leading ``# config: <json>`` line; returns the row count."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", newline="") as f:
        f.write(f"# config: {json.dumps(dict(config), sort_keys=True)}\n")
        writer = csv.DictWriter(f, fieldnames=list(fieldnames), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
            count += 1
    logger.info(f"Wrote {count} report rows to {path}")
    return count


def read_report(path: str | Path) -> tuple[Dict[str, Any], List[Dict[str, str]]]:
    """Inverse of :func:`write_report`: the embedded config and the rows."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except UnicodeDecodeError as e:
        raise FormatError(f"{path}: not a UTF-8 report ({e})") from e
    if not lines or not lines[0].startswith("# config: "):
        raise FormatError(f"{path}: missing '# config:' header")
    try:
        config = json.loads(lines[0][len("# config: "):])
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid config header ({e})") from e
    if not isinstance(config, dict):
        raise FormatError(f"{path}: config header is not a JSON object")
    return config, list(csv.DictReader(lines[1:]))
