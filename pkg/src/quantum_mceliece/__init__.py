"""Package initialization for quantum_mceliece."""

__version__ = "0.1.0"
__description__ = "Desk-scale quantum McEliece encryption, double encryption and attacks"

from .codes import ConstantWeightCode, LinearCode
from .config import Config
from .gf2 import BitMatrix, BitVector
from .pke import DoubleKey, KeyPair, PrivateKey, PublicKey
from .qsim import StateVector

__all__ = [
    "BitMatrix",
    "BitVector",
    "Config",
    "ConstantWeightCode",
    "DoubleKey",
    "KeyPair",
    "LinearCode",
    "PrivateKey",
    "PublicKey",
    "StateVector",
]
