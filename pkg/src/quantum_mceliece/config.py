"""Configuration management for quantum-mceliece runs.

A run configuration fixes the master seed, the simulator limits, the codes
behind each encryption layer and the experiment parameters. It is loaded
from YAML (``config/defaults.yaml`` ships with the repository) and embedded
in every report so a run can be reproduced from its output alone.
"""

from pathlib import Path
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, Field

from . import codes, qsim
from .codes import LinearCode
from .gf2 import RngLike


class QubitSettings(BaseModel):
    """Simulator limits."""

    max_qubits: int = Field(default=24, gt=0, description="Largest simulated register")
    tolerance: float = Field(default=1e-9, gt=0, description="Norm and fidelity tolerance")
    support_tolerance: float = Field(
        default=1e-10, gt=0, description="Amplitudes at or below this are outside the support"
    )
    state_norm_tolerance: float = Field(
        default=1e-6, gt=0, description="Largest norm deviation accepted when loading a state file"
    )


class CodeSettings(BaseModel):
    """Which code backs an encryption layer."""

    kind: Literal["hamming7_4", "random"] = "hamming7_4"
    n: int = Field(default=7, gt=0)
    k: int = Field(default=4, gt=0)
    t: int = Field(default=1, ge=0, description="Requested radius; clamped to the true one")

    def build(self, seed: RngLike = None) -> LinearCode:
        if self.kind == "hamming7_4":
            return codes.hamming_7_4()
        return codes.random_code(self.n, self.k, self.t, seed)


class SearchSettings(BaseModel):
    engine: Literal["greedy", "random", "exhaustive"] = "greedy"
    budget: int = Field(default=32, ge=0, description="Random restarts / random draws")
    t: int = Field(default=2, ge=0, description="Error weight behind the leak probability columns")
    exhaustive_max_n: int = Field(default=20, gt=0)


class ExperimentSettings(BaseModel):
    trials: int = Field(default=10_000, gt=0)
    cw_scan_max_n: int = Field(default=24, gt=0, description="Largest constant-weight domain scanned")


class Config(BaseModel):
    """Main configuration class."""

    config_path: Optional[str] = Field(
        default=None, description="Path to the loaded config file"
    )
    seed: int = Field(default=0, ge=0, description="Master seed")
    qubits: QubitSettings = Field(default_factory=QubitSettings)
    first_code: CodeSettings = Field(default_factory=CodeSettings)
    second_code: CodeSettings = Field(
        default_factory=lambda: CodeSettings(kind="random", n=15, k=7, t=3)
    )
    search: SearchSettings = Field(default_factory=SearchSettings)
    experiments: ExperimentSettings = Field(default_factory=ExperimentSettings)

    @classmethod
    def load(cls, config_path: str) -> "Config":
        """Load configuration from a YAML file."""
        path = Path(config_path)
        if not path.exists():
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

        with open(path, "r") as f:
            config_data = yaml.safe_load(f) or {}

        if not isinstance(config_data, dict):
            raise ValueError(f"Invalid configuration in {config_path}: expected a mapping")

        config = cls(**config_data)
        config.config_path = config_path
        return config

    def save(self, config_path: str) -> None:
        """Save configuration to a YAML file."""
        path = Path(config_path)
        path.parent.mkdir(parents=True, exist_ok=True)

        config_dict = self.model_dump(exclude={"config_path"})

        with open(path, "w") as f:
            yaml.dump(config_dict, f, default_flow_style=False, sort_keys=False)

    def apply(self) -> None:
        """Push the simulator limits into :mod:`quantum_mceliece.qsim`."""
        qsim.configure(
            max_qubits=self.qubits.max_qubits,
            tolerance=self.qubits.tolerance,
            support_tolerance=self.qubits.support_tolerance,
        )

    def report_header(self) -> dict:
        """The configuration as embedded in report files."""
        return self.model_dump(exclude={"config_path"})
