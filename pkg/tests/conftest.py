"""Test fixtures and configuration."""

import os
import tempfile
from pathlib import Path

import numpy as np
import pytest

from quantum_mceliece import codes, pke
from quantum_mceliece.config import Config


@pytest.fixture(scope="session", autouse=True)
def test_environment():
    """Set up test environment."""
    # Ensure we're in the right directory
    original_cwd = os.getcwd()
    repo_root = Path(__file__).parent.parent
    os.chdir(repo_root)

    yield

    # Cleanup
    os.chdir(original_cwd)


@pytest.fixture(autouse=True)
def default_simulator_settings():
    """Reset simulator limits that a test (or a CLI --config) may have changed."""
    Config().apply()
    yield
    Config().apply()


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def hamming():
    return codes.hamming_7_4()


@pytest.fixture(scope="session")
def hamming_keys(hamming):
    return pke.keygen(hamming, seed=7)


@pytest.fixture(scope="session")
def double_keys(hamming):
    """[7,4] first layer and a random [15,7] second layer that corrects at least one error."""
    for seed in range(2024, 2124):
        second = codes.random_code(15, 7, 3, seed)
        if second.t >= 1:
            break
    return pke.keygen_double(hamming, second, seed)
