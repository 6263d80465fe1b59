import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nscodec import AudioBuffer, CodecConfig, full_manifest, random_weights


@pytest.fixture(scope="session")
def default_cfg():
    return CodecConfig()


@pytest.fixture(scope="session")
def tensors(default_cfg):
    """Seeded full-size weights shared across the suite."""
    return random_weights(full_manifest(default_cfg), seed=1)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def make_noise(seconds: float, seed: int = 0, amplitude: float = 0.5) -> AudioBuffer:
    rng = np.random.default_rng(seed)
    n = int(round(seconds * 16000))
    return AudioBuffer(rng.uniform(-amplitude, amplitude, n).astype(np.float32))


@pytest.fixture
def noise_1s():
    return make_noise(1.0)
