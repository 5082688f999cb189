import numpy as np
import pytest

from edgelab.config import settings
from edgelab.samplers import Family, SamplerModel
from edgelab.spectral import SymmetricSpectrum


@pytest.fixture
def diagonal():
    """Spectrum of diag(values) in the standard basis; values must be non-increasing."""

    def make(*values: float) -> SymmetricSpectrum:
        array = np.asarray(values, dtype=np.float64)
        return SymmetricSpectrum(array, np.eye(array.size))

    return make


@pytest.fixture
def random_psd():
    def make(n: int, seed: int) -> np.ndarray:
        frame = np.random.default_rng(seed).standard_normal((n, 2 * n))
        return frame @ frame.T

    return make


@pytest.fixture
def gaussian():
    def make(dim: int, seed: int = 0) -> SamplerModel:
        return SamplerModel(family=Family.GAUSSIAN, dim=dim, seed=seed)

    return make


@pytest.fixture(autouse=True)
def serial_jobs(monkeypatch):
    # worker pools cost more than the small runs in this suite
    monkeypatch.setattr(settings, "n_jobs", 1)


@pytest.fixture
def results_dir(tmp_path, monkeypatch):
    monkeypatch.setattr(settings, "results_dir", tmp_path)
    return tmp_path
