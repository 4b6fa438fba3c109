import numpy as np
import pytest

from holophase.spectral import Spectrum, standard_purification


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_level():
    """p = (0.7, 0.3) with the diagonal purification."""
    spec = Spectrum.from_values([0.7, 0.3])
    return spec, standard_purification(spec, np.eye(2))
