import numpy as np
import pytest

from kickedchain import SpinState


@pytest.fixture
def rng():
    return np.random.default_rng(987654321)


@pytest.fixture
def make_random_state(rng):
    def _make(n_sites: int) -> SpinState:
        amps = rng.normal(size=n_sites) + 1j * rng.normal(size=n_sites)
        return SpinState(amps / np.linalg.norm(amps))

    return _make
