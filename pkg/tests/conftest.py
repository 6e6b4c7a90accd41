import numpy as np
import pytest

from fewqma.rng import make_rng


@pytest.fixture
def rng():
    return make_rng(12345)


def numpy_eigvals_desc(h):
    return np.sort(np.linalg.eigvalsh(h))[::-1]
