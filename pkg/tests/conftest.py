import numpy as np
import pytest

from densolve import BlockedBackend, ReferenceBackend


@pytest.fixture(params=["reference", "blocked"])
def backend(request):
    if request.param == "reference":
        return ReferenceBackend()
    return BlockedBackend()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
