import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def dense(dist: dict, k: int) -> list[float]:
    out = [0.0] * (k + 1)
    for a, q in dist.items():
        out[a] = q
    return out
