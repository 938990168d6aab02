import numpy as np
import pytest

from aadual.model import Params
from aadual.rng import SplitMix64


def make_params(n: int, mu: float = 0.5, u: float = -1.0, v: float = 0.3) -> Params:
    return Params(n=n, mu=mu, u=u, v=v)


@pytest.fixture
def params2() -> Params:
    return make_params(2)


@pytest.fixture
def rng() -> SplitMix64:
    return SplitMix64(20240817)


def interior_lambda(rng: SplitMix64, params: Params, slack: float = 1.0) -> np.ndarray:
    vals = [params.floor + 0.1 + rng.uniform(0.0, slack)]
    for _ in range(params.n - 1):
        vals.append(vals[-1] + params.mu + 0.1 + rng.uniform(0.0, slack))
    return np.array(vals[::-1])
