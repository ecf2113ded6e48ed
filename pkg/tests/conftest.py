import warnings

import pytest

from circsynth.linearize import linearize
from circsynth.model import build_ode
from circsynth.params import ModelParams


@pytest.fixture(scope="session")
def params():
    return ModelParams()


@pytest.fixture(scope="session")
def ode(params):
    return build_ode(params)


@pytest.fixture(scope="session")
def lti(ode, params):
    return linearize(ode, params.c_init)


@pytest.fixture(scope="session")
def reduced3(lti):
    from circsynth.mor import reduce

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return reduce(lti, 3)


@pytest.fixture(scope="session")
def minimal_ode():
    return build_ode(ModelParams(N_electrode=3, N_separator=2))
