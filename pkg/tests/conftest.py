import logging

import numpy as np
import pytest
from fastapi.testclient import TestClient

from dispersao.app import app
from dispersao.dispersion import EvolutionTrace
from dispersao.ipeps import IpepsState
from dispersao.lattice import UnitCell, symmetry_point
from dispersao.schemas import EvolutionParams, TfimParams
from dispersao.tensor import Tensor

UP = np.array([1.0, 0.0])
PLUS = np.array([1.0, 1.0]) / np.sqrt(2)


def product_state(cell: UnitCell, vec, d_max: int = 1) -> IpepsState:
    """Estado produto D=1 com o mesmo vetor em todos os sítios."""
    shape = (2,) + (1,) * (2 * cell.dimensionality)
    tensors = {
        site: Tensor(np.asarray(vec, dtype=complex).reshape(shape))
        for site in cell.sites
    }
    weights = {bond: np.ones(1) for bond in cell.bonds}
    return IpepsState(cell, tensors, weights, d_max=d_max)


def make_trace(tau, c, k=None):
    k = k or symmetry_point('X', 2)
    return EvolutionTrace(k, np.asarray(tau, float), np.asarray(c, float))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def cell2():
    return UnitCell((2, 2))


@pytest.fixture
def cell3():
    return UnitCell((2, 2, 2))


@pytest.fixture
def para2d():
    return TfimParams(j=0.1, g=1.0, dimensionality=2)


@pytest.fixture
def quick_evolution():
    return EvolutionParams(dtau=0.01, max_steps=60, d_max=2, seed=0)


@pytest.fixture
def client():
    return TestClient(app)


@pytest.fixture(autouse=True)
def _reset_package_logger():
    # a CLI instala um handler no stderr capturado pelo CliRunner
    yield
    logger = logging.getLogger('dispersao')
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    logger.setLevel(logging.NOTSET)
