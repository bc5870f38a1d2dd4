import numpy as np
import pytest

from qcldpc import bundled_code
from qcldpc.code_model import ExponentMatrix, expand
from qcldpc.graph_analysis import TannerGraph


@pytest.fixture(scope="session")
def code1():
    return bundled_code("code1")


@pytest.fixture(scope="session")
def code1_pcm(code1):
    return expand(code1)


@pytest.fixture(scope="session")
def code1_graph(code1_pcm):
    return TannerGraph.from_pcm(code1_pcm)


@pytest.fixture(scope="session")
def code5():
    return bundled_code("code5")


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def toy_4cycle():
    """3x3 circulants, two weight-2 columns sharing both checks: one 4-cycle orbit."""
    return ExponentMatrix(np.array([[0, 0], [0, 0]]), 3)


def code1_fourcycle_pair(s=0):
    """A TS(2,2) member of the unique 4-cycle orbit: (col0, s) with (col2, s+47)."""
    return (0 * 128 + s % 128, 2 * 128 + (s + 47) % 128)
