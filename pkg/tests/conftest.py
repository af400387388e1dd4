import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qdsig import ChannelModel, PhaseAlphabet, bundled_cost_matrix


@pytest.fixture(scope="session")
def alphabet():
    """The experiment's operating alphabet: N = 8 at mean photon number 0.16."""
    return PhaseAlphabet(8, math.sqrt(0.16))


@pytest.fixture(scope="session")
def measured_cost():
    return bundled_cost_matrix()


@pytest.fixture(scope="session")
def channel():
    return ChannelModel()


@pytest.fixture(scope="session")
def calibrated_channel():
    return ChannelModel.calibrated()
