import os
import sys

import pytest

# Package modules import each other by bare name
sys.path.append(os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "wavepacket"))

from config import Settings  # noqa: E402
from models import FrequencyProfile, Model, ModelFamily, PhysicalConstants  # noqa: E402


@pytest.fixture
def units():
    return PhysicalConstants(1.0, 1.0)


@pytest.fixture
def settings():
    return Settings(output_stride=1)


@pytest.fixture
def make_model(units):
    def _make(family: ModelFamily, omega: float = 1.0, gamma: float = 0.0, constants=None) -> Model:
        return Model(family, constants or units, gamma, FrequencyProfile.constant(omega))
    return _make


@pytest.fixture
def make_state():
    from models import ClassicalState, RiccatiVar, SystemState

    def _make(c: complex, eta: float = 0.0, eta_dot: float = 0.0, t: float = 0.0, tag=None) -> SystemState:
        riccati = RiccatiVar(complex(c), tag) if tag is not None else RiccatiVar(complex(c))
        return SystemState(t, ClassicalState(eta, eta_dot), riccati, 0.0)
    return _make
