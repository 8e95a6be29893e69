import numpy as np
import pytest

from stringpend import Discretization, InitialConditions, PhysicalParams, build_initial_state

# Rubber-string scenario used throughout: mu_bar = 0.025 kg/m, l = 1 m,
# EA = 40 N, M = 0.1 kg, offset attachment, N = 20, h = 1e-4 s.
RUBBER = dict(
    mu_bar=0.025,
    l=1.0,
    EA=40.0,
    M=0.1,
    rho_c=np.array([0.04, 0.01, 0.05]),
    J=np.array([
        [0.38, -0.04, -0.20],
        [-0.04, 0.58, -0.05],
        [-0.20, -0.05, 0.30],
    ]),
    g=9.81,
)
BODY_V0 = np.array([0.0, 0.2, -0.5])


@pytest.fixture
def params():
    return PhysicalParams(**RUBBER)


@pytest.fixture
def disc(params):
    return Discretization(params, N=20, h=1e-4)


@pytest.fixture
def state0(params, disc):
    return build_initial_state(params, disc, InitialConditions(body_velocity=BODY_V0))
