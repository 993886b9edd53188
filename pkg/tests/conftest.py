import pytest

from antiplane import front_solver as fs
from antiplane.material import BodyForce, MaterialModel


@pytest.fixture(scope="session")
def model():
    return MaterialModel()


@pytest.fixture(scope="session")
def tanh_model():
    return MaterialModel.quadratic(1.0, BodyForce.TANH)


@pytest.fixture(scope="session")
def front_01(model):
    """Converged eps = 0.1 front on the default grid."""
    return fs.newton_solve(model, fs.asymptotic_seed(model, 0.1))
