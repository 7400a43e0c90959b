import numpy as np
import pytest
from scipy.optimize import brentq

from splitlab.models import model_zoo


@pytest.fixture(scope="session")
def stretch_root():
    """Real root of x^3 = x^2 + x + 1, found independently of any eigensolver."""
    return brentq(lambda x: x**3 - x**2 - x - 1.0, 1.0, 2.0, xtol=1e-15)


@pytest.fixture(scope="session")
def cat3():
    return model_zoo("cat3")


@pytest.fixture(scope="session")
def identity3():
    return model_zoo("identity")


@pytest.fixture(scope="session")
def contact():
    return model_zoo("contact_chart")


@pytest.fixture(scope="session")
def perturbed001():
    # session scope shares the memoized refined-splitting evaluations
    return model_zoo("perturbed_auto", epsilon=0.01)


@pytest.fixture(scope="session")
def skew002():
    return model_zoo("skew_shear", epsilon=0.02, tau=0.25)


@pytest.fixture()
def base_point():
    return np.array([0.1, 0.2, 0.3])
