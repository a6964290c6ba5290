import pytest

from pspectral.eigensolver import mu_p
from pspectral.ptrig import sin_p


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # load (or compile) the jitted kernels once so timed checks measure the numerics
    sin_p(0.3, 2.5)
    mu_p(2.0, 1.0, 1.0, 1e-6)
