import numpy as np
import pytest

from sl2heat.group import make_haar_grid


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def small_grid():
    """Compact Haar box for integrands supported near the identity."""
    return make_haar_grid(s_max=4.0, x_max=4.0, n_theta=16,
                          s_nodes_per_unit=16, x_nodes_per_panel=16)


@pytest.fixture(scope="session")
def norm_grid():
    """Wide-x box used for L2 norms of kernel slices (theta-free integrands)."""
    return make_haar_grid(s_max=8.0, x_max=16.0, n_theta=8)


def random_group_element(rng, scale=1.0):
    from sl2heat.group import algebra_element, exp_sl2
    z1 = algebra_element(*rng.normal(size=3) * scale)
    z2 = algebra_element(*rng.normal(size=3) * scale)
    return exp_sl2(z1) @ exp_sl2(z2)
