import numpy as np
import pytest

from basisopt.criteria import CriterionKind, make_criterion
from basisopt.galerkin import hbs_coefficients
from basisopt.grid import build_grid
from basisopt.reference import build_offline, default_measure
from basisopt.stiefel import OptimSettings, minimize


@pytest.fixture(scope="session")
def grid_main():
    """The reference setting: [-20, 20] with 1999 interior points."""
    return build_grid(20.0, 1999)


@pytest.fixture(scope="session")
def measure():
    return default_measure()


@pytest.fixture(scope="session")
def offline_l2(grid_main, measure):
    return build_offline(grid_main, measure, 10, "L2")


@pytest.fixture(scope="session")
def offline_h1(grid_main, measure):
    return build_offline(grid_main, measure, 10, "H1")


@pytest.fixture(scope="session")
def offline_l2_n5(grid_main, measure):
    return build_offline(grid_main, measure, 5, "L2")


@pytest.fixture(scope="session")
def optimized(offline_l2, offline_h1):
    """Optimized coefficient matrices from the HBS start, cached per
    (criterion, n_basis)."""
    cache = {}
    offline = {
        CriterionKind.JA_L2: offline_l2,
        CriterionKind.JA_H1: offline_h1,
        CriterionKind.JE: offline_l2,
    }

    def run(kind: CriterionKind, n_basis: int):
        key = (kind, n_basis)
        if key not in cache:
            fun = make_criterion(kind, offline[kind])
            cache[key] = minimize(
                fun, hbs_coefficients(10, n_basis), OptimSettings()
            )
        return cache[key]

    return run


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
