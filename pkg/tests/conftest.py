import pytest

from hyperdomain.domain import build_domain
from hyperdomain.manifold import build_system


@pytest.fixture
def lens_domain():
    return build_domain((-1.0, 1.0), (0,))


@pytest.fixture
def lens_system(lens_domain):
    return build_system(lens_domain, (1, 1))


@pytest.fixture
def pinch_domain():
    return build_domain((0.0, 1.0, 2.0), (0, 0))


@pytest.fixture
def open_domain():
    # lens, first-interval open factor over [0, 1], pinch at 1
    return build_domain((0.0, 1.0, 2.0), (1, 0))
