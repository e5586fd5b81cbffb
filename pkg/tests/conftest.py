import random

import pytest
from hypothesis import HealthCheck, settings

from soficshift.constructions import fixture, fixture_names

settings.register_profile(
    "soficshift",
    max_examples=60,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("soficshift")

DEFAULT_SEED = 20240601

IRREDUCIBLE_FIXTURES = [
    "one_loop",
    "even_shift",
    "golden_mean",
    "3cc_fischer",
    "2inv_left_fischer",
    "2inv_right_fischer",
    "ex52_fischer",
    "sync_irreducible",
]


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=DEFAULT_SEED, help="seed for the random rooted DAG family")


@pytest.fixture
def seed(request) -> int:
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed) -> random.Random:
    return random.Random(seed)


@pytest.fixture(params=fixture_names())
def fixture_graph(request):
    return fixture(request.param)


@pytest.fixture(params=IRREDUCIBLE_FIXTURES)
def irreducible_graph(request):
    return fixture(request.param)


@pytest.fixture
def even():
    return fixture("even_shift")


@pytest.fixture
def three_charge():
    return fixture("3cc_fischer")


@pytest.fixture
def gfc_justifying():
    return fixture("gfc_justifying")
