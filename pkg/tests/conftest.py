import pytest
from hypothesis import HealthCheck, settings

from ramseylab.builder import build_AB, glue_lines
from ramseylab.incidence import extract_incidence
from ramseylab.predim import SQRT2_MINUS_1

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def ab():
    """(A, B, params, report) for alpha = sqrt2 - 1, n = 3, C = 17."""
    return build_AB(SQRT2_MINUS_1, 3, 17)


@pytest.fixture(scope="session")
def chain3(ab):
    A, B, _, _ = ab
    g = glue_lines(B, A, "chain", 3, SQRT2_MINUS_1)
    return g, extract_incidence(g.graph, A, B, SQRT2_MINUS_1)


@pytest.fixture(scope="session")
def star3(ab):
    A, B, _, _ = ab
    g = glue_lines(B, A, "star", 3, SQRT2_MINUS_1)
    return g, extract_incidence(g.graph, A, B, SQRT2_MINUS_1)
