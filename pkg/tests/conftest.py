import os

import pytest
from hypothesis import HealthCheck, settings

from esg.model import get_api

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def api():
    return get_api("stack")


@pytest.fixture
def sig(api):
    return api.method
