import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# one reproducible profile for every property test; the suite doubles as a
# determinism check so example shrinking noise is unwelcome
settings.register_profile(
    "suite",
    derandomize=True,
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
