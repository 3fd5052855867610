import math

import numpy as np
import pytest

from affinespheres import AnalyticCurve3, check_admissible, conormal_from_metric

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="session")
def circle_pair():
    """Admissible pair for the unit circle with constant metric m = 1."""
    alpha = AnalyticCurve3.from_strings(("cos(s)", "sin(s)", "0"), {}, (0.0, TWO_PI))
    conormal = conormal_from_metric(alpha, "m", {"m": 1.0})
    return check_admissible(alpha, conormal)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260809)
