"""Shared fixtures: boundary metrics and a prepared flow path.

The flowed path for the perturbed metric is session-scoped because the
roundness flow is the most expensive shared ingredient; every consumer
treats it as read-only.
"""

import numpy as np
import pytest

from ahext.geometry import AxisymmetricSurfaceMetric, BartnikData
from ahext.extensions import prepare_path

PERTURBED_COEFFS = [0.0, 0.1, 0.05]   # phi = 0.1 P_2 + 0.05 P_3

# one verdict line per acceptance criterion, echoed after the test run
ACCEPTANCE_VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def round_metric():
    return AxisymmetricSurfaceMetric.round_sphere(1.0)


@pytest.fixture(scope="session")
def perturbed_metric():
    return AxisymmetricSurfaceMetric.from_modes(1.0, PERTURBED_COEFFS)


@pytest.fixture(scope="session")
def perturbed_path(perturbed_metric):
    return prepare_path(perturbed_metric)


@pytest.fixture(scope="session")
def round_path(round_metric):
    return prepare_path(round_metric)


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
