"""Shared fixtures: reference circuits, a small labeled dataset, AR(1) helpers.

Session scope keeps the simulated dataset out of per-test cost; tests must
therefore treat fixture objects as read-only.
"""

import numpy as np
import pytest

from cepclust import evaluation, signals


def ar1_series(n: int, pole: float, seed: int) -> signals.TimeSeries:
    """Unit white noise through ``1 / (1 - pole z^-1)``.

    The power cepstrum of this process has the closed form
    ``c(k) = 2 pole^k / k`` for ``k >= 1``, which several oracle tests
    compare against.
    """
    return signals.gen_lti_filtered_input(n, 1, seed, model=([1.0], [1.0, -pole]))


@pytest.fixture(scope="session")
def circuit_pair():
    """The two discretized reference circuits at the default sample period."""
    return evaluation.circuit_systems()


@pytest.fixture(scope="session")
def small_dataset(circuit_pair):
    """Eight labeled pairs (two systems, four input draws each) at N = 256."""
    return signals.build_labeled_dataset(256, (2, 1, 1), circuit_pair, seed=77)


@pytest.fixture(scope="session")
def medium_dataset(circuit_pair):
    """The N = 2^10 benchmark dataset of the default master seed."""
    return signals.build_labeled_dataset(1024, (10, 5, 5), circuit_pair, seed=1001)


@pytest.fixture
def rng():
    """A per-test generator for incidental randomness (never for signals)."""
    return np.random.default_rng(12345)
