import numpy as np
import pytest

from chaossep.dynsys import LorenzParams, TimeSeries, generate, normalize


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_series(values, dt=0.05):
    return TimeSeries(np.asarray(values, dtype=float), dt)


@pytest.fixture(scope="session")
def lorenz_pair_50k():
    """Unit-variance x-components of two Lorenz systems, 50000 samples.

    Parameters differ by 20% so the components are uncorrelated but
    comparable; each is normalized by its own statistics, which is what
    the closed-form error-denominator algebra assumes.
    """
    p1 = LorenzParams()
    p2 = p1.scaled(1.2)
    t1 = generate(p1, n_samples=50000, seed_perturb=0)[0]
    t2 = generate(p2, n_samples=50000, seed_perturb=1)[0]
    return normalize(t1), normalize(t2)


@pytest.fixture(scope="session")
def lorenz_short():
    """One 2000-sample normalized Lorenz x-component for drive tests."""
    t = generate(LorenzParams(), n_samples=2000, seed_perturb=7)[0]
    return normalize(t)
