import numpy as np
import pytest

from lrc.core import ExampleDistribution, HypothesisMatrix, TargetPrior, make_rng
from lrc.datagen import generate_random


def random_instance(seed, max_rows=16, max_cols=8, alphabet=None):
    """Small random concept class with a random strictly positive P."""
    rng = np.random.default_rng(seed)
    a = int(alphabet or rng.integers(2, 4))
    while True:
        n = int(rng.integers(2, max_rows + 1))
        m = int(rng.integers(1, max_cols + 1))
        if a**m >= n and a**n >= m:
            break
    h = generate_random(n, m, a, seed=seed)
    p = rng.dirichlet(np.ones(m)) * 0.9 + 0.1 / m
    p /= p.sum()
    return h, ExampleDistribution(p)


def random_prior(n, seed, zero_frac=0.0):
    rng = np.random.default_rng(seed + 7919)
    q = rng.dirichlet(np.ones(n))
    if zero_frac:
        q[rng.random(n) < zero_frac] = 0.0
        if not q.any():
            q[0] = 1.0
    return TargetPrior(q / q.sum())


@pytest.fixture
def three_rows():
    # h1=(0,0), h2=(1,0), h3=(1,1)
    return HypothesisMatrix([[0, 0], [1, 0], [1, 1]]), ExampleDistribution.uniform(2)


@pytest.fixture
def rng():
    return make_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
