import numpy as np
import pytest

from hyperball import backend


@pytest.fixture(params=backend.available())
def kernel_backend(request):
    """Run a test once per available kernel backend."""
    previous = backend.name()
    backend.use(request.param)
    yield request.param
    backend.use(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_ball_points(rng, count, dim, max_norm=0.99):
    """Points with uniformly distributed norm in [0, max_norm] and random direction."""
    dirs = rng.standard_normal((count, dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return dirs * rng.uniform(0.0, max_norm, size=(count, 1))


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("tests.test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
