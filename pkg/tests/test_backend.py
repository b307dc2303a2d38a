import numpy as np
import pytest

from hyperball import _kernels_py, backend
from hyperball.balls import ball_arrays

compiled = pytest.importorskip("hyperball._kernels")


def _inputs(seed, B=40, K=7, n=5):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-0.4, 0.4, (B, n))
    C = rng.uniform(-0.5, 0.5, (K, n))
    _, radius, center, alpha = ball_arrays(C)
    scale = alpha / rng.uniform(0.05, 2.0, K)
    pos = rng.integers(0, K, B).astype(np.int64)
    return X, center, radius, scale, pos


@pytest.mark.parametrize("seed", range(5))
def test_scores_agree(seed):
    X, center, radius, scale, _ = _inputs(seed)
    np.testing.assert_allclose(compiled.scores(X, center, radius, scale),
                               _kernels_py.scores(X, center, radius, scale), rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("seed", range(5))
def test_loss_grad_agree(seed):
    args = _inputs(seed)
    a = compiled.cls_loss_grad(*args)
    b = _kernels_py.cls_loss_grad(*args)
    assert a[0] == pytest.approx(b[0], rel=1e-13)
    for x, y in zip(a[1:], b[1:]):
        np.testing.assert_allclose(x, y, rtol=1e-11, atol=1e-15)


def test_saturation_handled_identically():
    X, center, radius, scale, pos = _inputs(0)
    scale = scale * 1e4
    a = compiled.cls_loss_grad(X, center, radius, scale, pos)
    b = _kernels_py.cls_loss_grad(X, center, radius, scale, pos)
    assert a[0] == pytest.approx(b[0], rel=1e-13)
    np.testing.assert_allclose(a[2], b[2], rtol=1e-11, atol=1e-15)


def test_switching():
    previous = backend.name()
    backend.use("python")
    assert backend.name() == "python"
    backend.use("compiled")
    assert backend.name() == "compiled"
    backend.use(previous)
    with pytest.raises(ValueError):
        backend.use("fortran")
