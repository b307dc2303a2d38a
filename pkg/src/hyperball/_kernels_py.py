"""Pure numpy versions of the hot kernels.

Mirrors ``_kernels.pyx`` argument for argument. Used when the compiled
extension is unavailable or the python backend is selected explicitly.
"""

import numpy as np

# -log(1e-12): the BCE log argument is clamped at 1e-12
LOSS_CAP = 27.631021115928547


def _softplus(z):
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def _sigmoid(z):
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def scores(X, center, radius, scale):
    """``scale_i * (radius_i - |center_i - x_b|)`` as a (B, K) array."""
    diff = center[None, :, :] - X[:, None, :]
    D = np.sqrt(np.sum(diff * diff, axis=-1))
    return scale[None, :] * (radius[None, :] - D)


def cls_loss_grad(X, center, radius, scale, pos):
    """Assumed-negative BCE over a batch and its first-order sensitivities.

    Returns ``(loss, S, dX, dRadius, E, dScale)`` where ``loss`` is the mean
    over batch and labels, ``S`` the (B, K) scores, ``dX`` the (B, n)
    gradient w.r.t. the projected points, ``dRadius`` (K,) the gradient
    w.r.t. radii, ``E`` (K, n) the negated gradient w.r.t. centers and
    ``dScale`` (K,) the gradient w.r.t. the per-label score scale.
    """
    B, K = X.shape[0], center.shape[0]
    diff = center[None, :, :] - X[:, None, :]
    D = np.sqrt(np.sum(diff * diff, axis=-1))
    m = radius[None, :] - D
    S = scale[None, :] * m
    Y = np.zeros((B, K))
    Y[np.arange(B), pos] = 1.0
    raw = np.where(Y > 0, _softplus(-S), _softplus(S))
    live = raw < LOSS_CAP
    loss = float(np.sum(np.minimum(raw, LOSS_CAP))) / (B * K)
    g = np.where(live, _sigmoid(S) - Y, 0.0) / (B * K)
    h = g * scale[None, :]
    e = diff / D[..., None]
    he = h[..., None] * e
    dX = np.sum(he, axis=1)
    E = np.sum(he, axis=0)
    return loss, S, dX, np.sum(h, axis=0), E, np.sum(g * m, axis=0)
