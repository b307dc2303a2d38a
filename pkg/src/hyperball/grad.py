"""Closed-form gradients of the training objective and a finite-difference oracle."""

from dataclasses import dataclass

import numpy as np

from . import backend
from ._kernels_py import LOSS_CAP, _sigmoid, _softplus
from .balls import EPS_RHO, ball_arrays
from .errors import NumericFailure
from .geometry import MAX_NORM
from .losses import combine, double_well, double_well_grad, total_loss, uniformity, uniformity_grad
from .projector import ModelParams, forward, mobius_linear


@dataclass
class Gradients:
    dW: np.ndarray
    db: np.ndarray
    dLabels: np.ndarray
    dLogTau: np.ndarray
    dLabelBias: np.ndarray

    def arrays(self):
        return {
            "W": self.dW,
            "b": self.db,
            "labels": self.dLabels,
            "log_tau": self.dLogTau,
            "label_bias": self.dLabelBias,
        }

    def global_norm(self):
        return float(np.sqrt(sum(np.sum(a * a) for a in self.arrays().values())))

    def scaled(self, factor):
        return Gradients(*(a * factor for a in self.arrays().values()))


def _zeros_like(params: ModelParams):
    return Gradients(
        np.zeros_like(params.W),
        np.zeros_like(params.b),
        np.zeros_like(params.labels),
        np.zeros_like(params.log_tau),
        np.zeros_like(params.label_bias),
    )


def _tangent_to_projection(U, dX):
    """Pull a gradient on ``exp0(U)`` (with ball clamp) back to ``U``."""
    t = np.linalg.norm(U, axis=1, keepdims=True)
    small = t[:, 0] < 1e-12
    safe = np.where(small[:, None], 1.0, t)
    u_hat = U / safe
    th = np.tanh(t)
    clamped = th > MAX_NORM
    radial_scale = np.where(clamped, 0.0, 1.0 - th * th)
    h_over_t = np.where(clamped, MAX_NORM, th) / safe
    radial = np.sum(u_hat * dX, axis=1, keepdims=True)
    dU = radial_scale * radial * u_hat + h_over_t * (dX - radial * u_hat)
    dU[small] = dX[small]
    return dU


def _label_chain(C_raw, dR, dAlpha, dCenter):
    """Chain radius, alpha and center sensitivities back to raw embeddings."""
    rho_raw = np.linalg.norm(C_raw, axis=1)
    C = C_raw.copy()
    zero = rho_raw == 0
    if np.any(zero):
        C[zero, 0] = EPS_RHO
        rho_raw = np.linalg.norm(C, axis=1)
    rho = np.clip(rho_raw, EPS_RHO, MAX_NORM)
    C = C * (rho / rho_raw)[:, None]
    c_hat = C / rho[:, None]
    one_m = 1.0 - rho * rho
    d_radius = -0.5 / rho**2 - 0.5
    d_alpha = 4.0 * rho / one_m**2
    k = (1.0 + rho * rho) / (2.0 * rho * rho)
    dk = -1.0 / rho**3
    dC = (dR * d_radius + dAlpha * d_alpha)[:, None] * c_hat
    dC += k[:, None] * dCenter + (dk / rho * np.sum(C * dCenter, axis=1))[:, None] * C
    # clamped rows: only the direction reaches the raw vector
    hit = (rho_raw < EPS_RHO) | (rho_raw > MAX_NORM)
    if np.any(hit):
        u = C[hit] / rho[hit, None]
        g = dC[hit]
        tangential = g - u * np.sum(g * u, axis=1, keepdims=True)
        dC[hit] = tangential * (rho[hit] / rho_raw[hit])[:, None]
    return dC


def _check_finite(grads: Gradients):
    for name, arr in grads.arrays().items():
        if not np.all(np.isfinite(arr)):
            raise NumericFailure("non-finite gradient", parameter=name)


def loss_gradients(params: ModelParams, F, pos, config):
    """Return ``(LossBreakdown, Gradients)`` for one batch.

    Label gradients are ambient (Euclidean). Temperature gradients are with
    respect to ``log_tau`` and are zero in ``fixed`` mode.
    """
    F = np.atleast_2d(np.asarray(F, dtype=np.float64)).reshape(-1, params.d)
    pos = np.asarray(pos, dtype=np.int64).reshape(-1)
    B = F.shape[0]
    grads = _zeros_like(params)

    if params.mode == "euclidean_baseline":
        cls = 0.0
        if B:
            X = F @ params.W.T + params.b
            S = X @ params.labels.T + params.label_bias
            Y = np.zeros_like(S)
            Y[np.arange(B), pos] = 1.0
            raw = np.where(Y > 0, _softplus(-S), _softplus(S))
            cls = float(np.sum(np.minimum(raw, LOSS_CAP))) / S.size
            g = np.where(raw < LOSS_CAP, _sigmoid(S) - Y, 0.0) / S.size
            grads.dLabels = g.T @ X
            grads.dLabelBias = g.sum(axis=0)
            dX = g @ params.labels
            grads.dW = dX.T @ F
            grads.db = dX.sum(axis=0)
        breakdown = combine(cls, 0.0, 0.0, config.lambda1, config.lambda2)
        _check_finite(grads)
        return breakdown, grads

    C_raw = params.labels
    taus = params.taus()
    cls = 0.0
    if B:
        U = F @ params.W.T + params.b
        X = mobius_linear(params.W, params.b, F)
        _, radius, center, alpha = ball_arrays(C_raw)
        scale = alpha / taus
        cls, _, dX, dR, E, dScale = backend.cls_loss_grad(X, center, radius, scale, pos)
        dU = _tangent_to_projection(U, dX)
        grads.dW = dU.T @ F
        grads.db = dU.sum(axis=0)
        grads.dLabels = _label_chain(C_raw, dR, dScale / taus, -E)
        dlog = -scale * dScale
        if params.temp_mode == "learnable_per_class":
            grads.dLogTau = dlog
        elif params.temp_mode == "learnable_scalar":
            grads.dLogTau = np.array([dlog.sum()])

    rho = np.linalg.norm(C_raw, axis=1)
    wp = config.well_params()
    reg = double_well(rho, wp)
    uni = uniformity(C_raw)
    safe = np.where(rho > 0, rho, 1.0)
    grads.dLabels = grads.dLabels + config.lambda1 * (double_well_grad(rho, wp) / safe)[:, None] * C_raw
    grads.dLabels = grads.dLabels + config.lambda2 * uniformity_grad(C_raw)
    _check_finite(grads)
    return combine(cls, reg, uni, config.lambda1, config.lambda2), grads


def evaluate_loss(params: ModelParams, F, pos, config):
    """Objective value through the plain forward pass (no gradient code)."""
    F = np.atleast_2d(np.asarray(F, dtype=np.float64)).reshape(-1, params.d)
    labels = None if params.mode == "euclidean_baseline" else params.labels
    if F.shape[0] == 0:
        reg = uni = 0.0
        if labels is not None:
            reg = double_well(np.linalg.norm(labels, axis=1), config.well_params())
            uni = uniformity(labels)
        return combine(0.0, reg, uni, config.lambda1, config.lambda2)
    return total_loss(forward(params, F), pos, labels, config)


def finite_diff_oracle(params: ModelParams, F, pos, config, h=1e-5):
    """Central differences of the full objective, one scalar parameter at a time."""
    out = _zeros_like(params)
    names = ["W", "b", "labels"]
    if params.mode == "hyperbolic" and params.temp_mode != "fixed":
        names.append("log_tau")
    if params.mode == "euclidean_baseline":
        names.append("label_bias")
    target = out.arrays()
    for name in names:
        base = getattr(params, name)
        grad = target[name]
        for idx in np.ndindex(base.shape):
            orig = base[idx]
            base[idx] = orig + h
            up = evaluate_loss(params, F, pos, config).total
            base[idx] = orig - h
            down = evaluate_loss(params, F, pos, config).total
            base[idx] = orig
            grad[idx] = (up - down) / (2.0 * h)
    return out
