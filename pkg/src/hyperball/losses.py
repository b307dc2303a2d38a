"""Training objective: assumed-negative BCE + double-well radial energy + angular uniformity."""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError

LOG_CLAMP = 1e-12


@dataclass(frozen=True)
class DoubleWellParams:
    beta1: float = 0.1
    beta2: float = 500.0
    c1: float = 0.1
    c2: float = 0.9
    beta1_as_width: bool = False

    def __post_init__(self):
        if not (self.beta1 > 0 and self.beta2 > 0):
            raise ConfigError("double-well beta1 and beta2 must be positive")
        if not (0 < self.c1 < self.c2 < 1):
            raise ConfigError("double-well wells need 0 < c1 < c2 < 1")


@dataclass(frozen=True)
class LossBreakdown:
    cls: float
    reg: float
    uni: float
    total: float
    lambda1: float
    lambda2: float


def _log_sigmoid(s):
    return np.minimum(s, 0.0) - np.log1p(np.exp(-np.abs(s)))


def bce_an(scores, pos_idx):
    """Binary cross-entropy against a one-hot target, averaged over labels.

    ``scores`` may be (K,) with an integer ``pos_idx`` or (B, K) with a
    length-B index vector, in which case the per-sample values are returned.
    """
    s = np.asarray(scores, dtype=np.float64)
    single = s.ndim == 1
    S = np.atleast_2d(s)
    pos = np.atleast_1d(np.asarray(pos_idx))
    K = S.shape[1]
    if pos.shape != (S.shape[0],):
        raise ShapeError("one positive index per sample required")
    if np.any(pos < 0) or np.any(pos >= K):
        raise IndexError(f"positive label index out of range for K={K}")
    Y = np.zeros_like(S)
    Y[np.arange(S.shape[0]), pos] = 1.0
    # -log max(p, 1e-12) == min(-log p, -log 1e-12)
    cap = -np.log(LOG_CLAMP)
    nll = np.where(Y > 0, np.minimum(-_log_sigmoid(S), cap), np.minimum(-_log_sigmoid(-S), cap))
    per_sample = nll.mean(axis=1)
    return float(per_sample[0]) if single else per_sample


def _wells(rho, p: DoubleWellParams):
    if p.beta1_as_width:
        g1 = np.exp(-(((rho - p.c1) / p.beta1) ** 2))
        g2 = np.exp(-(((rho - p.c2) / p.beta1) ** 2))
    else:
        g1 = np.exp(-p.beta1 * (rho - p.c1) ** 2)
        g2 = np.exp(-p.beta1 * (rho - p.c2) ** 2)
    return g1, g2


def double_well_terms(rhos, p: DoubleWellParams):
    """Per-label energies (no sum)."""
    rho = np.asarray(rhos, dtype=np.float64)
    g1, g2 = _wells(rho, p)
    return -g1 * (-np.expm1(-p.beta2 * rho**2)) - g2 * (-np.expm1(-p.beta2 * (1.0 - rho) ** 2))


def double_well(rhos, p: DoubleWellParams = DoubleWellParams()):
    return float(np.sum(double_well_terms(rhos, p)))


def double_well_grad(rhos, p: DoubleWellParams):
    """d/d rho of each label's energy."""
    rho = np.asarray(rhos, dtype=np.float64)
    g1, g2 = _wells(rho, p)
    k = 1.0 / p.beta1**2 if p.beta1_as_width else p.beta1
    dg1 = -2.0 * k * (rho - p.c1) * g1
    dg2 = -2.0 * k * (rho - p.c2) * g2
    e1 = np.exp(-p.beta2 * rho**2)
    e2 = np.exp(-p.beta2 * (1.0 - rho) ** 2)
    b1, b2 = 1.0 - e1, 1.0 - e2
    db1 = 2.0 * p.beta2 * rho * e1
    db2 = -2.0 * p.beta2 * (1.0 - rho) * e2
    return -(dg1 * b1 + g1 * db1) - (dg2 * b2 + g2 * db2)


def uniformity(labels):
    """Mean absolute cosine over ordered pairs of distinct labels; 0 when K < 2."""
    C = np.asarray(labels, dtype=np.float64)
    K = C.shape[0]
    if K < 2:
        return 0.0
    U = C / np.linalg.norm(C, axis=1, keepdims=True)
    G = np.abs(U @ U.T)
    np.fill_diagonal(G, 0.0)
    return float(G.sum() / (K * (K - 1)))


def uniformity_grad(labels):
    C = np.asarray(labels, dtype=np.float64)
    K = C.shape[0]
    if K < 2:
        return np.zeros_like(C)
    norm = np.linalg.norm(C, axis=1, keepdims=True)
    U = C / norm
    sign = np.sign(U @ U.T)
    np.fill_diagonal(sign, 0.0)
    dU = 2.0 * (sign @ U) / (K * (K - 1))
    # project out the radial part: d(c/|c|)/dc = (I - u u^T) / |c|
    return (dU - U * np.sum(dU * U, axis=1, keepdims=True)) / norm


def combine(cls, reg, uni, lambda1, lambda2):
    return LossBreakdown(cls, reg, uni, cls + lambda1 * reg + lambda2 * uni, lambda1, lambda2)


def total_loss(scores, pos_idx, labels, config):
    """Weighted objective for one batch.

    ``config`` supplies ``lambda1``, ``lambda2`` and ``well_params()``.
    Passing ``labels=None`` drops the two geometric terms (baseline head).
    """
    cls = float(np.mean(np.atleast_1d(bce_an(scores, pos_idx))))
    if labels is None:
        reg = uni = 0.0
    else:
        C = np.asarray(labels, dtype=np.float64)
        reg = double_well(np.linalg.norm(C, axis=1), config.well_params())
        uni = uniformity(C)
    return combine(cls, reg, uni, config.lambda1, config.lambda2)
