"""Adam for Euclidean parameters, Riemannian Adam for label embeddings."""

import math
from dataclasses import dataclass, field

import numpy as np

from .balls import TAU_MIN
from .geometry import expmap, project_to_ball
from .grad import Gradients

BETA_M = 0.9
BETA_V = 0.999
EPS_ADAM = 1e-8
LOG_TAU_MIN = math.log(TAU_MIN)


def clip_gradients(g: Gradients, clip_norm: float) -> Gradients:
    """Rescale all gradients together when their joint L2 norm exceeds ``clip_norm``."""
    if not clip_norm > 0:
        raise ValueError("clip_norm must be positive")
    norm = g.global_norm()
    if norm > clip_norm:
        return g.scaled(clip_norm / norm)
    return g


@dataclass
class AdamState:
    """Moments for one parameter tensor."""

    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros_like(cls, param):
        return cls(np.zeros_like(param), np.zeros_like(param))


def _adam_direction(state: AdamState, grad):
    state.t += 1
    state.m = BETA_M * state.m + (1.0 - BETA_M) * grad
    state.v = BETA_V * state.v + (1.0 - BETA_V) * grad * grad
    m_hat = state.m / (1.0 - BETA_M**state.t)
    v_hat = state.v / (1.0 - BETA_V**state.t)
    return m_hat / (np.sqrt(v_hat) + EPS_ADAM)


def adam_step(state: AdamState, param, grad, lr):
    """Bias-corrected Adam update; mutates ``state`` and returns the new parameter."""
    return np.asarray(param, dtype=np.float64) - lr * _adam_direction(state, grad)


def riemannian_adam_step(state: AdamState, label, ambient_grad, lr):
    """One Riemannian Adam update for a point (or rows of points) in the ball.

    The ambient gradient is rescaled by the inverse metric
    ``((1 - |x|^2) / 2)^2``, the moments are updated on that Riemannian
    gradient in ambient coordinates (no parallel transport), and the step is
    taken along the geodesic ``exp_x(-lr * update)``.
    """
    x = np.asarray(label, dtype=np.float64)
    sq = np.sum(x * x, axis=-1, keepdims=True)
    rgrad = np.asarray(ambient_grad, dtype=np.float64) * ((1.0 - sq) / 2.0) ** 2
    direction = _adam_direction(state, rgrad)
    return project_to_ball(expmap(x, -lr * direction))


@dataclass
class Optimizer:
    """Drives one update of every trainable tensor in a ``ModelParams``."""

    lr_riem: float = 1e-4
    lr_euc: float = 1e-5
    clip_norm: float = 1.0
    states: dict = field(default_factory=dict)

    def _state(self, name, like):
        if name not in self.states:
            self.states[name] = AdamState.zeros_like(like)
        return self.states[name]

    def step(self, params, grads: Gradients):
        """Clip, then update ``params`` in place. Returns the clipped gradients."""
        g = clip_gradients(grads, self.clip_norm)
        params.W = adam_step(self._state("W", params.W), params.W, g.dW, self.lr_euc)
        params.b = adam_step(self._state("b", params.b), params.b, g.db, self.lr_euc)
        if params.mode == "hyperbolic":
            params.labels = riemannian_adam_step(
                self._state("labels", params.labels), params.labels, g.dLabels, self.lr_riem
            )
            if params.temp_mode != "fixed":
                log_tau = adam_step(self._state("log_tau", params.log_tau), params.log_tau, g.dLogTau, self.lr_euc)
                params.log_tau = np.maximum(log_tau, LOG_TAU_MIN)
        else:
            # the baseline label head gets the same rate as the ball embeddings it replaces
            params.labels = adam_step(self._state("labels", params.labels), params.labels, g.dLabels, self.lr_riem)
            params.label_bias = adam_step(
                self._state("label_bias", params.label_bias), params.label_bias, g.dLabelBias, self.lr_riem
            )
        return g
