"""Feature projection into the ball and the K-label classifier head."""

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import backend
from .balls import TAU_MIN, ball_arrays
from .errors import ConfigError, DataError, InvalidTemperatureError, ShapeError
from .geometry import MAX_NORM, exp0

MODES = ("hyperbolic", "euclidean_baseline")
TEMP_MODES = ("fixed", "learnable_scalar", "learnable_per_class")
FORMAT_VERSION = 1
PROB_CLAMP = 1e-12


@dataclass
class ModelParams:
    """Complete trainable state.

    ``log_tau`` is a length-1 array for ``fixed`` and ``learnable_scalar``
    and length K for ``learnable_per_class``. In ``euclidean_baseline``
    mode ``labels`` are free weight vectors, ``label_bias`` holds one
    offset per label, and temperatures are unused.
    """

    W: np.ndarray
    b: np.ndarray
    labels: np.ndarray
    log_tau: np.ndarray
    temp_mode: str = "learnable_per_class"
    mode: str = "hyperbolic"
    label_bias: np.ndarray = field(default=None)

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.float64)
        self.log_tau = np.atleast_1d(np.asarray(self.log_tau, dtype=np.float64))
        if self.label_bias is None:
            self.label_bias = np.zeros(self.labels.shape[0])
        self.label_bias = np.asarray(self.label_bias, dtype=np.float64)
        self.validate()

    @property
    def n(self):
        return self.W.shape[0]

    @property
    def d(self):
        return self.W.shape[1]

    @property
    def K(self):
        return self.labels.shape[0]

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.temp_mode not in TEMP_MODES:
            raise ConfigError(f"unknown temp_mode {self.temp_mode!r}")
        if self.W.ndim != 2 or self.b.shape != (self.n,):
            raise ShapeError(f"W {self.W.shape} and b {self.b.shape} disagree")
        if self.labels.ndim != 2 or self.labels.shape[1] != self.n:
            raise ShapeError(f"labels {self.labels.shape} do not match n={self.n}")
        want = self.K if self.temp_mode == "learnable_per_class" else 1
        if self.log_tau.shape != (want,):
            raise ShapeError(f"log_tau has shape {self.log_tau.shape}, expected ({want},)")
        if self.label_bias.shape != (self.K,):
            raise ShapeError("label_bias must have one entry per label")
        if self.mode == "hyperbolic" and np.any(np.exp(self.log_tau) < TAU_MIN):
            raise InvalidTemperatureError(f"temperature below {TAU_MIN}")

    def taus(self):
        """Per-label temperatures, shape (K,)."""
        return np.broadcast_to(np.exp(self.log_tau), (self.K,)).copy()

    def copy(self):
        return replace(
            self,
            W=self.W.copy(),
            b=self.b.copy(),
            labels=self.labels.copy(),
            log_tau=self.log_tau.copy(),
            label_bias=self.label_bias.copy(),
        )


def init_params(n, d, K, rng, temp_mode="learnable_per_class", tau=1.0, mode="hyperbolic"):
    """Seeded initialisation.

    W and b are uniform in +-1/sqrt(d). Hyperbolic label embeddings get
    random directions and norms uniform in (0.3, 0.7); baseline label
    vectors use the same uniform range as W. log tau starts at 0 unless a
    fixed temperature is requested.
    """
    bound = 1.0 / math.sqrt(d)
    W = rng.uniform(-bound, bound, size=(n, d))
    b = rng.uniform(-bound, bound, size=n)
    if mode == "hyperbolic":
        dirs = rng.standard_normal((K, n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        labels = dirs * rng.uniform(0.3, 0.7, size=(K, 1))
    else:
        labels = rng.uniform(-1.0 / math.sqrt(n), 1.0 / math.sqrt(n), size=(K, n))
    if temp_mode == "learnable_per_class":
        log_tau = np.zeros(K)
    elif temp_mode == "learnable_scalar":
        log_tau = np.zeros(1)
    else:
        if not tau >= TAU_MIN:
            raise InvalidTemperatureError(f"temperature {tau!r} below minimum {TAU_MIN}")
        log_tau = np.array([math.log(tau)])
    return ModelParams(W, b, labels, log_tau, temp_mode=temp_mode, mode=mode)


def _features(params, F):
    F = np.asarray(F, dtype=np.float64)
    if F.shape[-1] != params.d:
        raise ShapeError(f"feature dimension {F.shape[-1]} != model d={params.d}")
    return F


def mobius_linear(W, b, f):
    """``exp0(W f + b)``; accepts a single feature vector or a (B, d) batch."""
    W = np.asarray(W, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    if W.shape[1] != f.shape[-1] or np.shape(b) != (W.shape[0],):
        raise ShapeError(f"W {W.shape}, b {np.shape(b)}, f {f.shape} do not compose")
    return exp0(f @ W.T + b)


def forward(params: ModelParams, F):
    """Scores of shape (K,) for one feature vector or (B, K) for a batch."""
    F = _features(params, F)
    single = F.ndim == 1
    F2 = np.atleast_2d(F)
    if params.mode == "euclidean_baseline":
        S = (F2 @ params.W.T + params.b) @ params.labels.T + params.label_bias
    else:
        X = mobius_linear(params.W, params.b, F2)
        _, radius, center, alpha = ball_arrays(params.labels)
        S = backend.scores(X, center, radius, alpha / params.taus())
    return S[0] if single else S


def sigmoid(s):
    s = np.asarray(s, dtype=np.float64)
    e = np.exp(-np.abs(s))
    p = np.where(s >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return np.clip(p, PROB_CLAMP, 1.0 - PROB_CLAMP)


def predict_probs(params: ModelParams, F):
    return sigmoid(forward(params, F))


# -- persistence --------------------------------------------------------------

def to_dict(params: ModelParams):
    doc = {
        "version": FORMAT_VERSION,
        "mode": params.mode,
        "n": params.n,
        "d": params.d,
        "K": params.K,
        "W": params.W.reshape(-1).tolist(),
        "b": params.b.tolist(),
        "labels": params.labels.tolist(),
        "temp_mode": params.temp_mode,
        "log_tau": float(params.log_tau[0]) if params.temp_mode != "learnable_per_class" else params.log_tau.tolist(),
    }
    if params.mode == "euclidean_baseline":
        doc["label_bias"] = params.label_bias.tolist()
    return doc


def from_dict(doc):
    try:
        if doc["version"] != FORMAT_VERSION:
            raise DataError(f"unsupported model version {doc['version']!r}")
        n, d, K = int(doc["n"]), int(doc["d"]), int(doc["K"])
        W = np.asarray(doc["W"], dtype=np.float64)
        if W.size != n * d:
            raise ShapeError(f"W has {W.size} entries, expected {n * d}")
        return ModelParams(
            W.reshape(n, d),
            doc["b"],
            np.asarray(doc["labels"], dtype=np.float64).reshape(K, n),
            doc["log_tau"],
            temp_mode=doc["temp_mode"],
            mode=doc["mode"],
            label_bias=doc.get("label_bias"),
        )
    except KeyError as exc:
        raise DataError(f"model document missing key {exc.args[0]!r}") from None


def dumps(params: ModelParams):
    # float repr is the shortest string that round-trips exactly
    return json.dumps(to_dict(params), indent=1) + "\n"


def save_model(params: ModelParams, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(params))


def load_model(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise DataError(f"cannot read model {path}: {exc}") from None
    return from_dict(doc)


def check_in_ball(params: ModelParams):
    if params.mode == "hyperbolic":
        return bool(np.all(np.linalg.norm(params.labels, axis=1) <= MAX_NORM))
    return True
