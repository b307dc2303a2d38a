"""Poincaré ball kernel, curvature -1.

All functions accept a single point of shape ``(n,)`` or a stack of points
``(..., n)`` and operate along the last axis. Everything is float64.
"""

import numpy as np

from .errors import InvalidInputError, NumericalDegeneracyError

EPS_BALL = 1e-5
MAX_NORM = 1.0 - EPS_BALL
EPS_DEN = 1e-15
# tanh(t) exceeds MAX_NORM beyond this tangent norm
MAX_TANGENT_NORM = float(np.arctanh(MAX_NORM))


def _as_float(x):
    return np.asarray(x, dtype=np.float64)


def _sqnorm(x):
    return np.sum(x * x, axis=-1, keepdims=True)


def conformal_factor(x):
    """lambda_x = 2 / (1 - |x|^2)."""
    x = _as_float(x)
    out = 2.0 / (1.0 - _sqnorm(x))
    return out[..., 0] if out.ndim > 1 else float(out[0])


def project_to_ball(x):
    """Rescale points whose norm exceeds ``1 - EPS_BALL`` back onto that sphere.

    Points already inside are returned unchanged (same values, new array).
    """
    x = _as_float(x)
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("project_to_ball: non-finite coordinates")
    norm = np.sqrt(_sqnorm(x))
    scale = np.where(norm > MAX_NORM, MAX_NORM / np.where(norm > 0, norm, 1.0), 1.0)
    out = x * scale
    # rounding can leave the recomputed norm an ulp or two above the bound
    over = np.sqrt(_sqnorm(out)) > MAX_NORM
    while np.any(over):
        out = np.where(over, out * (1.0 - 4 * np.finfo(np.float64).eps), out)
        over = np.sqrt(_sqnorm(out)) > MAX_NORM
    return out


def mobius_add(x, y):
    x = _as_float(x)
    y = _as_float(y)
    xy = np.sum(x * y, axis=-1, keepdims=True)
    x2 = _sqnorm(x)
    y2 = _sqnorm(y)
    num = (1.0 + 2.0 * xy + y2) * x + (1.0 - x2) * y
    den = 1.0 + 2.0 * xy + x2 * y2
    if np.any(np.abs(den) < EPS_DEN):
        raise NumericalDegeneracyError("mobius_add: degenerate denominator")
    return project_to_ball(num / den)


def distance(u, v):
    """Geodesic distance.

    Evaluates ``arccosh(1 + z)`` as ``log1p(z + sqrt(z (z + 2)))`` with
    ``z >= 0``, which is the clamped arccosh without the cancellation that
    ``arccosh`` suffers for nearby points.
    """
    u = _as_float(u)
    v = _as_float(v)
    diff2 = np.sum((u - v) ** 2, axis=-1)
    den = (1.0 - np.sum(u * u, axis=-1)) * (1.0 - np.sum(v * v, axis=-1))
    z = np.maximum(2.0 * diff2 / den, 0.0)
    d = np.log1p(z + np.sqrt(z * (z + 2.0)))
    return d if np.ndim(d) else float(d)


def exp0(v):
    """Exponential map at the origin, projected into the ball."""
    v = _as_float(v)
    norm = np.sqrt(_sqnorm(v))
    safe = np.where(norm > 0, norm, 1.0)
    out = np.where(norm > 0, np.tanh(norm) * v / safe, 0.0)
    return project_to_ball(out)


def log0(x):
    x = _as_float(x)
    norm = np.sqrt(_sqnorm(x))
    safe = np.where(norm > 0, norm, 1.0)
    return np.where(norm > 0, np.arctanh(np.minimum(norm, MAX_NORM)) * x / safe, 0.0)


def expmap(x, v):
    """Exponential map at ``x``: ``x ⊕ exp0(lambda_x v / 2)``."""
    x = _as_float(x)
    v = _as_float(v)
    lam = 2.0 / (1.0 - _sqnorm(x))
    return mobius_add(x, exp0(0.5 * lam * v))
