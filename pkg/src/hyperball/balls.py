"""Label balls: one Euclidean ball per label embedding.

A label embedding ``c`` with norm ``rho`` defines the ball with radius
``(1 - rho^2) / (2 rho)`` centred at ``c (1 + r / rho)``. The boundary of
that ball passes through ``c`` and meets the unit sphere at right angles.
Membership is the signed distance to the boundary, positive inside.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidTemperatureError
from .geometry import MAX_NORM

EPS_RHO = 1e-5
TAU_MIN = 1e-3
TIE_TOL = 1e-12


@dataclass(frozen=True)
class LabelBall:
    embedding: np.ndarray
    rho: float
    radius: float
    center: np.ndarray
    alpha: float


@dataclass(frozen=True)
class BallRelation:
    kind: str  # contains | contained_by | overlap | disjoint
    margin: float


def clamp_embedding(c):
    """Move embeddings into ``EPS_RHO <= |c| <= MAX_NORM`` along their direction.

    An exactly-zero vector is nudged to ``EPS_RHO`` along axis 0.
    """
    c = np.array(c, dtype=np.float64)
    rho = np.linalg.norm(c, axis=-1, keepdims=True)
    zero = rho[..., 0] == 0
    if np.any(zero):
        c[zero, ..., 0] = EPS_RHO
        rho = np.linalg.norm(c, axis=-1, keepdims=True)
    target = np.clip(rho, EPS_RHO, MAX_NORM)
    return c * (target / rho)


def ball_arrays(C):
    """Vectorised ball construction for a ``(K, n)`` embedding matrix.

    Returns ``(rho, radius, center, alpha)`` with shapes ``(K,)``, ``(K,)``,
    ``(K, n)``, ``(K,)``. Embeddings are clamped first.
    """
    C = clamp_embedding(C)
    rho = np.linalg.norm(C, axis=-1)
    radius = (1.0 - rho * rho) / (2.0 * rho)
    center = C * (1.0 + radius / rho)[..., None]
    alpha = 2.0 / (1.0 - rho * rho)
    return rho, radius, center, alpha


def ball_from_embedding(c) -> LabelBall:
    c = clamp_embedding(np.asarray(c, dtype=np.float64).reshape(-1))
    rho, radius, center, alpha = ball_arrays(c[None, :])
    return LabelBall(c, float(rho[0]), float(radius[0]), center[0], float(alpha[0]))


def membership(x, b: LabelBall):
    x = np.asarray(x, dtype=np.float64)
    m = b.radius - np.linalg.norm(b.center - x, axis=-1)
    return m if np.ndim(m) else float(m)


def score(x, b: LabelBall, tau):
    if not tau >= TAU_MIN:
        raise InvalidTemperatureError(f"temperature {tau!r} below minimum {TAU_MIN}")
    return (b.alpha / tau) * membership(x, b)


def ball_relation(a: LabelBall, b: LabelBall) -> BallRelation:
    """Classify how ball ``a`` sits relative to ball ``b``.

    Checked in the order contains, contained_by, disjoint; anything else is
    overlap. Equalities within ``TIE_TOL`` count as the non-overlap kind.
    """
    D = float(np.linalg.norm(a.center - b.center))
    contains_slack = (a.radius - b.radius) - D
    contained_slack = (b.radius - a.radius) - D
    disjoint_slack = D - (a.radius + b.radius)
    if contains_slack >= -TIE_TOL:
        return BallRelation("contains", max(contains_slack, 0.0))
    if contained_slack >= -TIE_TOL:
        return BallRelation("contained_by", max(contained_slack, 0.0))
    if disjoint_slack >= -TIE_TOL:
        return BallRelation("disjoint", max(disjoint_slack, 0.0))
    return BallRelation("overlap", min(-contains_slack, -contained_slack, -disjoint_slack))
