"""Ranking metrics, co-occurrence analysis, ball-relation reports and response maps."""

import csv
import json
from dataclasses import dataclass

import numpy as np

from .balls import ball_from_embedding, ball_relation, clamp_embedding
from .errors import ShapeError, UndefinedMetricError, UnsupportedModeError
from .geometry import distance
from .projector import forward, sigmoid


@dataclass
class EvalReport:
    per_class_ap: list  # None for classes without positives
    map: float
    num_eval_samples: int

    def to_json(self):
        return json.dumps(
            {"map": self.map, "per_class_ap": self.per_class_ap, "num_eval_samples": self.num_eval_samples}
        )


@dataclass
class CorrelationReport:
    pairs: list  # (i, j, cooccur_prob, distance)
    pearson_r: float
    num_pairs: int


def average_precision(scores, truths):
    """Mean of precision@k over the ranks k of the positives.

    Ranking is by descending score; equal scores keep ascending sample index.
    """
    scores = np.asarray(scores, dtype=np.float64)
    truths = np.asarray(truths).astype(bool)
    P = int(truths.sum())
    if P == 0:
        raise UndefinedMetricError("average precision undefined without positives")
    order = np.lexsort((np.arange(scores.size), -scores))
    hits = truths[order]
    ranks = np.flatnonzero(hits) + 1
    return float(np.mean(np.arange(1, P + 1) / ranks))


def mean_ap(params, features, full_labels):
    """Per-class AP of the model's scores against complete ground truth.

    Scores are ranked before the sigmoid; the sigmoid is strictly increasing,
    so AP is unchanged, but saturated probabilities would otherwise tie.
    """
    Y = np.asarray(full_labels)
    S = forward(params, np.atleast_2d(features))
    if S.shape != Y.shape:
        raise ShapeError(f"scores {S.shape} and labels {Y.shape} disagree")
    return mean_ap_from_scores(S, Y)


def mean_ap_from_scores(S, Y):
    per_class = []
    for k in range(Y.shape[1]):
        if Y[:, k].any():
            per_class.append(average_precision(S[:, k], Y[:, k]))
        else:
            per_class.append(None)
    scored = [ap for ap in per_class if ap is not None]
    if not scored:
        raise UndefinedMetricError("no class has a positive sample")
    return EvalReport(per_class, float(np.mean(scored)), int(Y.shape[0]))


def prevalence_map(train_labels, eval_labels):
    """mAP of a model that scores every sample with the training class priors.

    Every sample gets the same score per class, so each class ranks in
    sample-index order and AP reduces to the tie-broken ranking.
    """
    prior = np.asarray(train_labels, dtype=np.float64).mean(axis=0)
    Y = np.asarray(eval_labels)
    return mean_ap_from_scores(np.broadcast_to(prior, Y.shape), Y).map


def pearson(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = float(np.sum(dx * dx)), float(np.sum(dy * dy))
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedMetricError("Pearson correlation undefined for a constant variable")
    return float(np.clip(np.sum(dx * dy) / np.sqrt(sxx * syy), -1.0, 1.0))


def cooccurrence_analysis(params, full_labels):
    """Correlate pairwise label co-occurrence with embedding distance."""
    Y = np.asarray(full_labels, dtype=np.float64)
    K = params.K
    if params.mode != "hyperbolic":
        raise UnsupportedModeError("co-occurrence analysis needs hyperbolic label embeddings")
    if Y.shape[1] != K:
        raise ShapeError(f"label matrix has {Y.shape[1]} columns, model has K={K}")
    if K < 3:
        raise UndefinedMetricError(f"need at least 3 labels for a correlation, got K={K}")
    joint = (Y.T @ Y) / Y.shape[0]
    C = clamp_embedding(params.labels)
    iu, ju = np.triu_indices(K, k=1)
    dist = distance(C[iu], C[ju])
    probs = joint[iu, ju]
    pairs = [(int(i), int(j), float(p), float(dd)) for i, j, p, dd in zip(iu, ju, probs, dist)]
    return CorrelationReport(pairs, pearson(probs, dist), len(pairs))


def relation_report(params):
    if params.mode != "hyperbolic":
        raise UnsupportedModeError("ball relations exist only in hyperbolic mode")
    balls = [ball_from_embedding(c) for c in params.labels]
    return [(i, j, ball_relation(balls[i], balls[j])) for i in range(params.K) for j in range(i + 1, params.K)]


def response_grid(resolution):
    if not isinstance(resolution, int) or resolution < 1:
        raise ValueError(f"resolution must be a positive integer, got {resolution!r}")
    return np.linspace(-0.999, 0.999, resolution)


def export_response_map(params, label_idx, resolution=256):
    """Probability of one label over a square grid in the 2-D ball.

    Returns a (resolution^2, 3) array of ``(x, y, prob)`` rows, y-major then
    x; points outside the open unit disk get ``nan``.
    """
    if params.mode != "hyperbolic":
        raise UnsupportedModeError("response maps need the hyperbolic head")
    if params.n != 2:
        raise UnsupportedModeError(f"response maps need a 2-dimensional ball, model has n={params.n}")
    if not 0 <= label_idx < params.K:
        raise IndexError(f"label index {label_idx} outside [0, {params.K})")
    axis = response_grid(resolution)
    gx, gy = np.meshgrid(axis, axis)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    inside = np.sum(pts * pts, axis=1) < 1.0
    ball = ball_from_embedding(params.labels[label_idx])
    tau = params.taus()[label_idx]
    prob = np.full(pts.shape[0], np.nan)
    s = (ball.alpha / tau) * (ball.radius - np.linalg.norm(ball.center - pts[inside], axis=1))
    prob[inside] = sigmoid(s)
    return np.column_stack([pts, prob])


# -- writers ------------------------------------------------------------------

def write_response_map(rows, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "prob"])
        for x, y, p in rows:
            w.writerow([repr(float(x)), repr(float(y)), "nan" if np.isnan(p) else repr(float(p))])


def write_correlation(report: CorrelationReport, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label_i", "label_j", "cooccur_prob", "center_distance"])
        for i, j, p, dd in report.pairs:
            w.writerow([i, j, repr(p), repr(dd)])
