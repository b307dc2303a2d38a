"""Datasets: synthetic hierarchical generator, single-positive masking, CSV I/O.

Randomness comes from numpy's PCG64 bit generator seeded through
``SeedSequence`` so generated data is reproducible across platforms.
"""

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InvalidDatasetError, ParseError


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    observed_pos: np.ndarray
    full_labels: np.ndarray = None
    num_labels: int = 0
    ids: tuple = ()

    def __post_init__(self):
        S = self.features.shape[0]
        if not self.ids:
            object.__setattr__(self, "ids", tuple(f"s{i:06d}" for i in range(S)))
        if len(self.ids) != S or self.observed_pos.shape != (S,):
            raise InvalidDatasetError("features, ids and observed labels disagree in length")
        if self.num_labels <= 0:
            raise InvalidDatasetError("num_labels must be positive")
        if np.any(self.observed_pos < 0) or np.any(self.observed_pos >= self.num_labels):
            raise InvalidDatasetError(f"observed label index outside [0, {self.num_labels})")
        if self.full_labels is not None:
            Y = self.full_labels
            if Y.shape != (S, self.num_labels):
                raise InvalidDatasetError("full label matrix has the wrong shape")
            if np.any(Y.sum(axis=1) == 0):
                row = int(np.flatnonzero(Y.sum(axis=1) == 0)[0])
                raise InvalidDatasetError(f"sample {self.ids[row]!r} has no positive label")
            if S and np.any(Y[np.arange(S), self.observed_pos] != 1):
                raise InvalidDatasetError("observed positive is not positive in the full labels")

    @property
    def feature_dim(self):
        return self.features.shape[1]

    def __len__(self):
        return self.features.shape[0]

    def subset(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(
            self.features[idx],
            self.observed_pos[idx],
            None if self.full_labels is None else self.full_labels[idx],
            self.num_labels,
            tuple(self.ids[i] for i in idx),
        )


def _default_pairs():
    # (first, second, probability): cross-superclass links between subclasses
    return [(1, 4, 0.7), (7, 10, 0.6), (13, 2, 0.5)]


@dataclass
class SynthConfig:
    num_super: int = 5
    subs_per_super: int = 2
    cooccur_pairs: list = field(default_factory=_default_pairs)
    d: int = 6
    samples: int = 4000
    noise_sigma: float = 0.5
    seed: int = 0

    @property
    def num_labels(self):
        return self.num_super * (1 + self.subs_per_super)

    def validate(self):
        for key in ("num_super", "subs_per_super", "d", "samples"):
            value = getattr(self, key)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigError(f"synth.{key} must be a positive integer, got {value!r}")
        if not self.noise_sigma >= 0:
            raise ConfigError(f"synth.noise_sigma must be non-negative, got {self.noise_sigma!r}")
        K = self.num_labels
        for pair in self.cooccur_pairs:
            if len(pair) != 3:
                raise ConfigError("synth.cooccur_pairs entries are [first, second, probability]")
            i, j, p = pair
            if not (0 <= i < K and 0 <= j < K) or i == j:
                raise ConfigError(f"synth.cooccur_pairs: bad label pair ({i}, {j}) for K={K}")
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"synth.cooccur_pairs: probability {p!r} outside [0, 1]")

    def super_of(self, label):
        return (label // (1 + self.subs_per_super)) * (1 + self.subs_per_super)


def generate_synthetic(cfg: SynthConfig) -> Dataset:
    """Sample a hierarchical multi-label dataset with planted co-occurrences.

    Label ``s * (1 + subs_per_super)`` is superclass ``s``; the following
    ``subs_per_super`` indices are its subclasses. Activating any subclass
    also activates its superclass.
    """
    cfg.validate()
    K, d, group = cfg.num_labels, cfg.d, 1 + cfg.subs_per_super
    data_seed, mask_seed = np.random.SeedSequence(cfg.seed).spawn(2)
    rng = make_rng(data_seed)
    prototypes = rng.standard_normal((K, d))
    Y = np.zeros((cfg.samples, K), dtype=np.int8)
    noise = np.empty((cfg.samples, d))
    max_subs = min(2, cfg.subs_per_super)
    for s in range(cfg.samples):
        sup = int(rng.integers(cfg.num_super))
        base = sup * group
        Y[s, base] = 1
        count = int(rng.integers(1, max_subs + 1))
        subs = rng.choice(cfg.subs_per_super, size=count, replace=False)
        Y[s, base + 1 + subs] = 1
        for i, j, p in cfg.cooccur_pairs:
            draw = rng.random()
            if Y[s, i] and draw < p:
                Y[s, j] = 1
                Y[s, cfg.super_of(j)] = 1
        noise[s] = rng.standard_normal(d)
    features = Y.astype(np.float64) @ prototypes + cfg.noise_sigma * noise
    observed = mask_to_single_positive(Y, mask_seed)
    return Dataset(features, observed, Y, K)


def mask_to_single_positive(full_labels, seed):
    """Keep one uniformly chosen positive per row."""
    Y = np.asarray(full_labels)
    rng = make_rng(seed)
    out = np.empty(Y.shape[0], dtype=np.int64)
    for s in range(Y.shape[0]):
        positives = np.flatnonzero(Y[s])
        if positives.size == 0:
            raise InvalidDatasetError(f"row {s} has no positive label")
        out[s] = positives[rng.integers(positives.size)]
    return out


def train_eval_split(ds: Dataset, frac, seed):
    """Seeded shuffle, then the first ``round(frac * S)`` samples form the training part."""
    if not 0.0 < frac < 1.0:
        raise ConfigError(f"split fraction must lie strictly between 0 and 1, got {frac!r}")
    perm = make_rng(seed).permutation(len(ds))
    cut = int(round(frac * len(ds)))
    return ds.subset(perm[:cut]), ds.subset(perm[cut:])


# -- CSV files ----------------------------------------------------------------

def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def save_dataset(ds: Dataset, directory, prefix=""):
    """Write ``features.csv``, ``labels_single.csv`` and (if present) ``labels_full.csv``."""
    os.makedirs(directory, exist_ok=True)
    paths = {
        "features": os.path.join(directory, f"{prefix}features.csv"),
        "labels_single": os.path.join(directory, f"{prefix}labels_single.csv"),
    }
    d = ds.feature_dim
    _write_csv(
        paths["features"],
        ["id"] + [f"f{j}" for j in range(d)],
        ([sid] + [repr(float(v)) for v in row] for sid, row in zip(ds.ids, ds.features)),
    )
    _write_csv(paths["labels_single"], ["id", "pos_idx"], zip(ds.ids, (int(p) for p in ds.observed_pos)))
    if ds.full_labels is not None:
        paths["labels_full"] = os.path.join(directory, f"{prefix}labels_full.csv")
        _write_csv(
            paths["labels_full"],
            ["id"] + [f"y{k}" for k in range(ds.num_labels)],
            ([sid] + [int(v) for v in row] for sid, row in zip(ds.ids, ds.full_labels)),
        )
    return paths


def _read_table(path, prefix, parse):
    """Parse a CSV whose header is ``id,<prefix>0,...``. Returns (ids, values)."""
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise ParseError(path, 0, 0, f"cannot open: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(path, 1, 1, "empty file") from None
        expected = ["id"] + [f"{prefix}{j}" for j in range(len(header) - 1)]
        if len(header) < 2 or header != expected:
            raise ParseError(path, 1, 1, f"header must be {','.join(expected[:3])},...")
        ids, rows = [], []
        for row in reader:
            line = reader.line_num
            if len(row) != len(header):
                raise ParseError(path, line, min(len(row), len(header)) + 1,
                                 f"expected {len(header)} fields, found {len(row)}")
            if not row[0]:
                raise ParseError(path, line, 1, "empty id")
            values = []
            for col, cell in enumerate(row[1:], start=2):
                try:
                    values.append(parse(cell))
                except ValueError:
                    raise ParseError(path, line, col, f"cannot parse {cell!r}") from None
            ids.append(row[0])
            rows.append(values)
    return ids, rows, len(header) - 1


def _parse_float(cell):
    v = float(cell)
    if not math.isfinite(v):
        raise ValueError(cell)
    return v


def _parse_binary(cell):
    if cell not in ("0", "1"):
        raise ValueError(cell)
    return int(cell)


def load_dataset(features_path, single_labels_path, full_labels_path=None, num_labels=None):
    """Read the CSV triple and check that ids line up row by row.

    ``num_labels`` defaults to the width of the full-label file; without one
    it is inferred as ``max(pos_idx) + 1``.
    """
    ids, feats, d = _read_table(features_path, "f", _parse_float)
    sids, pos = _read_single(single_labels_path)
    if sids != ids:
        raise InvalidDatasetError(f"row ids of {single_labels_path} do not match {features_path}")
    full = None
    if full_labels_path is not None:
        fids, rows, K_full = _read_table(full_labels_path, "y", _parse_binary)
        if fids != ids:
            raise InvalidDatasetError(f"row ids of {full_labels_path} do not match {features_path}")
        full = np.asarray(rows, dtype=np.int8).reshape(len(ids), K_full)
        if num_labels is None:
            num_labels = K_full
    pos = np.asarray(pos, dtype=np.int64)
    if num_labels is None:
        num_labels = int(pos.max()) + 1 if pos.size else 1
    bad = np.flatnonzero((pos < 0) | (pos >= num_labels))
    if bad.size:
        raise InvalidDatasetError(
            f"{single_labels_path}: line {bad[0] + 2}: label index {pos[bad[0]]} outside [0, {num_labels})"
        )
    return Dataset(np.asarray(feats, dtype=np.float64).reshape(len(ids), d), pos, full, num_labels, tuple(ids))


def _read_single(path):
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise ParseError(path, 0, 0, f"cannot open: {exc.strerror}") from None
    ids, rows = [], []
    with fh:
        reader = csv.reader(fh)
        if next(reader, None) != ["id", "pos_idx"]:
            raise ParseError(path, 1, 1, "header must be id,pos_idx")
        for row in reader:
            line = reader.line_num
            if len(row) != 2:
                raise ParseError(path, line, min(len(row), 2) + 1, f"expected 2 fields, found {len(row)}")
            if not row[0]:
                raise ParseError(path, line, 1, "empty id")
            try:
                rows.append(int(row[1]))
            except ValueError:
                raise ParseError(path, line, 2, f"cannot parse {row[1]!r}") from None
            ids.append(row[0])
    return ids, rows
