"""Seeded mini-batch training loop."""

import logging

import numpy as np

from .data import Dataset, generate_synthetic, load_dataset, make_rng, train_eval_split
from .grad import loss_gradients
from .losses import LossBreakdown, combine
from .optim import Optimizer
from .projector import ModelParams, init_params

log = logging.getLogger(__name__)


def _streams(seed):
    init_seed, shuffle_seed, split_seed = np.random.SeedSequence(seed).spawn(3)
    return make_rng(init_seed), make_rng(shuffle_seed), split_seed


def initial_params(config, d, K):
    init_rng, _, _ = _streams(config.seed)
    return init_params(config.n, d, K, init_rng, temp_mode=config.temp_mode, tau=config.tau, mode=config.mode)


def train(config, ds: Dataset, on_epoch=None) -> tuple[ModelParams, list[LossBreakdown]]:
    """Train from a seeded initialisation.

    Each epoch shuffles the sample order with its own seeded stream and
    walks it in ``batch_size`` chunks, keeping the short final chunk. The
    returned history holds one sample-weighted breakdown per epoch.
    """
    init_rng, shuffle_rng, _ = _streams(config.seed)
    params = init_params(
        config.n, ds.feature_dim, ds.num_labels, init_rng,
        temp_mode=config.temp_mode, tau=config.tau, mode=config.mode,
    )
    opt = Optimizer(config.lr_riem, config.lr_euc, config.clip_norm)
    history = []
    S = len(ds)
    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(S)
        sums = np.zeros(3)
        for start in range(0, S, config.batch_size):
            idx = order[start:start + config.batch_size]
            breakdown, grads = loss_gradients(params, ds.features[idx], ds.observed_pos[idx], config)
            sums += len(idx) * np.array([breakdown.cls, breakdown.reg, breakdown.uni])
            opt.step(params, grads)
        cls, reg, uni = sums / max(S, 1)
        epoch_loss = combine(float(cls), float(reg), float(uni), config.lambda1, config.lambda2)
        history.append(epoch_loss)
        log.debug("epoch %d total %.6f", epoch, epoch_loss.total)
        if on_epoch is not None:
            on_epoch(epoch, epoch_loss)
    return params, history


def dataset_for(config, overrides=None):
    """Load or generate the dataset a config points at.

    ``overrides`` may carry ``features`` / ``labels_single`` / ``labels_full``
    paths that take precedence over the config's data section.
    """
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    if overrides.get("features") or "synth" not in config.data:
        paths = {**{k: v for k, v in config.data.items() if k != "synth"}, **overrides}
        return load_dataset(paths["features"], paths["labels_single"], paths.get("labels_full"))
    return generate_synthetic(config.synth())


def split_for(config, ds: Dataset):
    """Train/eval split using the config's seed and ``train_frac``."""
    if config.train_frac >= 1.0:
        return ds, None
    _, _, split_seed = _streams(config.seed)
    return train_eval_split(ds, config.train_frac, split_seed)
