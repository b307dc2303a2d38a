"""Run configuration: one JSON document, unknown keys rejected."""

import json
from dataclasses import asdict, dataclass, field, fields

from .data import SynthConfig
from .errors import ConfigError
from .losses import DoubleWellParams
from .projector import MODES, TEMP_MODES

DATA_FILE_KEYS = ("features", "labels_single", "labels_full")


@dataclass
class TrainConfig:
    n: int = 16
    epochs: int = 60
    batch_size: int = 128
    lr_riem: float = 1e-4
    lr_euc: float = 1e-5
    clip_norm: float = 1.0
    lambda1: float = 10.0
    lambda2: float = 1.0
    beta1: float = 0.1
    beta2: float = 500.0
    c1: float = 0.1
    c2: float = 0.9
    beta1_as_width: bool = False
    temp_mode: str = "learnable_per_class"
    tau: float = 1.0
    mode: str = "hyperbolic"
    seed: int = 0
    train_frac: float = 0.8
    data: dict = field(default_factory=lambda: {"synth": {}})

    def well_params(self):
        return DoubleWellParams(self.beta1, self.beta2, self.c1, self.c2, self.beta1_as_width)

    def synth(self):
        """The synthetic-data section as a ``SynthConfig``, or None when files are configured."""
        section = self.data.get("synth")
        if section is None:
            return None
        cfg = SynthConfig(**{k: v for k, v in section.items()})
        if "cooccur_pairs" in section:
            cfg.cooccur_pairs = [tuple(p) for p in section["cooccur_pairs"]]
        return cfg

    def validate(self):
        ints = ("n", "epochs", "batch_size", "seed")
        for key in ints:
            v = getattr(self, key)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ConfigError(f"{key} must be an integer, got {v!r}")
        for key in ("n", "batch_size"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key} must be positive")
        if self.epochs < 0:
            raise ConfigError("epochs must be non-negative")
        for key in ("lr_riem", "lr_euc", "clip_norm", "tau"):
            v = getattr(self, key)
            if not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"{key} must be a positive number, got {v!r}")
        for key in ("lambda1", "lambda2"):
            v = getattr(self, key)
            if not isinstance(v, (int, float)) or v < 0:
                raise ConfigError(f"{key} must be a non-negative number, got {v!r}")
        if self.temp_mode not in TEMP_MODES:
            raise ConfigError(f"temp_mode must be one of {TEMP_MODES}, got {self.temp_mode!r}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0 < self.train_frac <= 1:
            raise ConfigError("train_frac must lie in (0, 1]")
        self.well_params()
        if not isinstance(self.data, dict):
            raise ConfigError("data must be an object")
        if "synth" in self.data:
            extra = set(self.data) - {"synth"}
            if extra:
                raise ConfigError(f"data: unknown key {sorted(extra)[0]!r} next to 'synth'")
            known = {f.name for f in fields(SynthConfig)}
            unknown = set(self.data["synth"]) - known
            if unknown:
                raise ConfigError(f"data.synth: unknown key {sorted(unknown)[0]!r}")
            self.synth().validate()
        else:
            unknown = set(self.data) - set(DATA_FILE_KEYS)
            if unknown:
                raise ConfigError(f"data: unknown key {sorted(unknown)[0]!r}")
            for key in DATA_FILE_KEYS[:2]:
                if key not in self.data:
                    raise ConfigError(f"data: missing required key {key!r} (or provide 'synth')")
        return self

    def to_dict(self):
        return asdict(self)


def config_from_dict(doc):
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in fields(TrainConfig)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError(f"unknown config key {unknown[0]!r}")
    if "data" not in doc:
        raise ConfigError("missing required key 'data'")
    return TrainConfig(**doc).validate()


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return config_from_dict(doc)
