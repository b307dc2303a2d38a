"""Hyperbolic ball classifier for single-positive multi-label learning."""

from . import backend
from .balls import LabelBall, ball_from_embedding, ball_relation, membership, score
from .config import TrainConfig, load_config
from .data import Dataset, SynthConfig, generate_synthetic, load_dataset, save_dataset
from .geometry import conformal_factor, distance, exp0, log0, mobius_add, project_to_ball
from .grad import Gradients, finite_diff_oracle, loss_gradients
from .losses import DoubleWellParams, LossBreakdown, bce_an, double_well, total_loss, uniformity
from .projector import ModelParams, forward, load_model, mobius_linear, predict_probs, save_model
from .train import train

__version__ = "0.1.0"
