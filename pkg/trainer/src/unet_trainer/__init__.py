"""U-Net trainer producing probability maps for the instance-splitting pipeline."""

from .augment import augment_pair, flip_horizontal, flip_vertical, salt_and_pepper
from .config import DROPOUT_SCHEDULE, EXPERIMENTS, Experiment, NetConfig, TrainConfig
from .model import build_model, conv_widths, dropout_schedule
from .pmap import read_pmap, write_pmap

__version__ = "0.1.0"

__all__ = [
    "DROPOUT_SCHEDULE",
    "EXPERIMENTS",
    "Experiment",
    "NetConfig",
    "TrainConfig",
    "augment_pair",
    "build_model",
    "conv_widths",
    "dropout_schedule",
    "flip_horizontal",
    "flip_vertical",
    "read_pmap",
    "salt_and_pepper",
    "write_pmap",
]
