"""Network, training, and experiment configuration."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

# Dropout rate per level, in order from the input level, through the
# bottleneck, back up to the output level.
DROPOUT_SCHEDULE = (0.15, 0.2, 0.3, 0.4, 0.5, 0.4, 0.3, 0.2, 0.1)

SALT_PEPPER_FRACTION = 0.05


@dataclass(frozen=True)
class NetConfig:
    input_size: int = 512
    depth: int = 5  # encoder levels including the bottleneck
    base_filters: int = 16
    dropout_rates: tuple = DROPOUT_SCHEDULE

    def __post_init__(self):
        if self.depth < 2:
            raise ValueError("depth must be >= 2")
        if len(self.dropout_rates) != 2 * self.depth - 1:
            raise ValueError(
                f"need {2 * self.depth - 1} dropout rates for depth {self.depth}, "
                f"got {len(self.dropout_rates)}")
        if self.input_size % (1 << (self.depth - 1)) != 0:
            raise ValueError("input_size must be divisible by 2**(depth-1)")


@dataclass(frozen=True)
class Experiment:
    name: str
    salt_pepper: bool
    horizontal_flip: bool
    vertical_flip: bool
    mask_kind: str  # "full" or "split"
    post_processing: bool


EXPERIMENTS = {
    "E1": Experiment("E1", False, False, False, "full", False),
    "E2": Experiment("E2", False, False, False, "split", False),
    "E3": Experiment("E3", True, True, True, "split", False),
    "E4": Experiment("E4", True, True, False, "split", False),
    "E5": Experiment("E5", False, False, False, "split", True),
}


@dataclass(frozen=True)
class TrainConfig:
    experiment: str = "E4"
    epochs: int = 250
    batch_size: int = 4
    learning_rate: float = 0.001
    folds: int = 10
    loss: str = "binary_crossentropy"
    optimizer: str = "adam"
    init: str = "he_normal"  # truncated normal scaled by fan-in
    seed: int = 0
    net: NetConfig = field(default_factory=NetConfig)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.epochs < 1 or self.batch_size < 1 or self.folds < 2:
            raise ValueError("epochs and batch_size must be >= 1, folds >= 2")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["net"]["dropout_rates"] = list(self.net.dropout_rates)
        d["augmentation"] = asdict(EXPERIMENTS[self.experiment])
        return d
