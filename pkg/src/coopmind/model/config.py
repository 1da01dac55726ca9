"""Predictor hyperparameters."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass
class ToMConfig:
    history_length: int = 10  # n: past state-action pairs fed to the model
    prediction_length: int = 3  # l: future actions forecast per query
    num_layers: int = 4
    num_heads: int = 8
    hidden_size: int = 128
    ff_size: int = 256
    conv_channels: tuple = (16, 16, 16)
    conv_kernels: tuple = (5, 3, 3)
    decoder_width: int = 128
    lr: float = 1e-3
    max_epochs: int = 100
    early_stop_patience: int = 10
    batch_size: int = 64
    seed: int = 0
    freeze_extractor: bool = False

    def __post_init__(self):
        if self.hidden_size % self.num_heads != 0:
            raise ValueError("hidden_size must be divisible by num_heads")
        if self.history_length < 1 or self.prediction_length < 1:
            raise ValueError("history_length and prediction_length must be >= 1")
        if len(self.conv_channels) != len(self.conv_kernels):
            raise ValueError("conv_channels and conv_kernels must align")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["conv_channels"] = list(self.conv_channels)
        d["conv_kernels"] = list(self.conv_kernels)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ToMConfig":
        d = dict(d)
        d["conv_channels"] = tuple(d["conv_channels"])
        d["conv_kernels"] = tuple(d["conv_kernels"])
        return cls(**d)
