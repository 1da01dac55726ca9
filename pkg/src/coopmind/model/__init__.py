"""Transformer-based partner-action forecasting: model, training loop,
extractor pretraining, and display geometry."""

from .config import ToMConfig
from .geometry import project_positions
from .network import (
    LengthMismatchError,
    PredictionSequence,
    ToMModel,
    WindowLengthMismatchError,
)
from .pretrain import PretrainResult, pretrain_extractor
from .training import (
    EmptySplitError,
    SampleIndex,
    TrainResult,
    build_sample_index,
    evaluate,
    load_model,
    save_model,
    train,
    write_curves_csv,
)

__all__ = [
    "EmptySplitError",
    "LengthMismatchError",
    "PredictionSequence",
    "PretrainResult",
    "SampleIndex",
    "ToMConfig",
    "ToMModel",
    "TrainResult",
    "WindowLengthMismatchError",
    "build_sample_index",
    "evaluate",
    "load_model",
    "pretrain_extractor",
    "project_positions",
    "save_model",
    "train",
    "write_curves_csv",
]
