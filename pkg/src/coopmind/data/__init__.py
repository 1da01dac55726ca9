"""Offline trajectory datasets: collection, splits, windowed samples,
and the on-disk format."""

from .collect import (
    DEFAULT_SETTINGS,
    HorizonTooShortError,
    TooFewPartnersError,
    collect_dataset,
    pair_settings,
    split_dataset,
)
from .store import (
    ChecksumError,
    DatasetIoError,
    ReplayMismatchError,
    SchemaVersionError,
    load,
    save,
    validate_replay,
)
from .trajectory import Dataset, RolloutSettings, SCHEMA_VERSION, SELF_PARTNER, Trajectory
from .windows import (
    JOINT_ONEHOT_DIM,
    TrainingSample,
    joint_action_onehot,
    make_samples,
    trajectory_samples,
)

__all__ = [
    "ChecksumError",
    "DEFAULT_SETTINGS",
    "Dataset",
    "DatasetIoError",
    "HorizonTooShortError",
    "JOINT_ONEHOT_DIM",
    "ReplayMismatchError",
    "RolloutSettings",
    "SCHEMA_VERSION",
    "SELF_PARTNER",
    "SchemaVersionError",
    "TooFewPartnersError",
    "TrainingSample",
    "Trajectory",
    "collect_dataset",
    "joint_action_onehot",
    "load",
    "make_samples",
    "pair_settings",
    "save",
    "split_dataset",
    "trajectory_samples",
    "validate_replay",
]
