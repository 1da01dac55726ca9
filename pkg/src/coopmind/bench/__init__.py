"""Prediction-accuracy evaluation: baselines, scoring, reports."""

from .accuracy import (
    AccuracyRow,
    EmptySampleSetError,
    MissingPredictionRecordsError,
    action_accuracy,
    online_accuracy,
)
from .predictors import (
    MarginalPredictor,
    PersistencePredictor,
    RandomPredictor,
    ToMPredictor,
)
from .report import render_csv, render_table, write_report

__all__ = [
    "AccuracyRow",
    "EmptySampleSetError",
    "MarginalPredictor",
    "MissingPredictionRecordsError",
    "PersistencePredictor",
    "RandomPredictor",
    "ToMPredictor",
    "action_accuracy",
    "online_accuracy",
    "render_csv",
    "render_table",
    "write_report",
]
