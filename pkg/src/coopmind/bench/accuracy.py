"""Action-level accuracy scoring, offline and online."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data.windows import TrainingSample


class EmptySampleSetError(ValueError):
    pass


class MissingPredictionRecordsError(ValueError):
    pass


@dataclass
class AccuracyRow:
    predictor: str
    target_style: str
    layout: str
    split: str
    samples: int
    positions: int
    accuracy: float
    per_position: list[float] = field(default_factory=list)
    per_position_counts: list[int] = field(default_factory=list)


def action_accuracy(
    predictor,
    samples: list[TrainingSample],
    target_style: str = "",
    layout_id: str = "",
    split: str = "",
) -> AccuracyRow:
    """Fraction of predicted positions whose argmax matches the logged
    target action, with a per-position breakdown."""
    samples = list(samples)
    if not samples:
        raise EmptySampleSetError("no samples to score")
    l = len(samples[0].labels)
    hits = np.zeros(l, dtype=np.int64)
    counts = np.zeros(l, dtype=np.int64)
    if hasattr(predictor, "predict_batch"):
        predictions = predictor.predict_batch(samples)
    else:
        predictions = (predictor.predict(s) for s in samples)
    for sample, prediction in zip(samples, predictions):
        for i, (predicted, label) in enumerate(zip(prediction.argmax_actions, sample.labels)):
            counts[i] += 1
            if predicted == label:
                hits[i] += 1
    total = counts.sum()
    return AccuracyRow(
        predictor=getattr(predictor, "name", predictor.__class__.__name__),
        target_style=target_style or samples[0].trajectory_id,
        layout=layout_id or samples[0].layout_id,
        split=split,
        samples=len(samples),
        positions=int(total),
        accuracy=float(hits.sum() / total),
        per_position=[float(h / c) if c else 0.0 for h, c in zip(hits, counts)],
        per_position_counts=[int(c) for c in counts],
    )


def online_accuracy(
    tick_records: list[dict],
    target_style: str = "",
    layout_id: str = "",
    predictor_name: str = "tom",
) -> AccuracyRow:
    """Score the predictions that were actually displayed during live
    play against the actions the agent then took.

    ``tick_records``: one dict per tick with keys ``agent_action`` (int)
    and ``prediction`` (dict with an ``actions`` list, or None when
    nothing was displayed).  The prediction at tick t is scored against
    the agent actions at ticks t, t+1, ... ; positions that run past the
    end of the episode are excluded from the denominator."""
    agent_actions = [r["agent_action"] for r in tick_records]
    hits: list[int] = []
    counts: list[int] = []
    scored_any = False
    for t, record in enumerate(tick_records):
        prediction = record.get("prediction")
        if not prediction or not prediction.get("actions"):
            continue
        scored_any = True
        for i, predicted in enumerate(prediction["actions"]):
            if t + i >= len(agent_actions):
                break  # truncated final window
            while len(hits) <= i:
                hits.append(0)
                counts.append(0)
            counts[i] += 1
            if int(predicted) == int(agent_actions[t + i]):
                hits[i] += 1
    if not scored_any:
        raise MissingPredictionRecordsError("no displayed predictions in the log")
    total = sum(counts)
    return AccuracyRow(
        predictor=predictor_name,
        target_style=target_style,
        layout=layout_id,
        split="online",
        samples=sum(1 for r in tick_records if r.get("prediction")),
        positions=total,
        accuracy=sum(hits) / total,
        per_position=[h / c if c else 0.0 for h, c in zip(hits, counts)],
        per_position_counts=counts,
    )
