"""Predictors scored by the accuracy bench.

Besides the trained model there are three reference predictors: Random
(uniformly sampled actions, the control used in live sessions),
Persistence (repeat the target's last observed action), and Marginal
(always the training set's most frequent action).  Persistence and
Marginal bound what cheap statistics can score, so a model has to beat
both to demonstrate it actually reads the game.
"""

from __future__ import annotations

import numpy as np

from ..data.windows import TrainingSample
from ..env.layout import Layout
from ..env.state import NUM_ACTIONS
from ..model.network import PredictionSequence, ToMModel


class ToMPredictor:
    kind = "tom"

    def __init__(self, model: ToMModel, layout: Layout, batch_size: int = 256):
        self.model = model
        self.layout = layout
        self.batch_size = batch_size
        self.name = "tom"

    def predict(self, sample: TrainingSample) -> PredictionSequence:
        return self.model.forward(sample, self.layout)

    def predict_batch(self, samples: list[TrainingSample]):
        from ..env.features import featurize
        from .. import nn

        for start in range(0, len(samples), self.batch_size):
            chunk = samples[start : start + self.batch_size]
            states = np.stack([
                np.stack([
                    featurize(self.layout, s, sample.ego, dtype=self.model.dtype)
                    for s in sample.states()
                ])
                for sample in chunk
            ])
            actions = np.stack([s.action_inputs() for s in chunk]).astype(self.model.dtype)
            with nn.no_grad():
                probs = self.model.forward_batch(states, actions)
            for row in probs.data:
                yield PredictionSequence.from_distributions(row)


class RandomPredictor:
    """Uniformly random point predictions, re-sampled per query."""

    kind = "random"

    def __init__(self, prediction_length: int = 3, seed: int = 0):
        self.l = prediction_length
        self.rng = np.random.default_rng(seed)
        self.name = "random"

    def predict(self, sample: TrainingSample) -> PredictionSequence:
        actions = self.rng.integers(NUM_ACTIONS, size=self.l)
        distributions = np.zeros((self.l, NUM_ACTIONS))
        distributions[np.arange(self.l), actions] = 1.0
        return PredictionSequence.from_distributions(distributions)


class PersistencePredictor:
    """Repeats the target agent's last observed action l times."""

    kind = "persistence"

    def __init__(self, prediction_length: int = 3):
        self.l = prediction_length
        self.name = "persistence"

    def predict(self, sample: TrainingSample) -> PredictionSequence:
        _, last_joint = sample.history[-1]
        last_action = int(last_joint[sample.ego])
        distributions = np.zeros((self.l, NUM_ACTIONS))
        distributions[:, last_action] = 1.0
        return PredictionSequence.from_distributions(distributions)


class MarginalPredictor:
    """Emits the training split's action-frequency distribution."""

    kind = "marginal"

    def __init__(self, frequencies: np.ndarray, prediction_length: int = 3):
        total = frequencies.sum()
        if total <= 0:
            raise ValueError("frequency table is empty")
        self.distribution = frequencies / total
        self.l = prediction_length
        self.name = "marginal"

    @classmethod
    def fit(cls, dataset, split: str = "train", prediction_length: int = 3,
            n: int = 10, l: int = 3) -> "MarginalPredictor":
        counts = np.zeros(NUM_ACTIONS)
        for trajectory in dataset.in_split(split):
            role = trajectory.settings.target_role
            for _, joint in trajectory.records:
                counts[int(joint[role])] += 1
        return cls(counts, prediction_length=prediction_length)

    def predict(self, sample: TrainingSample) -> PredictionSequence:
        distributions = np.tile(self.distribution, (self.l, 1))
        return PredictionSequence.from_distributions(distributions)
