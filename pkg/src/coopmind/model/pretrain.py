"""Feature-extractor pretraining by behavior cloning.

The conv stack is warm-started by imitating an *independent* policy
(never the prediction target, which stays a black box): roll the donor
policy in self-play, then fit conv features + a linear head to its
actions.  The returned weights drop into ToMModel.load_extractor and
the provenance records which policy they came from.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import nn
from ..nn import ops
from ..agents.policy import Policy
from ..agents.rollout import episode_rng, rollout_episode
from ..env.features import featurize
from ..env.layout import Layout
from .config import ToMConfig
from .network import Dense, FeatureExtractor


@dataclass
class PretrainResult:
    weights: dict  # extractor parameter name -> array
    provenance: dict
    val_top1: float


def pretrain_extractor(
    donor: Policy,
    layouts: list[Layout],
    config: ToMConfig | None = None,
    episodes_per_layout: int = 2,
    horizon: int = 300,
    epochs: int = 12,
    batch_size: int = 128,
    lr: float = 1e-3,
    seed: int = 0,
    dtype=np.float32,
) -> PretrainResult:
    config = config or ToMConfig()
    features, labels = [], []
    for layout in layouts:
        for k in range(episodes_per_layout):
            rng = episode_rng(seed, "pretrain", donor.policy_id, layout.name, k)
            result = rollout_episode(layout, (donor, donor), horizon, rng)
            for state, joint in result.records:
                for ego in (0, 1):
                    features.append(featurize(layout, state, ego, dtype=dtype))
                    labels.append(int(joint[ego]))
    x = np.stack(features)
    y = np.array(labels, dtype=np.int64)

    rng = np.random.default_rng(seed)
    order = rng.permutation(len(x))
    split = int(len(x) * 0.8)
    train_ids, val_ids = order[:split], order[split:]

    init_rng = np.random.default_rng(config.seed)
    extractor = FeatureExtractor(init_rng, x.shape[1:], config, np.dtype(dtype))
    head = Dense(init_rng, config.hidden_size, 6, np.dtype(dtype))
    params = extractor.parameters() + head.parameters()
    optimizer = nn.Adam(params, lr=lr)

    def batch_loss(ids):
        probs = ops.softmax(head(ops.relu(extractor(nn.Tensor(x[ids])))), axis=-1)
        onehot = np.zeros((len(ids), 6), dtype=dtype)
        onehot[np.arange(len(ids)), y[ids]] = 1.0
        return ops.mean(ops.cross_entropy(probs, nn.Tensor(onehot)))

    for _ in range(epochs):
        epoch_order = rng.permutation(train_ids)
        for start in range(0, len(epoch_order), batch_size):
            loss = batch_loss(epoch_order[start : start + batch_size])
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()

    correct = 0
    with nn.no_grad():
        for start in range(0, len(val_ids), 512):
            ids = val_ids[start : start + 512]
            logits = head(ops.relu(extractor(nn.Tensor(x[ids]))))
            correct += int((logits.data.argmax(axis=-1) == y[ids]).sum())
    val_top1 = correct / max(len(val_ids), 1)

    weights = {
        f"extractor.{name}": p.data.copy()
        for name, p in extractor.named_parameters()
    }
    provenance = {
        "source_policy_id": donor.policy_id,
        "layouts": [layout.name for layout in layouts],
        "episodes_per_layout": episodes_per_layout,
        "horizon": horizon,
        "val_top1": val_top1,
        "seed": seed,
    }
    return PretrainResult(weights=weights, provenance=provenance, val_top1=val_top1)
