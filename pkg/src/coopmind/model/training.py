"""Supervised training of the forecast model on windowed samples."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .. import nn
from ..data.trajectory import Dataset, Trajectory
from ..data.windows import joint_action_onehot
from ..env.features import featurize
from ..env.layout import Layout
from .config import ToMConfig
from .network import ToMModel


class EmptySplitError(ValueError):
    pass


@dataclass
class _TrajectoryCache:
    features: np.ndarray  # (T, C, H, W) grids, or (T, hidden) if embedded
    actions: np.ndarray  # (T, 12)
    labels: np.ndarray  # (T,) target-agent action per step


@dataclass
class SampleIndex:
    """Windowed samples over cached per-trajectory arrays."""

    caches: list[_TrajectoryCache]
    entries: list[tuple[int, int]]  # (cache index, current step t)
    n: int
    l: int
    embedded: bool = False  # features already run through the extractor

    def __len__(self):
        return len(self.entries)

    def gather(self, indices) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        states, actions, labels = [], [], []
        for i in indices:
            ci, t = self.entries[i]
            cache = self.caches[ci]
            window = slice(t - self.n + 1, t + 1)
            states.append(cache.features[window])
            acts = cache.actions[window].copy()
            acts[-1] = 0.0  # the current step's action is unknown
            actions.append(acts)
            labels.append(cache.labels[t : t + self.l])
        return np.stack(states), np.stack(actions), np.stack(labels)

    def with_embeddings(self, model: ToMModel) -> "SampleIndex":
        """Replace raw grids with per-state extractor outputs (valid only
        while the extractor stays frozen)."""
        caches = []
        for cache in self.caches:
            embedded = np.concatenate(
                [
                    model.state_features(cache.features[start : start + 512])
                    for start in range(0, len(cache.features), 512)
                ]
            )
            caches.append(_TrajectoryCache(embedded, cache.actions, cache.labels))
        return SampleIndex(
            caches=caches, entries=self.entries, n=self.n, l=self.l, embedded=True
        )


def build_sample_index(
    trajectories: list[Trajectory], layout: Layout, n: int, l: int, dtype=np.float32
) -> SampleIndex:
    caches, entries = [], []
    for trajectory in trajectories:
        ego = trajectory.settings.target_role
        features = np.stack(
            [featurize(layout, state, ego, dtype=dtype) for state, _ in trajectory.records]
        )
        actions = np.stack(
            [joint_action_onehot(a) for _, a in trajectory.records]
        ).astype(dtype)
        labels = np.array(
            [trajectory.target_action(t) for t in range(trajectory.horizon)], dtype=np.int64
        )
        ci = len(caches)
        caches.append(_TrajectoryCache(features, actions, labels))
        entries.extend((ci, t) for t in range(n - 1, trajectory.horizon - l))
    return SampleIndex(caches=caches, entries=entries, n=n, l=l)


def evaluate(model: ToMModel, index: SampleIndex, batch_size: int = 256):
    """(mean loss, action-level accuracy) over an index."""
    total_loss, correct, positions = 0.0, 0, 0
    batches = 0
    with nn.no_grad():
        for start in range(0, len(index), batch_size):
            ids = range(start, min(start + batch_size, len(index)))
            states, actions, labels = index.gather(ids)
            probs = model.forward_batch(states, actions, precomputed_features=index.embedded)
            total_loss += float(model.loss(probs, labels).data)
            predicted = probs.data.argmax(axis=-1)
            correct += int((predicted == labels).sum())
            positions += labels.size
            batches += 1
    if positions == 0:
        raise EmptySplitError("no samples to evaluate")
    return total_loss / batches, correct / positions


@dataclass
class TrainResult:
    model: ToMModel
    curves: list[dict] = field(default_factory=list)
    best_epoch: int = 0
    best_val_loss: float = float("inf")


def train(
    model: ToMModel,
    dataset: Dataset,
    layout: Layout,
    config: ToMConfig | None = None,
    log=None,
) -> TrainResult:
    """Adam training with early stopping on validation loss; returns the
    best-validation checkpoint and per-epoch curves."""
    config = config or model.config
    n, l = config.history_length, config.prediction_length
    train_index = build_sample_index(dataset.in_split("train"), layout, n, l, model.dtype)
    val_index = build_sample_index(dataset.in_split("val"), layout, n, l, model.dtype)
    if len(train_index) == 0 or len(val_index) == 0:
        raise EmptySplitError(
            f"train ({len(train_index)}) and val ({len(val_index)}) must be non-empty"
        )
    frozen = getattr(model, "_extractor_frozen", False)
    if frozen:
        # The conv stack never updates, so per-state embeddings are
        # constants; compute them once instead of once per window.
        train_index = train_index.with_embeddings(model)
        val_index = val_index.with_embeddings(model)

    rng = np.random.default_rng(config.seed)
    params = model.trainable_parameters()
    optimizer = nn.Adam(params, lr=config.lr)
    result = TrainResult(model=model)
    best_state = model.state_dict()
    epochs_since_best = 0

    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(len(train_index))
        epoch_loss, batches = 0.0, 0
        for start in range(0, len(order), config.batch_size):
            batch_ids = order[start : start + config.batch_size]
            states, actions, labels = train_index.gather(batch_ids)
            probs = model.forward_batch(states, actions, precomputed_features=frozen)
            loss = model.loss(probs, labels)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            epoch_loss += float(loss.data)
            batches += 1
        val_loss, val_acc = evaluate(model, val_index)
        point = {
            "epoch": epoch,
            "train_loss": epoch_loss / max(batches, 1),
            "val_loss": val_loss,
            "val_acc": val_acc,
        }
        result.curves.append(point)
        if log:
            log(point)
        if val_loss < result.best_val_loss - 1e-9:
            result.best_val_loss = val_loss
            result.best_epoch = epoch
            best_state = model.state_dict()
            epochs_since_best = 0
        else:
            epochs_since_best += 1
            if epochs_since_best > config.early_stop_patience:
                break

    model.load_state_dict(best_state)
    return result


def write_curves_csv(path, curves: list[dict]):
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=["epoch", "train_loss", "val_loss", "val_acc"])
        writer.writeheader()
        for point in curves:
            writer.writerow(point)


def save_model(path, model: ToMModel):
    meta = {
        "config": model.config.to_dict(),
        "input_shape": list(model.input_shape),
        "extractor_provenance": model.extractor_provenance,
        "dtype": model.dtype.name,
    }
    nn.save_tensors(path, model.state_dict(), meta=meta)


def load_model(path) -> ToMModel:
    tensors, meta = nn.load_tensors(path)
    config = ToMConfig.from_dict(meta["config"])
    model = ToMModel(tuple(meta["input_shape"]), config, dtype=np.dtype(meta["dtype"]))
    model.load_state_dict(tensors)
    model.extractor_provenance = meta.get("extractor_provenance", {})
    return model
