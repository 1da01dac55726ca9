"""The action-forecast network.

Per history step, a joint-action embedding and a CNN encoding of the
state grid are fused into one token; the current step's action slot is
always the zero vector (that action has not happened yet).  An
encoder-only transformer mixes the n tokens, the current-step token's
representation feeds a small MLP head, and each of the l prediction
positions gets an independent softmax over the 6 actions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import nn
from ..nn import ops
from ..data.windows import JOINT_ONEHOT_DIM, TrainingSample
from ..env.features import featurize
from ..env.layout import Layout
from ..env.state import NUM_ACTIONS
from .config import ToMConfig


@dataclass(frozen=True)
class PredictionSequence:
    """l per-position action distributions plus their point predictions
    (argmax with lowest-index tie break) and max-probability scores."""

    distributions: np.ndarray  # (l, 6)
    argmax_actions: tuple[int, ...]
    confidence: tuple[float, ...]

    @classmethod
    def from_distributions(cls, distributions: np.ndarray) -> "PredictionSequence":
        argmax = tuple(int(np.argmax(row)) for row in distributions)
        confidence = tuple(float(row.max()) for row in distributions)
        return cls(distributions=distributions, argmax_actions=argmax, confidence=confidence)


class LengthMismatchError(ValueError):
    pass


class WindowLengthMismatchError(ValueError):
    pass


def _dense_init(rng, fan_in, fan_out, dtype):
    scale = np.sqrt(2.0 / fan_in)
    return (rng.standard_normal((fan_in, fan_out)) * scale).astype(dtype)


class Dense(nn.Module):
    def __init__(self, rng, fan_in, fan_out, dtype, zero_init=False):
        if zero_init:
            weight = np.zeros((fan_in, fan_out), dtype=dtype)
        else:
            weight = _dense_init(rng, fan_in, fan_out, dtype)
        self.weight = nn.Parameter(weight)
        self.bias = nn.Parameter(np.zeros(fan_out, dtype=dtype))

    def __call__(self, x):
        return ops.linear(x, self.weight, self.bias)


class Conv(nn.Module):
    def __init__(self, rng, in_ch, out_ch, kernel, dtype):
        scale = np.sqrt(2.0 / (in_ch * kernel * kernel))
        self.weight = nn.Parameter(
            (rng.standard_normal((out_ch, in_ch, kernel, kernel)) * scale).astype(dtype)
        )
        self.bias = nn.Parameter(np.zeros(out_ch, dtype=dtype))

    def __call__(self, x):
        return ops.conv2d(x, self.weight, self.bias, padding="same")


class FeatureExtractor(nn.Module):
    """Conv stack over state grids, flattened and projected to hidden."""

    def __init__(self, rng, input_shape, config: ToMConfig, dtype):
        channels, height, width = input_shape
        self.convs = []
        in_ch = channels
        for out_ch, kernel in zip(config.conv_channels, config.conv_kernels):
            self.convs.append(Conv(rng, in_ch, out_ch, kernel, dtype))
            in_ch = out_ch
        self.flat_dim = in_ch * height * width
        self.project = Dense(rng, self.flat_dim, config.hidden_size, dtype)

    def __call__(self, x):
        for conv in self.convs:
            x = ops.relu(conv(x))
        return self.project(ops.reshape(x, (x.shape[0], self.flat_dim)))


class LayerNorm(nn.Module):
    def __init__(self, size, dtype):
        self.gamma = nn.Parameter(np.ones(size, dtype=dtype))
        self.beta = nn.Parameter(np.zeros(size, dtype=dtype))

    def __call__(self, x):
        return ops.layer_norm(x, self.gamma, self.beta)


class TransformerLayer(nn.Module):
    """Post-norm encoder block with full bidirectional attention."""

    def __init__(self, rng, config: ToMConfig, dtype):
        h = config.hidden_size
        self.heads = config.num_heads
        self.q = Dense(rng, h, h, dtype)
        self.k = Dense(rng, h, h, dtype)
        self.v = Dense(rng, h, h, dtype)
        self.proj = Dense(rng, h, h, dtype)
        self.norm1 = LayerNorm(h, dtype)
        self.norm2 = LayerNorm(h, dtype)
        self.ff1 = Dense(rng, h, config.ff_size, dtype)
        self.ff2 = Dense(rng, config.ff_size, h, dtype)

    def _split_heads(self, x, batch, tokens):
        per_head = x.shape[-1] // self.heads
        x = ops.reshape(x, (batch, tokens, self.heads, per_head))
        return ops.transpose(x, (0, 2, 1, 3))

    def __call__(self, x):
        batch, tokens, hidden = x.shape
        q = self._split_heads(self.q(x), batch, tokens)
        k = self._split_heads(self.k(x), batch, tokens)
        v = self._split_heads(self.v(x), batch, tokens)
        mixed = ops.scaled_dot_product_attention(q, k, v)
        mixed = ops.reshape(ops.transpose(mixed, (0, 2, 1, 3)), (batch, tokens, hidden))
        x = self.norm1(ops.add(x, self.proj(mixed)))
        x = self.norm2(ops.add(x, self.ff2(ops.relu(self.ff1(x)))))
        return x


def sinusoidal_positions(length: int, size: int, dtype) -> np.ndarray:
    positions = np.arange(length)[:, None]
    dims = np.arange(size // 2)[None, :]
    angles = positions / np.power(10000.0, 2 * dims / size)
    encoding = np.zeros((length, size))
    encoding[:, 0::2] = np.sin(angles)
    encoding[:, 1::2] = np.cos(angles)
    return encoding.astype(dtype)


class ToMModel(nn.Module):
    """Forecasts the partner agent's next l actions from the last n
    state-action pairs.  Consumes only observed states and logged joint
    actions; it never reads the target policy's internals."""

    def __init__(self, input_shape, config: ToMConfig | None = None, dtype=np.float32):
        config = config or ToMConfig()
        rng = np.random.default_rng(config.seed)
        self.config = config
        self.input_shape = tuple(input_shape)
        self.dtype = np.dtype(dtype)
        self.extractor = FeatureExtractor(rng, input_shape, config, self.dtype)
        self.action_embed = Dense(rng, JOINT_ONEHOT_DIM, config.hidden_size, self.dtype)
        self.fuse = Dense(rng, 2 * config.hidden_size, config.hidden_size, self.dtype)
        self.positional = sinusoidal_positions(
            config.history_length, config.hidden_size, self.dtype
        )
        self.layers = [TransformerLayer(rng, config, self.dtype) for _ in range(config.num_layers)]
        self.head_hidden = Dense(rng, config.hidden_size, config.decoder_width, self.dtype)
        # Zero-initialized output layer: an untrained model predicts the
        # uniform distribution at every position.
        self.head_out = Dense(
            rng, config.decoder_width,
            config.prediction_length * NUM_ACTIONS, self.dtype, zero_init=True,
        )
        self.extractor_provenance: dict = {"source": "random_init"}

    # -- encoding ----------------------------------------------------------

    def encode_tokens(self, states, actions) -> nn.Tensor:
        """(B, n, C, H, W) states + (B, n, 12) action one-hots -> (B, n, h)."""
        batch, tokens = states.shape[0], states.shape[1]
        if tokens != self.config.history_length:
            raise WindowLengthMismatchError(
                f"expected {self.config.history_length} steps, got {tokens}"
            )
        flat = ops.reshape(nn.as_tensor(states), (batch * tokens,) + self.input_shape)
        feats = self.extractor(flat)
        feats = ops.reshape(feats, (batch, tokens, self.config.hidden_size))
        return self._fuse_tokens(feats, actions)

    def _fuse_tokens(self, feats, actions) -> nn.Tensor:
        aemb = self.action_embed(nn.as_tensor(actions))
        fused = self.fuse(ops.concat([aemb, nn.as_tensor(feats)], axis=-1))
        return ops.add(fused, nn.Tensor(self.positional))

    def state_features(self, states) -> np.ndarray:
        """(M, C, H, W) -> (M, hidden) extractor outputs with no graph.
        Lets a frozen extractor be applied once per state instead of once
        per window during training."""
        with nn.no_grad():
            return self.extractor(nn.Tensor(states.astype(self.dtype, copy=False))).data

    def forward_batch(self, states, actions, precomputed_features: bool = False) -> nn.Tensor:
        """Returns (B, l, 6) probabilities.  ``states`` is either raw
        (B, n, C, H, W) grids or, with ``precomputed_features``,
        (B, n, hidden) extractor outputs."""
        if precomputed_features:
            x = self._fuse_tokens(states, actions)
        else:
            x = self.encode_tokens(states, actions)
        for layer in self.layers:
            x = layer(x)
        current = ops.index_select_single(x, axis=1, index=self.config.history_length - 1)
        hidden = ops.relu(self.head_hidden(current))
        logits = self.head_out(hidden)
        logits = ops.reshape(
            logits, (states.shape[0], self.config.prediction_length, NUM_ACTIONS)
        )
        return ops.softmax(logits, axis=-1)

    # -- sample-level API ----------------------------------------------------

    def sample_arrays(self, sample: TrainingSample, layout: Layout):
        states = np.stack(
            [featurize(layout, s, sample.ego, dtype=self.dtype) for s in sample.states()]
        )
        actions = sample.action_inputs().astype(self.dtype)
        return states[None], actions[None]

    def encode_window(self, sample: TrainingSample, layout: Layout) -> np.ndarray:
        """H': the n fused token vectors for one sample (pre-transformer)."""
        if sample.n != self.config.history_length:
            raise WindowLengthMismatchError(
                f"sample window {sample.n} != configured {self.config.history_length}"
            )
        states, actions = self.sample_arrays(sample, layout)
        with nn.no_grad():
            tokens = self.encode_tokens(states, actions)
        return tokens.data[0]

    def forward(self, sample: TrainingSample, layout: Layout) -> PredictionSequence:
        states, actions = self.sample_arrays(sample, layout)
        return self.predict_window(states, actions)

    def predict_window(self, states, actions) -> PredictionSequence:
        with nn.no_grad():
            probs = self.forward_batch(states, actions)
        return PredictionSequence.from_distributions(probs.data[0])

    # -- loss ----------------------------------------------------------------

    def loss(self, probs: nn.Tensor, labels: np.ndarray) -> nn.Tensor:
        """Mean over the batch of the summed per-position cross-entropy.

        ``labels``: (B, l) integer actions."""
        if labels.shape[1] != self.config.prediction_length:
            raise LengthMismatchError(
                f"labels have {labels.shape[1]} positions, model predicts "
                f"{self.config.prediction_length}"
            )
        onehot = np.zeros(probs.shape, dtype=self.dtype)
        b_idx = np.repeat(np.arange(labels.shape[0]), labels.shape[1])
        l_idx = np.tile(np.arange(labels.shape[1]), labels.shape[0])
        onehot[b_idx, l_idx, labels.reshape(-1)] = 1.0
        ce = ops.cross_entropy(probs, nn.Tensor(onehot))  # (B, l)
        return ops.mean(ops.sum_(ce, axis=1))

    # -- extractor handling ----------------------------------------------------

    def load_extractor(self, weights: dict, provenance: dict, freeze: bool | None = None):
        """Install pretrained conv weights; ``provenance`` must name the
        independent source policy (never the prediction target)."""
        named = dict(self.extractor.named_parameters("extractor."))
        for name, value in weights.items():
            if name not in named:
                raise KeyError(f"unknown extractor parameter {name}")
            if named[name].data.shape != value.shape:
                raise ValueError(
                    f"{name}: shape {value.shape} != {named[name].data.shape}"
                )
            named[name].data = value.astype(self.dtype)
        self.extractor_provenance = dict(provenance)
        if freeze is None:
            freeze = self.config.freeze_extractor
        self._extractor_frozen = bool(freeze)

    def trainable_parameters(self):
        frozen = set()
        if getattr(self, "_extractor_frozen", False):
            frozen = {id(p) for p in self.extractor.parameters()}
        return [p for p in self.parameters() if id(p) not in frozen]
