"""Minimal reverse-mode autodiff substrate: tensors, primitives, Adam,
conv kernels (compiled or numpy), and checkpoint serialization."""

from .tensor import (
    NonScalarLossError,
    Parameter,
    ShapeMismatchError,
    Tensor,
    as_tensor,
    no_grad,
)
from .module import Module
from .ops import (
    add,
    concat,
    conv2d,
    cross_entropy,
    embedding,
    layer_norm,
    linear,
    matmul,
    mean,
    mul,
    relu,
    reshape,
    scaled_dot_product_attention,
    softmax,
    sum_,
    transpose,
)
from .optim import Adam, AdamState, adam_step
from .conv import HAVE_COMPILED, use_compiled
from .serialize import CheckpointError, load_tensors, save_tensors

__all__ = [
    "Adam",
    "AdamState",
    "CheckpointError",
    "HAVE_COMPILED",
    "Module",
    "NonScalarLossError",
    "Parameter",
    "ShapeMismatchError",
    "Tensor",
    "adam_step",
    "add",
    "as_tensor",
    "concat",
    "conv2d",
    "cross_entropy",
    "embedding",
    "layer_norm",
    "linear",
    "load_tensors",
    "matmul",
    "mean",
    "mul",
    "no_grad",
    "relu",
    "reshape",
    "save_tensors",
    "scaled_dot_product_attention",
    "softmax",
    "sum_",
    "transpose",
    "use_compiled",
]
