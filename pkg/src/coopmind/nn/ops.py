"""Differentiable primitives.

Forward values are plain numpy; each op registers its backward rule
through ``make_op``.  Gradients through broadcast ops are summed back
over the broadcast axes.
"""

from __future__ import annotations

import numpy as np

from . import conv as conv_backend
from .tensor import ShapeMismatchError, Tensor, as_tensor, make_op

_LOG_TINY = 1e-12


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum ``grad`` down to ``shape`` (inverse of numpy broadcasting)."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    value = a.data + b.data

    def backward(g):
        return (_unbroadcast(g, a.data.shape), _unbroadcast(g, b.data.shape))

    return make_op((a, b), value, backward)


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    value = a.data * b.data

    def backward(g):
        return (
            _unbroadcast(g * b.data, a.data.shape),
            _unbroadcast(g * a.data, b.data.shape),
        )

    return make_op((a, b), value, backward)


def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.data.ndim < 1 or b.data.ndim < 2 or a.data.shape[-1] != b.data.shape[-2]:
        raise ShapeMismatchError("matmul", a.data.shape, b.data.shape)
    value = a.data @ b.data

    def backward(g):
        ga = g @ np.swapaxes(b.data, -1, -2)
        gb = np.swapaxes(a.data, -1, -2) @ g
        return (_unbroadcast(ga, a.data.shape), _unbroadcast(gb, b.data.shape))

    return make_op((a, b), value, backward)


def relu(x) -> Tensor:
    x = as_tensor(x)
    value = np.maximum(x.data, 0)

    def backward(g):
        return (g * (x.data > 0),)

    return make_op((x,), value, backward)


def reshape(x, shape) -> Tensor:
    x = as_tensor(x)
    value = x.data.reshape(shape)

    def backward(g):
        return (g.reshape(x.data.shape),)

    return make_op((x,), value, backward)


def transpose(x, axes) -> Tensor:
    x = as_tensor(x)
    value = x.data.transpose(axes)
    inverse = np.argsort(axes)

    def backward(g):
        return (g.transpose(inverse),)

    return make_op((x,), value, backward)


def concat(tensors, axis=-1) -> Tensor:
    tensors = tuple(as_tensor(t) for t in tensors)
    value = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.data.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def backward(g):
        return tuple(np.split(g, splits, axis=axis))

    return make_op(tensors, value, backward)


def sum_(x, axis=None, keepdims=False) -> Tensor:
    x = as_tensor(x)
    value = x.data.sum(axis=axis, keepdims=keepdims)

    def backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, x.data.shape).copy(),)

    return make_op((x,), value, backward)


def mean(x, axis=None, keepdims=False) -> Tensor:
    x = as_tensor(x)
    count = x.data.size if axis is None else x.data.shape[axis]
    return mul(sum_(x, axis=axis, keepdims=keepdims), 1.0 / count)


def linear(x, weight, bias=None) -> Tensor:
    """Affine map ``x @ weight + bias`` over the last axis."""
    out = matmul(x, weight)
    if bias is not None:
        out = add(out, bias)
    return out


def layer_norm(x, gamma, beta, eps=1e-5) -> Tensor:
    """Normalize the last axis to zero mean / unit variance, then scale
    and shift."""
    x, gamma, beta = as_tensor(x), as_tensor(gamma), as_tensor(beta)
    mu = x.data.mean(axis=-1, keepdims=True)
    var = x.data.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mu) * inv
    value = xhat * gamma.data + beta.data
    n = x.data.shape[-1]

    def backward(g):
        g_xhat = g * gamma.data
        gx = inv * (
            g_xhat
            - g_xhat.mean(axis=-1, keepdims=True)
            - xhat * (g_xhat * xhat).mean(axis=-1, keepdims=True)
        )
        g_gamma = _unbroadcast(g * xhat, gamma.data.shape)
        g_beta = _unbroadcast(g, beta.data.shape)
        return (gx, g_gamma, g_beta)

    return make_op((x, gamma, beta), value, backward)


def softmax(x, axis=-1) -> Tensor:
    x = as_tensor(x)
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    value = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        dot = (g * value).sum(axis=axis, keepdims=True)
        return ((g - dot) * value,)

    return make_op((x,), value, backward)


def embedding(weight, indices) -> Tensor:
    """Row lookup ``weight[indices]`` with scatter-add backward."""
    weight = as_tensor(weight)
    idx = np.asarray(indices)
    value = weight.data[idx]

    def backward(g):
        gw = np.zeros_like(weight.data)
        np.add.at(gw, idx.reshape(-1), g.reshape(-1, weight.data.shape[-1]))
        return (gw,)

    return make_op((weight,), value, backward)


def index_select_single(x, axis: int, index: int) -> Tensor:
    """Pick one slice along ``axis`` (e.g. the last sequence token)."""
    x = as_tensor(x)
    value = np.take(x.data, index, axis=axis)

    def backward(g):
        gx = np.zeros_like(x.data)
        sl = [slice(None)] * x.data.ndim
        sl[axis] = index
        gx[tuple(sl)] = g
        return (gx,)

    return make_op((x,), value, backward)


def conv2d(x, weight, bias, padding="same") -> Tensor:
    """Stride-1 2-D convolution over (N, C, H, W) input."""
    x, weight, bias = as_tensor(x), as_tensor(weight), as_tensor(bias)
    if x.data.ndim != 4 or weight.data.ndim != 4 or x.data.shape[1] != weight.data.shape[1]:
        raise ShapeMismatchError("conv2d", x.data.shape, weight.data.shape)
    value = conv_backend.conv2d_forward(x.data, weight.data, bias.data, padding)

    def backward(g):
        return conv_backend.conv2d_backward(x.data, weight.data, g, padding)

    return make_op((x, weight, bias), value, backward)


def scaled_dot_product_attention(q, k, v) -> Tensor:
    """Attention over (..., T, D) tensors, composed from primitives."""
    d = q.data.shape[-1]
    scores = mul(matmul(q, transpose(k, _swap_last(k.data.ndim))), 1.0 / np.sqrt(d))
    return matmul(softmax(scores, axis=-1), v)


def _swap_last(ndim: int) -> tuple:
    axes = list(range(ndim))
    axes[-1], axes[-2] = axes[-2], axes[-1]
    return tuple(axes)


def cross_entropy(pred, onehot) -> Tensor:
    """Cross-entropy between predicted distributions and one-hot labels,
    summed over the class axis: shape (..., K) -> (...)."""
    pred, onehot = as_tensor(pred), as_tensor(onehot)
    if pred.data.shape != onehot.data.shape:
        raise ShapeMismatchError("cross_entropy", pred.data.shape, onehot.data.shape)
    clamped = np.maximum(pred.data, _LOG_TINY)
    value = -(onehot.data * np.log(clamped)).sum(axis=-1)

    def backward(g):
        gp = -(onehot.data / clamped) * np.expand_dims(g, -1)
        g_onehot = -np.log(clamped) * np.expand_dims(g, -1)
        return (gp, g_onehot)

    return make_op((pred, onehot), value, backward)
