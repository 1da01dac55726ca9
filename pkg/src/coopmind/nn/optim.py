"""Adam with bias correction (beta1=0.9, beta2=0.999, eps=1e-8)."""

from __future__ import annotations

import numpy as np

from .tensor import ShapeMismatchError, Tensor


class AdamState:
    """Per-parameter first/second moment accumulators and step count."""

    def __init__(self, params: list[Tensor], beta1=0.9, beta2=0.999, eps=1e-8):
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.step_count = 0
        self.m = [np.zeros_like(p.data) for p in params]
        self.v = [np.zeros_like(p.data) for p in params]


def adam_step(params: list[Tensor], grads: list[np.ndarray], state: AdamState, lr: float):
    """One in-place Adam update of ``params`` given matching ``grads``."""
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ShapeMismatchError("adam_step", len(params), len(grads), len(state.m))
    state.step_count += 1
    t = state.step_count
    b1, b2, eps = state.beta1, state.beta2, state.eps
    for i, (param, grad) in enumerate(zip(params, grads)):
        if grad is None:
            continue
        if grad.shape != param.data.shape:
            raise ShapeMismatchError("adam_step", grad.shape, param.data.shape)
        state.m[i] = b1 * state.m[i] + (1 - b1) * grad
        state.v[i] = b2 * state.v[i] + (1 - b2) * grad * grad
        m_hat = state.m[i] / (1 - b1**t)
        v_hat = state.v[i] / (1 - b2**t)
        param.data -= lr * m_hat / (np.sqrt(v_hat) + eps)


class Adam:
    """Stateful wrapper: reads ``param.grad`` populated by backward()."""

    def __init__(self, params: list[Tensor], lr: float):
        self.params = list(params)
        self.lr = lr
        self.state = AdamState(self.params)

    def step(self):
        adam_step(self.params, [p.grad for p in self.params], self.state, self.lr)

    def zero_grad(self):
        for p in self.params:
            p.grad = None
