"""Stride-1 conv2d kernels with backend dispatch.

The compiled extension (``coopmind._ckernels``) is preferred when it
was built; a pure-numpy im2col implementation is the fallback.  Set
``COOPMIND_PURE_KERNELS=1`` to force the fallback (used by the parity
tests and the kernel benchmark).
"""

from __future__ import annotations

import os

import numpy as np

try:
    from coopmind import _ckernels
except ImportError:  # extension not built; numpy path below
    _ckernels = None

HAVE_COMPILED = _ckernels is not None


def use_compiled() -> bool:
    return HAVE_COMPILED and os.environ.get("COOPMIND_PURE_KERNELS", "") != "1"


def _padding_amount(padding: str, kh: int, kw: int) -> tuple[int, int]:
    if padding == "same":
        if kh % 2 == 0 or kw % 2 == 0:
            raise ValueError("same padding requires odd kernel sizes")
        return kh // 2, kw // 2
    if padding == "valid":
        return 0, 0
    raise ValueError(f"padding must be 'same' or 'valid', got {padding!r}")


def output_shape(x_shape, w_shape, padding: str) -> tuple[int, int, int, int]:
    n, _, h, w = x_shape
    f, _, kh, kw = w_shape
    ph, pw = _padding_amount(padding, kh, kw)
    return (n, f, h + 2 * ph - kh + 1, w + 2 * pw - kw + 1)


def _im2col(x: np.ndarray, kh: int, kw: int, ph: int, pw: int) -> np.ndarray:
    n, c, h, w = x.shape
    xp = np.pad(x, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    oh, ow = h + 2 * ph - kh + 1, w + 2 * pw - kw + 1
    cols = np.empty((n, c, kh, kw, oh, ow), dtype=x.dtype)
    for i in range(kh):
        for j in range(kw):
            cols[:, :, i, j] = xp[:, :, i : i + oh, j : j + ow]
    return cols


def conv2d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray, padding: str) -> np.ndarray:
    f, _, kh, kw = w.shape
    ph, pw = _padding_amount(padding, kh, kw)
    if use_compiled():
        out = np.empty(output_shape(x.shape, w.shape, padding), dtype=x.dtype)
        _ckernels.conv2d_forward(
            np.ascontiguousarray(x), np.ascontiguousarray(w),
            np.ascontiguousarray(b), ph, pw, out,
        )
        return out
    cols = _im2col(x, kh, kw, ph, pw)
    out = np.tensordot(cols, w, axes=([1, 2, 3], [1, 2, 3]))  # (n, oh, ow, f)
    out += b
    return np.ascontiguousarray(out.transpose(0, 3, 1, 2))


def conv2d_backward(
    x: np.ndarray, w: np.ndarray, grad_out: np.ndarray, padding: str
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients (dx, dw, db) of a conv2d_forward call."""
    f, c, kh, kw = w.shape
    ph, pw = _padding_amount(padding, kh, kw)
    if use_compiled():
        gx = np.zeros_like(x)
        gw = np.zeros_like(w)
        gb = np.zeros(f, dtype=w.dtype)
        gout = np.ascontiguousarray(grad_out)
        _ckernels.conv2d_backward_input(gout, np.ascontiguousarray(w), ph, pw, gx)
        _ckernels.conv2d_backward_weight(np.ascontiguousarray(x), gout, ph, pw, gw, gb)
        return gx, gw, gb

    n, _, h, wd = x.shape
    oh, ow = grad_out.shape[2], grad_out.shape[3]
    cols = _im2col(x, kh, kw, ph, pw)
    gw = np.tensordot(grad_out, cols, axes=([0, 2, 3], [0, 4, 5]))
    gb = grad_out.sum(axis=(0, 2, 3))
    # Scatter the per-patch input gradients back through the padding.
    gcols = np.tensordot(grad_out, w, axes=([1], [0]))  # (n, oh, ow, c, kh, kw)
    gxp = np.zeros((n, c, h + 2 * ph, wd + 2 * pw), dtype=x.dtype)
    for i in range(kh):
        for j in range(kw):
            gxp[:, :, i : i + oh, j : j + ow] += gcols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
    gx = gxp[:, :, ph : ph + h, pw : pw + wd]
    return np.ascontiguousarray(gx), gw, gb
