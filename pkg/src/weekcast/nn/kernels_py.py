"""Pure NumPy conv/pool kernels, the fallback when the compiled extension is absent."""

from __future__ import annotations

import numpy as np


def conv1d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Valid-mode stride-1 correlation.

    x: [batch, length, channels], w: [filters, kernel, channels], b: [filters]
    -> [batch, length - kernel + 1, filters]
    """
    kernel = w.shape[1]
    windows = np.lib.stride_tricks.sliding_window_view(x, kernel, axis=1)
    # windows: [batch, positions, channels, kernel]
    return np.einsum("bpck,fkc->bpf", windows, w) + b


def conv1d_backward(
    x: np.ndarray, w: np.ndarray, gy: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    kernel = w.shape[1]
    windows = np.lib.stride_tricks.sliding_window_view(x, kernel, axis=1)
    gw = np.einsum("bpf,bpck->fkc", gy, windows)
    gb = gy.sum(axis=(0, 1))
    # Input gradient is a full correlation with the kernel-reversed weights.
    pad = np.pad(gy, ((0, 0), (kernel - 1, kernel - 1), (0, 0)))
    gy_windows = np.lib.stride_tricks.sliding_window_view(pad, kernel, axis=1)
    gx = np.einsum("bifk,fkc->bic", gy_windows, w[:, ::-1, :])
    return gx, gw, gb


def maxpool1d_forward(x: np.ndarray, pool: int) -> tuple[np.ndarray, np.ndarray]:
    """Non-overlapping per-channel maxima; trailing remainder dropped.

    Returns (values, argmax) where argmax holds the within-window offset of
    the first maximal element (np.argmax picks the first occurrence).
    """
    batch, length, channels = x.shape
    out_len = length // pool
    blocks = x[:, : out_len * pool, :].reshape(batch, out_len, pool, channels)
    idx = np.argmax(blocks, axis=2)
    vals = np.max(blocks, axis=2)
    return vals, idx


def maxpool1d_backward(idx: np.ndarray, gy: np.ndarray, length: int, pool: int) -> np.ndarray:
    batch, out_len, channels = gy.shape
    gx_blocks = np.zeros((batch, out_len, pool, channels), dtype=np.float64)
    np.put_along_axis(gx_blocks, idx[:, :, None, :], gy[:, :, None, :], axis=2)
    gx = np.zeros((batch, length, channels), dtype=np.float64)
    gx[:, : out_len * pool, :] = gx_blocks.reshape(batch, out_len * pool, channels)
    return gx
