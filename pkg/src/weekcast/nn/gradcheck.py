"""Central finite-difference gradients, the independent oracle for backprop tests.

Finite differences are only trustworthy away from the kinks of relu and
max-pool, so helpers here also measure how close a forward pass comes to
those kinks and let callers reject ill-conditioned random instances.
"""

from __future__ import annotations

import numpy as np

from .network import NetworkSpec, clone_params, forward
from .training import loss_and_output_grad


def _loss_value(spec, params, inputs, targets, loss):
    pred, _ = forward(spec, params, inputs)
    value, _ = loss_and_output_grad(pred, targets, loss)
    return value


def finite_difference_gradients(spec: NetworkSpec, params: dict, inputs, targets,
                                loss: str = "mse", h: float = 1e-5) -> dict:
    """Central differences (f(p+h) - f(p-h)) / 2h for every parameter entry."""
    targets = np.asarray(targets, dtype=np.float64)
    work = clone_params(params)
    grads: dict[str, dict[str, np.ndarray]] = {}
    for lid, p in work.items():
        grads[lid] = {}
        for name, arr in p.items():
            g = np.zeros_like(arr)
            flat = arr.ravel()
            gflat = g.ravel()
            for i in range(flat.size):
                original = flat[i]
                flat[i] = original + h
                up = _loss_value(spec, work, inputs, targets, loss)
                flat[i] = original - h
                down = _loss_value(spec, work, inputs, targets, loss)
                flat[i] = original
                gflat[i] = (up - down) / (2.0 * h)
            grads[lid][name] = g
    return grads


def max_relative_error(analytic: dict, numeric: dict) -> float:
    """max over entries of |a - n| / max(|a|, |n|, 1)."""
    worst = 0.0
    for lid, p in analytic.items():
        for name, a in p.items():
            n = numeric[lid][name]
            denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1.0)
            worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


def kink_margin(spec: NetworkSpec, params: dict, inputs) -> float:
    """Smallest distance of any relu input to 0 or pool window max to runner-up.

    Networks without relu or pooling report infinity.
    """
    _, cache = forward(spec, params, inputs)
    margin = np.inf
    chains = list(cache["heads"]) + [cache["tail"]]
    for chain in chains:
        for _lid, kind, saved, layer in chain:
            if kind == "relu":
                margin = min(margin, float(np.min(np.abs(saved))))
            elif kind == "maxpool1d":
                x, _idx = saved
                pool = layer.pool_size
                if pool < 2:
                    continue
                batch, length, channels = x.shape
                out_len = length // pool
                blocks = x[:, : out_len * pool, :].reshape(batch, out_len, pool, channels)
                ordered = np.sort(blocks, axis=2)
                top = ordered[:, :, -1, :]
                gaps = top - ordered[:, :, -2, :]
                # A window whose top two entries are both exactly zero comes
                # from upstream relu clamping; those values are locally
                # constant, so the tie cannot break under perturbation.
                gaps = np.where((gaps == 0.0) & (top == 0.0), np.inf, gaps)
                if gaps.size:
                    margin = min(margin, float(np.min(gaps)))
    return margin
