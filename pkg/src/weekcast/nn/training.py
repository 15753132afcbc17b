"""Losses, the Adam optimizer, and the mini-batch training loop."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .network import NetworkSpec, backward, forward


class TrainingDivergence(RuntimeError):
    """Raised when the loss or gradients stop being finite."""


@dataclass(frozen=True)
class ArrayDataset:
    """Plain (inputs, targets) pair accepted by fit()."""

    inputs: tuple
    targets: np.ndarray

    def __len__(self) -> int:
        return self.targets.shape[0]


@dataclass(frozen=True)
class TrainingConfig:
    epochs: int
    batch_size: int
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def mse_loss(pred: np.ndarray, target: np.ndarray) -> float:
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {target.shape}")
    return float(np.mean((pred - target) ** 2))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def log_loss(logits: np.ndarray, target: np.ndarray) -> float:
    """Mean binary cross-entropy of sigmoid(logits) against 0/1 targets."""
    logits = np.asarray(logits, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if logits.shape != target.shape:
        raise ValueError(f"shape mismatch: {logits.shape} vs {target.shape}")
    # -log sigmoid(z) = softplus(-z), computed without overflow
    softplus = np.logaddexp(0.0, logits)
    return float(np.mean(softplus - target * logits))


def loss_and_output_grad(pred: np.ndarray, target: np.ndarray, loss: str):
    if loss == "mse":
        return mse_loss(pred, target), 2.0 * (pred - target) / pred.size
    if loss == "logloss":
        return log_loss(pred, target), (_sigmoid(pred) - target) / pred.size
    raise ValueError(f"unknown loss {loss!r}")


def batch_gradients(spec: NetworkSpec, params: dict, inputs, targets, loss: str = "mse"):
    """(loss value, analytic parameter gradients) for one batch."""
    pred, cache = forward(spec, params, inputs)
    if not np.all(np.isfinite(pred)):
        raise TrainingDivergence("non-finite network output")
    value, gy = loss_and_output_grad(pred, np.asarray(targets, dtype=np.float64), loss)
    grads = backward(spec, params, cache, gy)
    return value, grads


@dataclass(frozen=True)
class AdamState:
    m: dict
    v: dict
    t: int = 0
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def adam_init(params: dict, lr: float = 0.001, beta1: float = 0.9,
              beta2: float = 0.999, eps: float = 1e-8) -> AdamState:
    zeros = lambda: {lid: {k: np.zeros_like(a) for k, a in p.items()} for lid, p in params.items()}
    return AdamState(m=zeros(), v=zeros(), t=0, lr=lr, beta1=beta1, beta2=beta2, eps=eps)


def adam_update(params: dict, grads: dict, state: AdamState) -> tuple[dict, AdamState]:
    """One bias-corrected Adam step; returns fresh params and state."""
    t = state.t + 1
    c1 = 1.0 - state.beta1**t
    c2 = 1.0 - state.beta2**t
    new_params: dict = {}
    new_m: dict = {}
    new_v: dict = {}
    for lid, p in params.items():
        new_params[lid] = {}
        new_m[lid] = {}
        new_v[lid] = {}
        for k, value in p.items():
            g = grads[lid][k]
            if not np.all(np.isfinite(g)):
                raise TrainingDivergence(f"non-finite gradient for {lid}/{k}")
            m = state.beta1 * state.m[lid][k] + (1.0 - state.beta1) * g
            v = state.beta2 * state.v[lid][k] + (1.0 - state.beta2) * g * g
            new_m[lid][k] = m
            new_v[lid][k] = v
            step = state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)
            new_params[lid][k] = value - step
    return new_params, replace(state, m=new_m, v=new_v, t=t)


def fit(spec: NetworkSpec, params: dict, dataset, config: TrainingConfig,
        loss: str = "mse", lr: float = 0.001) -> tuple[dict, list[float]]:
    """Mini-batch Adam training; deterministic for a fixed config seed.

    Returns (trained params, per-epoch mean training loss). The last partial
    batch of each epoch is kept.
    """
    inputs = [np.asarray(x, dtype=np.float64) for x in dataset.inputs]
    targets = np.asarray(dataset.targets, dtype=np.float64)
    n = targets.shape[0]
    if n == 0:
        raise ValueError("dataset is empty")
    state = adam_init(params, lr=lr)
    rng = np.random.default_rng(config.seed)
    trace: list[float] = []
    for epoch in range(config.epochs):
        order = rng.permutation(n) if config.shuffle else np.arange(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            sel = order[start : start + config.batch_size]
            batch_inputs = [x[sel] for x in inputs]
            try:
                value, grads = batch_gradients(spec, params, batch_inputs, targets[sel], loss)
            except TrainingDivergence as exc:
                raise TrainingDivergence(
                    f"epoch {epoch}, batch at sample {start}: {exc}"
                ) from None
            if not np.isfinite(value):
                raise TrainingDivergence(f"epoch {epoch}, batch at sample {start}: non-finite loss")
            params, state = adam_update(params, grads, state)
            total += value * len(sel)
        trace.append(total / n)
    return params, trace


def predict(spec: NetworkSpec, params: dict, inputs) -> np.ndarray:
    """Deterministic forward pass over a batch; linear (unbounded) outputs."""
    out, _ = forward(spec, params, inputs)
    return out


def predict_single(spec: NetworkSpec, params: dict, inputs) -> np.ndarray:
    """Forward one sample given per-head arrays without the batch axis."""
    batched = [np.asarray(x, dtype=np.float64)[None, ...] for x in inputs]
    return predict(spec, params, batched)[0]
