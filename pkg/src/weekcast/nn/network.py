"""Layer graph description, shape inference, parameter init, forward and backward passes.

A network is one or more head chains (feature extraction over sequence or
flat inputs) joined by concatenation into a tail chain that must end in a
linear dense layer. All arrays are float64; batch is always the leading axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels

PARAM_KINDS = ("conv1d", "dense")


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    filters: int = 0
    kernel_size: int = 0
    pool_size: int = 0
    units: int = 0

    def __post_init__(self):
        if self.kind == "conv1d" and (self.filters < 1 or self.kernel_size < 1):
            raise ShapeError("conv1d needs positive filters and kernel_size")
        if self.kind == "maxpool1d" and self.pool_size < 1:
            raise ShapeError("maxpool1d needs positive pool_size")
        if self.kind == "dense" and self.units < 1:
            raise ShapeError("dense needs positive units")


def conv1d(filters: int, kernel_size: int) -> LayerSpec:
    return LayerSpec("conv1d", filters=filters, kernel_size=kernel_size)


def maxpool1d(pool_size: int) -> LayerSpec:
    return LayerSpec("maxpool1d", pool_size=pool_size)


def dense(units: int) -> LayerSpec:
    return LayerSpec("dense", units=units)


def relu() -> LayerSpec:
    return LayerSpec("relu")


def flatten() -> LayerSpec:
    return LayerSpec("flatten")


def seq_shape(length: int, channels: int) -> tuple:
    return ("seq", length, channels)


def flat_shape(width: int) -> tuple:
    return ("flat", width)


def _infer_layer(shape: tuple, layer: LayerSpec) -> tuple:
    kind = layer.kind
    if kind == "conv1d":
        if shape[0] != "seq":
            raise ShapeError("conv1d requires a sequence input")
        _, length, _channels = shape
        if layer.kernel_size > length:
            raise ShapeError(
                f"kernel_size {layer.kernel_size} exceeds sequence length {length}"
            )
        return ("seq", length - layer.kernel_size + 1, layer.filters)
    if kind == "maxpool1d":
        if shape[0] != "seq":
            raise ShapeError("maxpool1d requires a sequence input")
        _, length, channels = shape
        out_len = length // layer.pool_size
        if out_len < 1:
            raise ShapeError(f"pool_size {layer.pool_size} collapses length {length} to zero")
        return ("seq", out_len, channels)
    if kind == "relu":
        return shape
    if kind == "flatten":
        if shape[0] == "flat":
            return shape
        _, length, channels = shape
        return ("flat", length * channels)
    if kind == "dense":
        if shape[0] != "flat":
            raise ShapeError("dense requires a flat input; add a flatten layer first")
        return ("flat", layer.units)
    raise ShapeError(f"unknown layer kind {kind!r}")


@dataclass(frozen=True)
class NetworkSpec:
    """Head chains merged (by concatenation when there are several) into a tail chain."""

    input_shapes: tuple
    heads: tuple
    tail: tuple

    def __post_init__(self):
        if len(self.input_shapes) != len(self.heads):
            raise ShapeError("one input shape per head required")
        if not self.tail or self.tail[-1].kind != "dense":
            raise ShapeError("tail must end with a linear dense output layer")
        self.infer_shapes()  # fail fast on any mismatch

    @property
    def n_heads(self) -> int:
        return len(self.heads)

    @property
    def n_outputs(self) -> int:
        return self.tail[-1].units

    def infer_shapes(self) -> dict:
        """Output shape per layer id; raises ShapeError on inconsistency."""
        shapes = {}
        head_outputs = []
        for h, (in_shape, chain) in enumerate(zip(self.input_shapes, self.heads)):
            shape = in_shape
            for i, layer in enumerate(chain):
                shape = _infer_layer(shape, layer)
                shapes[f"head{h}/L{i}/{layer.kind}"] = shape
            head_outputs.append(shape)
        if self.n_heads > 1:
            for shape in head_outputs:
                if shape[0] != "flat":
                    raise ShapeError("every head must be flattened before concatenation")
            shape = ("flat", sum(s[1] for s in head_outputs))
            shapes["concat"] = shape
        else:
            shape = head_outputs[0]
        for i, layer in enumerate(self.tail):
            shape = _infer_layer(shape, layer)
            shapes[f"tail/L{i}/{layer.kind}"] = shape
        return shapes

    def layer_items(self):
        """(layer_id, layer, input_shape) triples in execution order."""
        for h, (in_shape, chain) in enumerate(zip(self.input_shapes, self.heads)):
            shape = in_shape
            for i, layer in enumerate(chain):
                yield f"head{h}/L{i}/{layer.kind}", layer, shape
                shape = _infer_layer(shape, layer)
        shapes = self.infer_shapes()
        if self.n_heads > 1:
            shape = shapes["concat"]
        else:
            last = self.heads[0]
            shape = (
                shapes[f"head0/L{len(last) - 1}/{last[-1].kind}"]
                if last
                else self.input_shapes[0]
            )
        for i, layer in enumerate(self.tail):
            yield f"tail/L{i}/{layer.kind}", layer, shape
            shape = _infer_layer(shape, layer)


def _glorot_bound(fan_in: int, fan_out: int) -> float:
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def init_params(spec: NetworkSpec, seed: int) -> dict:
    """Glorot-uniform weights, zero biases; deterministic per seed."""
    rng = np.random.default_rng(seed)
    params: dict[str, dict[str, np.ndarray]] = {}
    for lid, layer, in_shape in spec.layer_items():
        if layer.kind == "conv1d":
            channels = in_shape[2]
            bound = _glorot_bound(layer.kernel_size * channels, layer.kernel_size * layer.filters)
            w = rng.uniform(-bound, bound, size=(layer.filters, layer.kernel_size, channels))
            b = np.zeros(layer.filters)
        elif layer.kind == "dense":
            width = in_shape[1]
            bound = _glorot_bound(width, layer.units)
            w = rng.uniform(-bound, bound, size=(layer.units, width))
            b = np.zeros(layer.units)
        else:
            continue
        params[lid] = {"w": w, "b": b}
    return params


def _as_batch(x: np.ndarray, in_shape: tuple) -> np.ndarray:
    x = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
    expected_ndim = 3 if in_shape[0] == "seq" else 2
    if x.ndim != expected_ndim:
        raise ShapeError(f"input must have {expected_ndim} dims (batch leading), got {x.ndim}")
    if tuple(x.shape[1:]) != tuple(in_shape[1:]):
        raise ShapeError(f"input shape {x.shape[1:]} does not match spec {in_shape[1:]}")
    return x


def _forward_chain(chain, prefix, params, x, cache):
    for i, layer in enumerate(chain):
        lid = f"{prefix}/L{i}/{layer.kind}"
        kind = layer.kind
        if kind == "conv1d":
            p = params[lid]
            y = kernels.conv1d_forward(x, p["w"], p["b"])
            cache.append((lid, kind, x, layer))
        elif kind == "maxpool1d":
            y, idx = kernels.maxpool1d_forward(x, layer.pool_size)
            cache.append((lid, kind, (x, idx), layer))
        elif kind == "relu":
            y = np.maximum(x, 0.0)
            cache.append((lid, kind, x, layer))
        elif kind == "flatten":
            y = x.reshape(x.shape[0], -1)
            cache.append((lid, kind, x.shape, layer))
        elif kind == "dense":
            p = params[lid]
            y = x @ p["w"].T + p["b"]
            cache.append((lid, kind, x, layer))
        else:
            raise ShapeError(f"unknown layer kind {kind!r}")
        x = np.ascontiguousarray(y)
    return x


def forward(spec: NetworkSpec, params: dict, inputs) -> tuple[np.ndarray, dict]:
    """Run the network on a batch; returns (output [batch, n_outputs], cache)."""
    if len(inputs) != spec.n_heads:
        raise ShapeError(f"expected {spec.n_heads} input heads, got {len(inputs)}")
    cache: dict = {"heads": [], "tail": [], "widths": None}
    head_outputs = []
    for h, (chain, in_shape) in enumerate(zip(spec.heads, spec.input_shapes)):
        x = _as_batch(inputs[h], in_shape)
        chain_cache: list = []
        y = _forward_chain(chain, f"head{h}", params, x, chain_cache)
        cache["heads"].append(chain_cache)
        head_outputs.append(y)
    if spec.n_heads > 1:
        cache["widths"] = [y.shape[1] for y in head_outputs]
        x = np.concatenate(head_outputs, axis=1)
    else:
        x = head_outputs[0]
    out = _forward_chain(spec.tail, "tail", params, x, cache["tail"])
    return out, cache


def _backward_chain(chain_cache, params, gy, grads):
    for lid, kind, saved, layer in reversed(chain_cache):
        if kind == "conv1d":
            gy = np.ascontiguousarray(gy)
            gx, gw, gb = kernels.conv1d_backward(saved, params[lid]["w"], gy)
            grads[lid] = {"w": gw, "b": gb}
            gy = gx
        elif kind == "maxpool1d":
            x, idx = saved
            gy = kernels.maxpool1d_backward(idx, np.ascontiguousarray(gy), x.shape[1], layer.pool_size)
        elif kind == "relu":
            gy = gy * (saved > 0.0)  # subgradient at 0 is 0
        elif kind == "flatten":
            gy = gy.reshape(saved)
        elif kind == "dense":
            w = params[lid]["w"]
            grads[lid] = {"w": gy.T @ saved, "b": gy.sum(axis=0)}
            gy = gy @ w
    return gy


def backward(spec: NetworkSpec, params: dict, cache: dict, grad_output: np.ndarray) -> dict:
    """Analytic gradients of every parameter given dLoss/dOutput."""
    grads: dict[str, dict[str, np.ndarray]] = {}
    gy = _backward_chain(cache["tail"], params, grad_output, grads)
    if spec.n_heads > 1:
        offsets = np.cumsum([0] + cache["widths"])
        head_grads = [gy[:, offsets[i] : offsets[i + 1]] for i in range(spec.n_heads)]
    else:
        head_grads = [gy]
    for chain_cache, g in zip(cache["heads"], head_grads):
        _backward_chain(chain_cache, params, g, grads)
    return grads


def zero_params_like(params: dict) -> dict:
    return {lid: {k: np.zeros_like(v) for k, v in p.items()} for lid, p in params.items()}


def clone_params(params: dict) -> dict:
    return {lid: {k: v.copy() for k, v in p.items()} for lid, p in params.items()}


def param_count(params: dict) -> int:
    return sum(v.size for p in params.values() for v in p.values())
