"""Minimal feed-forward/convolutional network engine with exact backprop and Adam.

Hot conv/pool kernels run through a compiled extension when built; a pure
NumPy fallback is selected automatically (see weekcast.nn.kernels.BACKEND).
"""

from .kernels import BACKEND
from .network import (
    LayerSpec,
    NetworkSpec,
    ShapeError,
    conv1d,
    dense,
    flat_shape,
    flatten,
    forward,
    init_params,
    maxpool1d,
    relu,
    seq_shape,
)
from .training import (
    AdamState,
    ArrayDataset,
    TrainingConfig,
    TrainingDivergence,
    adam_init,
    adam_update,
    batch_gradients,
    fit,
    log_loss,
    mse_loss,
    predict,
    predict_single,
)

__all__ = [
    "BACKEND",
    "AdamState",
    "ArrayDataset",
    "LayerSpec",
    "NetworkSpec",
    "ShapeError",
    "TrainingConfig",
    "TrainingDivergence",
    "adam_init",
    "adam_update",
    "batch_gradients",
    "conv1d",
    "dense",
    "fit",
    "flat_shape",
    "flatten",
    "forward",
    "init_params",
    "log_loss",
    "maxpool1d",
    "mse_loss",
    "predict",
    "predict_single",
    "relu",
    "seq_shape",
]
