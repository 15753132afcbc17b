"""Time the compiled conv/pool kernels against the NumPy fallback.

Runs each backend on the layer shapes the bundled forecasters actually use,
plus one larger shape to show scaling. Reports microseconds per call and the
compiled/python speedup, and cross-checks that both backends agree to
rounding on every shape.

Usage:
    python3 benchmarks/bench_kernels.py [--repeats 7] [--inner 50]
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

import numpy as np

from weekcast.nn import kernels_py

try:
    from weekcast.nn import _kernels
except ImportError:
    _kernels = None


@dataclass(frozen=True)
class ConvShape:
    label: str
    batch: int
    length: int
    channels: int
    filters: int
    kernel: int


SHAPES = (
    ConvShape("univariate conv", 32, 5, 1, 16, 3),
    ConvShape("multichannel conv-1", 32, 10, 4, 32, 3),
    ConvShape("multichannel conv-2", 32, 8, 32, 32, 3),
    ConvShape("multihead head conv", 32, 10, 1, 32, 3),
    ConvShape("large synthetic", 64, 128, 8, 32, 5),
)


def _bench(fn, repeats: int, inner: int) -> float:
    """Best-of-repeats mean microseconds per call."""
    fn()  # warm up
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for _ in range(inner):
            fn()
        best = min(best, (time.perf_counter() - start) / inner)
    return best * 1e6


def _conv_args(shape: ConvShape, rng):
    x = rng.normal(size=(shape.batch, shape.length, shape.channels))
    w = rng.normal(size=(shape.filters, shape.kernel, shape.channels))
    b = rng.normal(size=shape.filters)
    out_len = shape.length - shape.kernel + 1
    gy = rng.normal(size=(shape.batch, out_len, shape.filters))
    return x, w, b, gy


def _row(label: str, py_us: float, cy_us: float | None) -> str:
    if cy_us is None:
        return f"{label:<34} {py_us:>10.1f} {'-':>10} {'-':>8}"
    return f"{label:<34} {py_us:>10.1f} {cy_us:>10.1f} {py_us / cy_us:>7.1f}x"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=7, help="timing repeats (best kept)")
    parser.add_argument("--inner", type=int, default=50, help="calls per timed repeat")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    if _kernels is None:
        print("compiled extension not built; timing the NumPy fallback only\n")

    header = f"{'kernel / shape':<34} {'python us':>10} {'cython us':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))

    worst_gap = 0.0
    for shape in SHAPES:
        x, w, b, gy = _conv_args(shape, rng)

        py = _bench(lambda: kernels_py.conv1d_forward(x, w, b), args.repeats, args.inner)
        cy = None
        if _kernels is not None:
            cy = _bench(lambda: _kernels.conv1d_forward(x, w, b), args.repeats, args.inner)
            gap = float(np.max(np.abs(
                kernels_py.conv1d_forward(x, w, b) - _kernels.conv1d_forward(x, w, b)
            )))
            worst_gap = max(worst_gap, gap)
        print(_row(f"conv1d_forward  {shape.label}", py, cy))

        py = _bench(lambda: kernels_py.conv1d_backward(x, w, gy), args.repeats, args.inner)
        cy = None
        if _kernels is not None:
            cy = _bench(lambda: _kernels.conv1d_backward(x, w, gy), args.repeats, args.inner)
        print(_row(f"conv1d_backward {shape.label}", py, cy))

    pool_x = rng.normal(size=(64, 128, 32))
    _, idx = kernels_py.maxpool1d_forward(pool_x, 2)
    pool_gy = rng.normal(size=(64, 64, 32))

    py = _bench(lambda: kernels_py.maxpool1d_forward(pool_x, 2), args.repeats, args.inner)
    cy = None
    if _kernels is not None:
        cy = _bench(lambda: _kernels.maxpool1d_forward(pool_x, 2), args.repeats, args.inner)
    print(_row("maxpool1d_forward 64x128x32", py, cy))

    py = _bench(
        lambda: kernels_py.maxpool1d_backward(idx, pool_gy, 128, 2), args.repeats, args.inner
    )
    cy = None
    if _kernels is not None:
        cy = _bench(
            lambda: _kernels.maxpool1d_backward(idx, pool_gy, 128, 2), args.repeats, args.inner
        )
    print(_row("maxpool1d_backward 64x128x32", py, cy))

    if _kernels is not None:
        print(f"\nmax |python - cython| over conv outputs: {worst_gap:.3e}")


if __name__ == "__main__":
    main()
