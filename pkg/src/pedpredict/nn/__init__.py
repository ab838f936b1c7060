"""Minimal reverse-mode autodiff and the layers needed by the motion models."""

from .tensor import (
    Tensor,
    parameter,
    add,
    concat,
    conv2d,
    conv_transpose2d,
    matmul,
    mean,
    mul,
    relu,
    reshape,
    rows_l2norm,
    sigmoid,
    slice_cols,
    sub,
    tensor_sum,
    tanh,
)
from .layers import Conv2d, Dropout, Linear, LstmCell, LstmState, TiedConvTranspose2d
from .optim import Adam, clip_global_norm
from .gradcheck import gradient_check

__all__ = [
    "Tensor", "parameter", "add", "concat", "conv2d", "conv_transpose2d",
    "matmul", "mean", "mul", "relu", "reshape", "rows_l2norm", "sigmoid",
    "slice_cols", "sub", "tensor_sum", "tanh",
    "Conv2d", "Dropout", "Linear", "LstmCell", "LstmState", "TiedConvTranspose2d",
    "Adam", "clip_global_norm", "gradient_check",
]
