"""Trainable layers: fully-connected, convolution, LSTM cell, dropout."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .tensor import (
    Tensor,
    add,
    conv2d,
    conv_transpose2d,
    matmul,
    mul,
    parameter,
    relu,
    sigmoid,
    slice_cols,
    tanh,
)


def _uniform_init(rng: np.random.Generator, shape, fan_in: int) -> np.ndarray:
    s = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-s, s, size=shape)


class Linear:
    """y = x @ w + b with an optional built-in activation."""

    def __init__(self, n_in: int, n_out: int, activation: str | None = None,
                 rng: np.random.Generator | None = None):
        rng = rng or np.random.default_rng(0)
        self.n_in, self.n_out = n_in, n_out
        if activation not in (None, "relu", "sigmoid", "tanh"):
            raise ValueError(f"unknown activation {activation!r}")
        self.activation = activation
        self.w = parameter(_uniform_init(rng, (n_in, n_out), n_in))
        self.b = parameter(np.zeros(n_out))

    def __call__(self, x: Tensor) -> Tensor:
        y = add(matmul(x, self.w), self.b)
        if self.activation == "relu":
            y = relu(y)
        elif self.activation == "sigmoid":
            y = sigmoid(y)
        elif self.activation == "tanh":
            y = tanh(y)
        return y

    def params(self) -> dict[str, Tensor]:
        return {"w": self.w, "b": self.b}


class Conv2d:
    """Strided 2-D cross-correlation with zero padding."""

    def __init__(self, c_in: int, c_out: int, kernel: int, stride: int = 1,
                 padding: int = 0, rng: np.random.Generator | None = None):
        rng = rng or np.random.default_rng(0)
        self.c_in, self.c_out = c_in, c_out
        self.kernel, self.stride, self.padding = kernel, stride, padding
        fan_in = c_in * kernel * kernel
        self.w = parameter(_uniform_init(rng, (c_out, c_in, kernel, kernel), fan_in))
        self.b = parameter(np.zeros(c_out))

    def __call__(self, x: Tensor) -> Tensor:
        return conv2d(x, self.w, self.b, stride=self.stride, padding=self.padding)

    def output_hw(self, h: int, w: int) -> tuple[int, int]:
        k, s, p = self.kernel, self.stride, self.padding
        return (h + 2 * p - k) // s + 1, (w + 2 * p - k) // s + 1

    def params(self) -> dict[str, Tensor]:
        return {"w": self.w, "b": self.b}


class TiedConvTranspose2d:
    """Transposed convolution reusing a Conv2d's kernel; only the bias is owned."""

    def __init__(self, tied: Conv2d, output_hw: tuple[int, int]):
        self.tied = tied
        self.output_hw = output_hw
        self.b = parameter(np.zeros(tied.c_in))

    def __call__(self, x: Tensor) -> Tensor:
        return conv_transpose2d(x, self.tied.w, self.b, stride=self.tied.stride,
                                padding=self.tied.padding, output_hw=self.output_hw)

    def params(self) -> dict[str, Tensor]:
        return {"b": self.b}


class LstmState(NamedTuple):
    h: Tensor
    c: Tensor


class LstmCell:
    """Standard LSTM cell; gate order i, f, g, o. Forget-gate bias starts at 1."""

    def __init__(self, n_in: int, n_hidden: int, rng: np.random.Generator | None = None):
        rng = rng or np.random.default_rng(0)
        self.n_in, self.n_hidden = n_in, n_hidden
        self.wx = parameter(_uniform_init(rng, (n_in, 4 * n_hidden), n_in))
        self.wh = parameter(_uniform_init(rng, (n_hidden, 4 * n_hidden), n_hidden))
        bias = np.zeros(4 * n_hidden)
        bias[n_hidden:2 * n_hidden] = 1.0
        self.b = parameter(bias)

    def zero_state(self, batch: int = 1) -> LstmState:
        z = np.zeros((batch, self.n_hidden))
        return LstmState(Tensor(z.copy()), Tensor(z.copy()))

    def __call__(self, x: Tensor, state: LstmState) -> tuple[Tensor, LstmState]:
        if x.data.shape[1] != self.n_in:
            raise ValueError(f"lstm input width {x.data.shape[1]}, expected {self.n_in}")
        n = self.n_hidden
        gates = add(add(matmul(x, self.wx), matmul(state.h, self.wh)), self.b)
        i = sigmoid(slice_cols(gates, 0, n))
        f = sigmoid(slice_cols(gates, n, 2 * n))
        g = tanh(slice_cols(gates, 2 * n, 3 * n))
        o = sigmoid(slice_cols(gates, 3 * n, 4 * n))
        c_new = add(mul(f, state.c), mul(i, g))
        h_new = mul(o, tanh(c_new))
        return h_new, LstmState(h_new, c_new)

    def params(self) -> dict[str, Tensor]:
        return {"wx": self.wx, "wh": self.wh, "b": self.b}


class Dropout:
    """Inverted dropout; identity outside training mode."""

    def __init__(self, p: float):
        if not 0.0 <= p < 1.0:
            raise ValueError("dropout rate must be in [0, 1)")
        self.p = p

    def __call__(self, x: Tensor, training: bool = False,
                 rng: np.random.Generator | None = None) -> Tensor:
        if not training or self.p == 0.0:
            return x
        if rng is None:
            raise ValueError("training-mode dropout needs an rng")
        mask = (rng.random(x.data.shape) >= self.p) / (1.0 - self.p)
        return mul(x, Tensor(mask))
