"""Tape-based reverse-mode autodiff on float64 numpy arrays.

Every operation records its parents and a closure that maps the upstream
gradient to parent gradients; `Tensor.backward` walks the tape in reverse
topological order. Only graphs that can reach a parameter are recorded, so
pure-data computations stay cheap.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


class Tensor:
    """N-d array node of the computation graph."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward_fn")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward_fn = None

    # -- basic introspection -------------------------------------------------
    @property
    def shape(self):
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, grad={self.requires_grad})"

    def item(self) -> float:
        return float(self.data)

    def detach(self) -> "Tensor":
        """A new graph leaf sharing this tensor's values."""
        return Tensor(self.data)

    def zero_grad(self):
        self.grad = None

    # -- autodiff ------------------------------------------------------------
    def backward(self, grad=None):
        """Accumulate gradients of this (scalar unless `grad` given) node."""
        if grad is None:
            if self.data.size != 1:
                raise ValueError("backward() without a gradient requires a scalar")
            grad = np.ones_like(self.data)
        order: list[Tensor] = []
        seen = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen:
                    stack.append((p, False))
        grads: dict[int, np.ndarray] = {id(self): np.asarray(grad, dtype=np.float64)}
        for node in reversed(order):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node.requires_grad and node._backward_fn is None:
                # graph leaf (parameter or input under test)
                node.grad = g if node.grad is None else node.grad + g
            if node._backward_fn is None:
                continue
            for parent, pg in zip(node._parents, node._backward_fn(g)):
                if pg is None:
                    continue
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + pg
                else:
                    grads[key] = pg

    # -- operator sugar --------------------------------------------------
    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __matmul__(self, other):
        return matmul(self, other)

    def __neg__(self):
        return mul(self, -1.0)


def parameter(data) -> Tensor:
    """A trainable leaf tensor."""
    return Tensor(np.array(data, dtype=np.float64), requires_grad=True)


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _node(data, parents, backward_fn) -> Tensor:
    """Create an op output; records the tape only if a parent needs grads."""
    out = Tensor(data)
    if any(p.requires_grad or p._backward_fn is not None for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward_fn = backward_fn
    return out


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """Sum a gradient back down to the shape it was broadcast from."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


# -- arithmetic ---------------------------------------------------------------

def add(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    return _node(a.data + b.data, (a, b),
                 lambda g: (_unbroadcast(g, a.data.shape), _unbroadcast(g, b.data.shape)))


def sub(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    return _node(a.data - b.data, (a, b),
                 lambda g: (_unbroadcast(g, a.data.shape), _unbroadcast(-g, b.data.shape)))


def mul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    return _node(a.data * b.data, (a, b),
                 lambda g: (_unbroadcast(g * b.data, a.data.shape),
                            _unbroadcast(g * a.data, b.data.shape)))


def matmul(a, b) -> Tensor:
    """2-D matrix product (batch rows x features)."""
    a, b = _as_tensor(a), _as_tensor(b)
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ValueError("matmul expects 2-D operands")
    if a.data.shape[1] != b.data.shape[0]:
        raise ValueError(f"matmul shape mismatch: {a.data.shape} @ {b.data.shape}")
    return _node(a.data @ b.data, (a, b),
                 lambda g: (g @ b.data.T, a.data.T @ g))


def tensor_sum(a, axis=None, keepdims: bool = False) -> Tensor:
    a = _as_tensor(a)

    def backward(g):
        if axis is None:
            return (np.broadcast_to(g, a.data.shape).copy(),)
        gg = g if keepdims else np.expand_dims(g, axis)
        return (np.broadcast_to(gg, a.data.shape).copy(),)

    return _node(a.data.sum(axis=axis, keepdims=keepdims), (a,), backward)


def mean(a, axis=None) -> Tensor:
    a = _as_tensor(a)
    n = a.data.size if axis is None else a.data.shape[axis]
    return mul(tensor_sum(a, axis=axis), 1.0 / n)


# -- activations --------------------------------------------------------------

def relu(a) -> Tensor:
    a = _as_tensor(a)
    mask = a.data > 0
    return _node(np.where(mask, a.data, 0.0), (a,), lambda g: (g * mask,))


def sigmoid(a) -> Tensor:
    a = _as_tensor(a)
    y = 1.0 / (1.0 + np.exp(-a.data))
    return _node(y, (a,), lambda g: (g * y * (1.0 - y),))


def tanh(a) -> Tensor:
    a = _as_tensor(a)
    y = np.tanh(a.data)
    return _node(y, (a,), lambda g: (g * (1.0 - y * y),))


# -- shape ops ----------------------------------------------------------------

def reshape(a, shape) -> Tensor:
    a = _as_tensor(a)
    return _node(a.data.reshape(shape), (a,), lambda g: (g.reshape(a.data.shape),))


def concat(tensors, axis: int = 1) -> Tensor:
    tensors = [_as_tensor(t) for t in tensors]
    sizes = [t.data.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]
    return _node(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors),
                 lambda g: tuple(np.split(g, splits, axis=axis)))


def slice_cols(a, start: int, stop: int) -> Tensor:
    """Columns [start, stop) of a 2-D tensor."""
    a = _as_tensor(a)

    def backward(g):
        out = np.zeros_like(a.data)
        out[:, start:stop] = g
        return (out,)

    return _node(a.data[:, start:stop], (a,), backward)


def rows_l2norm(a, grad_floor: float = 1e-12) -> Tensor:
    """Euclidean norm of each row of a 2-D tensor; value is exact at zero."""
    a = _as_tensor(a)
    norms = np.sqrt((a.data * a.data).sum(axis=1))

    def backward(g):
        denom = np.maximum(norms, grad_floor)
        return ((g / denom)[:, None] * a.data,)

    return _node(norms, (a,), backward)


# -- convolution --------------------------------------------------------------

@lru_cache(maxsize=64)
def _patch_indices(channels, padded_h, padded_w, kh, kw, stride, out_h, out_w):
    """Advanced-index arrays mapping a padded image to its patch matrix."""
    c_idx = np.repeat(np.arange(channels), kh * kw)
    ky, kx = np.meshgrid(np.arange(kh), np.arange(kw), indexing="ij")
    ky, kx = np.tile(ky.ravel(), channels), np.tile(kx.ravel(), channels)
    oy, ox = np.meshgrid(np.arange(out_h), np.arange(out_w), indexing="ij")
    rows = ky[:, None] + (oy.ravel() * stride)[None, :]
    cols = kx[:, None] + (ox.ravel() * stride)[None, :]
    return c_idx[:, None], rows, cols


def _conv_geometry(h, w, kh, kw, stride, padding):
    out_h = (h + 2 * padding - kh) // stride + 1
    out_w = (w + 2 * padding - kw) // stride + 1
    if out_h <= 0 or out_w <= 0:
        raise ValueError("convolution output would be empty")
    return out_h, out_w


def _im2col(x_padded: np.ndarray, kh, kw, stride, out_h, out_w) -> np.ndarray:
    b, c, ph, pw = x_padded.shape
    ci, rows, cols = _patch_indices(c, ph, pw, kh, kw, stride, out_h, out_w)
    return x_padded[:, ci, rows, cols]


def _col2im(cols: np.ndarray, b, c, ph, pw, kh, kw, stride, out_h, out_w) -> np.ndarray:
    ci, rows, cols_idx = _patch_indices(c, ph, pw, kh, kw, stride, out_h, out_w)
    out = np.zeros((b, c, ph, pw), dtype=np.float64)
    np.add.at(out, (np.arange(b)[:, None, None], ci[None], rows[None], cols_idx[None]), cols)
    return out


def _pad(x, p):
    if p == 0:
        return x
    return np.pad(x, ((0, 0), (0, 0), (p, p), (p, p)))


def _unpad(x, p):
    if p == 0:
        return x
    return x[:, :, p:-p, p:-p]


def conv2d(x, w, b=None, stride: int = 1, padding: int = 0) -> Tensor:
    """Cross-correlation of (B, C, H, W) input with (F, C, kh, kw) kernels."""
    x, w = _as_tensor(x), _as_tensor(w)
    bs, c, h, ww = x.data.shape
    f, cw, kh, kw = w.data.shape
    if cw != c:
        raise ValueError(f"conv2d channel mismatch: input {c}, kernel {cw}")
    out_h, out_w = _conv_geometry(h, ww, kh, kw, stride, padding)
    xp = _pad(x.data, padding)
    cols = _im2col(xp, kh, kw, stride, out_h, out_w)  # (B, C*kh*kw, L)
    w_mat = w.data.reshape(f, -1)
    y = np.einsum("fk,bkl->bfl", w_mat, cols).reshape(bs, f, out_h, out_w)
    parents = [x, w]
    if b is not None:
        b = _as_tensor(b)
        y = y + b.data[None, :, None, None]
        parents.append(b)

    def backward(g):
        g_mat = g.reshape(bs, f, -1)
        dw = np.einsum("bfl,bkl->fk", g_mat, cols).reshape(w.data.shape)
        dcols = np.einsum("fk,bfl->bkl", w_mat, g_mat)
        dx = _unpad(_col2im(dcols, bs, c, xp.shape[2], xp.shape[3], kh, kw,
                            stride, out_h, out_w), padding)
        grads = [dx, dw]
        if len(parents) == 3:
            grads.append(g.sum(axis=(0, 2, 3)))
        return tuple(grads)

    return _node(y, tuple(parents), backward)


def conv_transpose2d(x, w, b=None, stride: int = 1, padding: int = 0,
                     output_hw: tuple[int, int] | None = None) -> Tensor:
    """Adjoint of conv2d: maps (B, F, h, w) back to (B, C, H, W).

    The kernel layout matches conv2d, so a forward convolution and its tied
    transposed convolution can share one weight tensor. `output_hw` resolves
    the output-size ambiguity of strided convolutions.
    """
    x, w = _as_tensor(x), _as_tensor(w)
    bs, f, h, ww = x.data.shape
    fw, c, kh, kw = w.data.shape
    if fw != f:
        raise ValueError(f"conv_transpose2d channel mismatch: input {f}, kernel {fw}")
    if output_hw is None:
        output_hw = ((h - 1) * stride + kh - 2 * padding, (ww - 1) * stride + kw - 2 * padding)
    out_h, out_w = output_hw
    if _conv_geometry(out_h, out_w, kh, kw, stride, padding) != (h, ww):
        raise ValueError("output_hw inconsistent with stride/padding/kernel")
    ph, pw = out_h + 2 * padding, out_w + 2 * padding
    w_mat = w.data.reshape(f, -1)
    x_mat = x.data.reshape(bs, f, -1)
    y_cols = np.einsum("fk,bfl->bkl", w_mat, x_mat)
    y = _unpad(_col2im(y_cols, bs, c, ph, pw, kh, kw, stride, h, ww), padding)
    parents = [x, w]
    if b is not None:
        b = _as_tensor(b)
        y = y + b.data[None, :, None, None]
        parents.append(b)

    def backward(g):
        g_cols = _im2col(_pad(g[:, :, :out_h, :out_w], padding), kh, kw, stride, h, ww)
        dx = np.einsum("fk,bkl->bfl", w_mat, g_cols).reshape(x.data.shape)
        dw = np.einsum("bfl,bkl->fk", x_mat, g_cols).reshape(w.data.shape)
        grads = [dx, dw]
        if len(parents) == 3:
            grads.append(g.sum(axis=(0, 2, 3)))
        return tuple(grads)

    return _node(y, tuple(parents), backward)
