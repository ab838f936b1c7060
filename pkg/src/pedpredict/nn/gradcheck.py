"""Finite-difference verification of recorded gradients."""

from __future__ import annotations

import numpy as np

from .tensor import Tensor


def gradient_check(fn, params: list[Tensor], eps: float = 1e-5,
                   max_coords_per_param: int | None = None,
                   rng: np.random.Generator | None = None) -> float:
    """Max relative error between analytic and central-difference gradients.

    `fn` must be a deterministic closure returning a scalar Tensor computed
    from `params`. For large tensors a seeded random subset of coordinates is
    checked when `max_coords_per_param` is set.
    """
    rng = rng or np.random.default_rng(0)
    for p in params:
        p.grad = None
    out = fn()
    out.backward()
    analytic = [None if p.grad is None else p.grad.copy() for p in params]

    worst = 0.0
    for p, a in zip(params, analytic):
        if a is None:
            a = np.zeros_like(p.data)
        flat = p.data.reshape(-1)
        n = flat.size
        if max_coords_per_param is not None and n > max_coords_per_param:
            coords = rng.choice(n, size=max_coords_per_param, replace=False)
        else:
            coords = range(n)
        a_flat = a.reshape(-1)
        for k in coords:
            orig = flat[k]
            flat[k] = orig + eps
            up = fn().item()
            flat[k] = orig - eps
            down = fn().item()
            flat[k] = orig
            numeric = (up - down) / (2.0 * eps)
            err = abs(a_flat[k] - numeric) / max(1e-8, abs(a_flat[k]) + abs(numeric))
            worst = max(worst, err)
    return worst
