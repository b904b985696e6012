"""Parameterized layers on top of the autodiff engine."""

from __future__ import annotations

import numpy as np

from .autodiff import Tensor, conv2d, reshape, sqrt

DEFAULT_GROUPS = 8


class Module:
    """Base: recursive parameter discovery by attribute walk."""

    def parameters(self) -> dict[str, Tensor]:
        out: dict[str, Tensor] = {}
        for name, value in vars(self).items():
            if isinstance(value, Tensor):
                out[name] = value
            elif isinstance(value, Module):
                for sub, t in value.parameters().items():
                    out[f"{name}.{sub}"] = t
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        for sub, t in item.parameters().items():
                            out[f"{name}.{i}.{sub}"] = t
        return out

    def zero_grad(self):
        for t in self.parameters().values():
            t.zero_grad()

    def freeze(self):
        for t in self.parameters().values():
            t.requires_grad = False

    def load_state(self, state: dict, prefix: str = ""):
        for name, t in self.parameters().items():
            key = prefix + name
            if key not in state:
                raise KeyError(f"checkpoint missing parameter {key}")
            arr = np.asarray(state[key])
            if arr.shape != t.data.shape:
                raise ValueError(f"shape mismatch for {key}: {arr.shape} vs {t.data.shape}")
            t.data = arr.astype(t.data.dtype)


class Conv2d(Module):
    def __init__(self, c_in: int, c_out: int, rng: np.random.Generator, k: int = 3,
                 stride: int = 1, padding: int | None = None, zero_init: bool = False,
                 dtype=np.float32):
        scale = np.sqrt(2.0 / (c_in * k * k))
        w = np.zeros((c_out, c_in, k, k)) if zero_init else rng.normal(0.0, scale, (c_out, c_in, k, k))
        self.w = Tensor(w.astype(dtype), requires_grad=True)
        self.b = Tensor(np.zeros(c_out, dtype=dtype), requires_grad=True)
        self.stride = stride
        self.padding = (k - 1) // 2 if padding is None else padding

    def __call__(self, x: Tensor) -> Tensor:
        y = conv2d(x, self.w, stride=self.stride, padding=self.padding)
        return y + reshape(self.b, (1, -1, 1, 1))


class Linear(Module):
    def __init__(self, d_in: int, d_out: int, rng: np.random.Generator,
                 zero_init: bool = False, dtype=np.float32):
        scale = np.sqrt(1.0 / d_in)
        w = np.zeros((d_in, d_out)) if zero_init else rng.normal(0.0, scale, (d_in, d_out))
        self.w = Tensor(w.astype(dtype), requires_grad=True)
        self.b = Tensor(np.zeros(d_out, dtype=dtype), requires_grad=True)

    def __call__(self, x: Tensor) -> Tensor:
        return x @ self.w + self.b


class GroupNorm(Module):
    def __init__(self, channels: int, groups: int = DEFAULT_GROUPS, eps: float = 1e-5,
                 dtype=np.float32):
        g = min(groups, channels)
        while channels % g:
            g -= 1
        self.groups = g
        self.eps = eps
        self.gamma = Tensor(np.ones((1, channels, 1, 1), dtype=dtype), requires_grad=True)
        self.beta = Tensor(np.zeros((1, channels, 1, 1), dtype=dtype), requires_grad=True)

    def __call__(self, x: Tensor) -> Tensor:
        b, c, h, w = x.shape
        xr = reshape(x, (b, self.groups, (c // self.groups) * h * w))
        mu = xr.mean(axis=2, keepdims=True)
        cent = xr - mu
        var = (cent**2).mean(axis=2, keepdims=True)
        xn = cent / sqrt(var + self.eps)
        return reshape(xn, (b, c, h, w)) * self.gamma + self.beta
