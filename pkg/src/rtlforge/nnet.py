"""Minimal feed-forward building blocks on numpy float64.

Everything here is deliberately explicit: each layer owns its parameters,
forward caches what backward needs, and backward accumulates into
``Param.grad`` so a caller can average gradients over minibatches before
stepping. No autograd, no broadcasting surprises; inputs are always
(batch, features).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

TENSOR_FORMAT = "rtlforge-tensors-v1"
LAYERNORM_EPS = 1e-5


class Param:
    __slots__ = ("value", "grad")

    def __init__(self, value: np.ndarray):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def sigmoid(x: np.ndarray) -> np.ndarray:
    # split by sign to stay finite for large |x|
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


class Affine:
    def __init__(self, in_dim: int, out_dim: int, rng: Optional[np.random.Generator] = None):
        if rng is None:
            weight = np.zeros((in_dim, out_dim))
        else:
            weight = glorot_uniform(rng, in_dim, out_dim)
        self.w = Param(weight)
        self.b = Param(np.zeros(out_dim))
        self._x: Optional[np.ndarray] = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._x = x
        return x @ self.w.value + self.b.value

    def backward(self, dout: np.ndarray) -> np.ndarray:
        self.w.grad += self._x.T @ dout
        self.b.grad += dout.sum(axis=0)
        return dout @ self.w.value.T

    def params(self) -> list[Param]:
        return [self.w, self.b]


class LayerNorm:
    """Per-row normalization with learnable gain and bias."""

    def __init__(self, dim: int):
        self.gain = Param(np.ones(dim))
        self.bias = Param(np.zeros(dim))
        self._cache = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        mu = x.mean(axis=1, keepdims=True)
        var = x.var(axis=1, keepdims=True)
        inv_std = 1.0 / np.sqrt(var + LAYERNORM_EPS)
        xhat = (x - mu) * inv_std
        self._cache = (xhat, inv_std)
        return self.gain.value * xhat + self.bias.value

    def backward(self, dout: np.ndarray) -> np.ndarray:
        xhat, inv_std = self._cache
        n = xhat.shape[1]
        self.gain.grad += (dout * xhat).sum(axis=0)
        self.bias.grad += dout.sum(axis=0)
        dxhat = dout * self.gain.value
        # exact gradient through mean and variance
        return (inv_std / n) * (
            n * dxhat
            - dxhat.sum(axis=1, keepdims=True)
            - xhat * (dxhat * xhat).sum(axis=1, keepdims=True)
        )

    def params(self) -> list[Param]:
        return [self.gain, self.bias]


class Relu:
    def __init__(self):
        self._mask: Optional[np.ndarray] = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._mask = x > 0
        return x * self._mask

    def backward(self, dout: np.ndarray) -> np.ndarray:
        return dout * self._mask

    def params(self) -> list[Param]:
        return []


class Sigmoid:
    def __init__(self):
        self._out: Optional[np.ndarray] = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._out = sigmoid(x)
        return self._out

    def backward(self, dout: np.ndarray) -> np.ndarray:
        return dout * self._out * (1.0 - self._out)

    def params(self) -> list[Param]:
        return []


class Chain:
    def __init__(self, layers: Sequence):
        self.layers = list(layers)

    def forward(self, x: np.ndarray) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, dout: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            dout = layer.backward(dout)
        return dout

    def params(self) -> list[Param]:
        return [p for layer in self.layers for p in layer.params()]


def zero_grads(params: Iterable[Param]) -> None:
    for p in params:
        p.grad[...] = 0.0


class Adam:
    def __init__(self, params: Sequence[Param], lr: float = 3e-4,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m = [np.zeros_like(p.value) for p in self.params]
        self._v = [np.zeros_like(p.value) for p in self.params]

    def step(self) -> None:
        self.t += 1
        b1t = 1.0 - self.beta1 ** self.t
        b2t = 1.0 - self.beta2 ** self.t
        for p, m, v in zip(self.params, self._m, self._v):
            m *= self.beta1
            m += (1.0 - self.beta1) * p.grad
            v *= self.beta2
            v += (1.0 - self.beta2) * p.grad ** 2
            p.value -= self.lr * (m / b1t) / (np.sqrt(v / b2t) + self.eps)


def save_tensors(path: str | Path, tensors: dict[str, np.ndarray],
                 meta: Optional[dict] = None) -> None:
    payload = {
        "format": TENSOR_FORMAT,
        "meta": meta or {},
        "tensors": {
            name: {"shape": list(a.shape), "data": np.asarray(a, dtype=np.float64).ravel().tolist()}
            for name, a in tensors.items()
        },
    }
    Path(path).write_text(json.dumps(payload))


def load_tensors(path: str | Path) -> tuple[dict[str, np.ndarray], dict]:
    payload = json.loads(Path(path).read_text())
    if payload.get("format") != TENSOR_FORMAT:
        raise ValueError(f"unsupported tensor file format: {payload.get('format')!r}")
    tensors = {
        name: np.array(t["data"], dtype=np.float64).reshape(t["shape"])
        for name, t in payload["tensors"].items()
    }
    return tensors, payload.get("meta", {})
