"""Dense neural-network kernel: MLPs, softmax cross-entropy, Adam.

Everything runs in 64-bit floats with a fixed operation order, so training
is bit-reproducible given the seed and data order. Networks are stacks of
fully connected layers with ReLU between them and an identity output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .errors import NumericalError


@dataclass
class DenseLayer:
    """Fully connected layer ``y = x W^T + b`` with ``W`` shaped (out, in)."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[0],):
            raise ValueError("inconsistent layer shapes")

    @property
    def fan_in(self) -> int:
        return self.weights.shape[1]

    @property
    def fan_out(self) -> int:
        return self.weights.shape[0]


class Mlp:
    """Fully connected ReLU network; hidden activations ReLU, output identity.

    ``dims`` chains layer widths, e.g. ``[8, 256, 256, 256, 4]`` builds the
    standard 4-layer network used throughout.
    """

    def __init__(self, layers: Sequence[DenseLayer]):
        if not layers:
            raise ValueError("an MLP needs at least one layer")
        for prev, nxt in zip(layers, layers[1:]):
            if nxt.fan_in != prev.fan_out:
                raise ValueError("consecutive layer shapes do not chain")
        self.layers = list(layers)

    @classmethod
    def init(cls, dims: Sequence[int], rng: np.random.Generator) -> "Mlp":
        """He-uniform weights (bound ``sqrt(6 / fan_in)``), zero biases."""
        layers = []
        for fan_in, fan_out in zip(dims, dims[1:]):
            bound = np.sqrt(6.0 / fan_in)
            w = rng.uniform(-bound, bound, size=(fan_out, fan_in))
            layers.append(DenseLayer(w, np.zeros(fan_out)))
        return cls(layers)

    @property
    def dims(self) -> List[int]:
        return [self.layers[0].fan_in] + [l.fan_out for l in self.layers]

    @property
    def num_params(self) -> int:
        return sum(l.weights.size + l.bias.size for l in self.layers)

    def parameters(self) -> List[np.ndarray]:
        """Flat parameter list ``[W1, b1, W2, b2, ...]`` (live arrays)."""
        out = []
        for l in self.layers:
            out.append(l.weights)
            out.append(l.bias)
        return out

    def forward(self, x: np.ndarray, want_cache: bool = False):
        """Forward pass over rows of ``x`` (a single vector is accepted too).

        With ``want_cache`` the returned cache holds every layer input and
        pre-activation, as consumed by :func:`mlp_backward`.
        """
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        h = np.atleast_2d(x)
        if h.shape[1] != self.layers[0].fan_in:
            raise ValueError(
                f"input width {h.shape[1]} != expected {self.layers[0].fan_in}")
        inputs, preacts = [], []
        last = len(self.layers) - 1
        for i, layer in enumerate(self.layers):
            inputs.append(h)
            z = h @ layer.weights.T + layer.bias
            preacts.append(z)
            h = z if i == last else np.maximum(z, 0.0)
        y = h[0] if single else h
        if want_cache:
            return y, ForwardCache(inputs=inputs, preacts=preacts, single=single)
        return y

    def clone(self) -> "Mlp":
        return Mlp([DenseLayer(l.weights.copy(), l.bias.copy()) for l in self.layers])


@dataclass
class ForwardCache:
    """Layer inputs and pre-activations captured during a forward pass."""

    inputs: List[np.ndarray]
    preacts: List[np.ndarray]
    single: bool


def mlp_backward(net: Mlp, cache: ForwardCache, upstream: np.ndarray):
    """Reverse-mode gradients of a scalar loss through ``net``.

    ``upstream`` is dLoss/dOutput with the output's shape. Returns
    ``(param_grads, input_grad)`` where ``param_grads`` mirrors
    ``net.parameters()`` and ``input_grad`` is dLoss/dInput.
    """
    if cache is None or not cache.inputs:
        raise ValueError("backward requires the cache of a forward pass")
    grad = np.atleast_2d(np.asarray(upstream, dtype=np.float64))
    param_grads: List[np.ndarray] = [None] * (2 * len(net.layers))
    last = len(net.layers) - 1
    for i in range(last, -1, -1):
        if i != last:
            grad = grad * (cache.preacts[i] > 0.0)
        param_grads[2 * i] = grad.T @ cache.inputs[i]
        param_grads[2 * i + 1] = grad.sum(axis=0)
        grad = grad @ net.layers[i].weights
    input_grad = grad[0] if cache.single else grad
    return param_grads, input_grad


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max-subtraction for stability."""
    z = np.asarray(logits, dtype=np.float64)
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_cross_entropy(logits: np.ndarray, target):
    """Cross-entropy of integer targets under row-wise softmax.

    Accepts one logit vector with a scalar target, or a matrix with one
    target per row; losses come back per row (a scalar for vector input),
    and ``grad_logits = softmax(logits) - onehot(target)``.
    """
    z = np.asarray(logits, dtype=np.float64)
    single = z.ndim == 1
    z2 = np.atleast_2d(z)
    targets = np.atleast_1d(np.asarray(target, dtype=np.int64))
    if targets.shape[0] != z2.shape[0]:
        raise ValueError("one target per logit row is required")
    k = z2.shape[1]
    if np.any(targets < 0) or np.any(targets >= k):
        raise ValueError(f"target class out of range [0, {k})")
    shifted = z2 - z2.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    losses = log_norm - shifted[np.arange(z2.shape[0]), targets]
    grads = softmax(z2)
    grads[np.arange(z2.shape[0]), targets] -= 1.0
    if single:
        return float(losses[0]), grads[0]
    return losses, grads


@dataclass
class AdamState:
    """Adam moments for one parameter list; step count starts at zero."""

    first: List[np.ndarray]
    second: List[np.ndarray]
    t: int = 0
    alpha: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params: Sequence[np.ndarray], **hyper) -> "AdamState":
        return cls(first=[np.zeros_like(p) for p in params],
                   second=[np.zeros_like(p) for p in params], **hyper)

    def clone(self) -> "AdamState":
        return AdamState(first=[m.copy() for m in self.first],
                         second=[v.copy() for v in self.second],
                         t=self.t, alpha=self.alpha, beta1=self.beta1,
                         beta2=self.beta2, eps=self.eps)


def adam_step(state: AdamState, params: Sequence[np.ndarray],
              grads: Sequence[np.ndarray]) -> None:
    """One bias-corrected Adam update, applied to ``params`` in place."""
    if len(params) != len(state.first) or len(grads) != len(params):
        raise ValueError("params/grads do not match the optimizer state")
    for g in grads:
        if not np.all(np.isfinite(g)):
            raise NumericalError("non-finite gradient passed to the optimizer")
    state.t += 1
    bc1 = 1.0 - state.beta1 ** state.t
    bc2 = 1.0 - state.beta2 ** state.t
    for p, g, m, v in zip(params, grads, state.first, state.second):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * np.square(g)
        p -= state.alpha * (m / bc1) / (np.sqrt(v / bc2) + state.eps)


def layer_to_record(layer: DenseLayer) -> dict:
    """JSON-ready record: shape plus row-major weights at full precision."""
    return {
        "shape": [layer.fan_out, layer.fan_in],
        "weights": [float(x) for x in layer.weights.ravel(order="C")],
        "bias": [float(x) for x in layer.bias],
    }


def layer_from_record(record: dict) -> DenseLayer:
    out, inp = (int(x) for x in record["shape"])
    w = np.array(record["weights"], dtype=np.float64).reshape(out, inp, order="C")
    b = np.array(record["bias"], dtype=np.float64)
    return DenseLayer(w, b)


def mlp_to_records(net: Mlp) -> list:
    return [layer_to_record(l) for l in net.layers]


def mlp_from_records(records: Sequence[dict]) -> Mlp:
    return Mlp([layer_from_record(r) for r in records])
