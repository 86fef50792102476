"""Small dense networks with hand-written backpropagation.

Two architectures are used:

* the discriminator ``2 -> 32 (LeakyReLU) -> 1 (Sigmoid)``, 129 parameters;
* the classical generator ``6 -> 2 (BatchNorm, ReLU) -> 2 (Sigmoid)``,
  24 parameters, matching the 24-angle quantum generator.

Weights are stored as ``(fan_in, fan_out)`` so a layer computes ``x @ W + b``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

ACTIVATIONS = ("leaky_relu", "relu", "sigmoid", "identity")
LEAKY_SLOPE = 0.01


@dataclass
class BatchNorm:
    gamma: np.ndarray
    beta: np.ndarray
    running_mean: np.ndarray
    running_var: np.ndarray
    momentum: float = 0.1
    epsilon: float = 1e-5

    @classmethod
    def fresh(cls, width: int, momentum: float = 0.1, epsilon: float = 1e-5) -> BatchNorm:
        return cls(np.ones(width), np.zeros(width), np.zeros(width), np.ones(width), momentum, epsilon)


@dataclass
class Dense:
    weights: np.ndarray
    biases: np.ndarray
    activation: str = "identity"
    slope: float = LEAKY_SLOPE
    batch_norm: BatchNorm | None = None

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.weights.shape[1] != self.biases.shape[0]:
            raise ValueError("weights and biases disagree on output width")

    @property
    def fan_in(self) -> int:
        return self.weights.shape[0]

    @property
    def fan_out(self) -> int:
        return self.weights.shape[1]

    def parameters(self) -> list[np.ndarray]:
        params = [self.weights, self.biases]
        if self.batch_norm is not None:
            params += [self.batch_norm.gamma, self.batch_norm.beta]
        return params


def _activate(z: np.ndarray, kind: str, slope: float) -> np.ndarray:
    if kind == "leaky_relu":
        return np.where(z > 0, z, slope * z)
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "sigmoid":
        return expit(z)
    return z


def _activate_grad(z: np.ndarray, out: np.ndarray, kind: str, slope: float) -> np.ndarray:
    if kind == "leaky_relu":
        return np.where(z > 0, 1.0, slope)
    if kind == "relu":
        return (z > 0).astype(float)
    if kind == "sigmoid":
        return out * (1.0 - out)
    return np.ones_like(z)


@dataclass
class Mlp:
    layers: list[Dense]
    _cache: list | None = field(default=None, repr=False)

    def __post_init__(self):
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.fan_out != nxt.fan_in:
                raise ValueError(f"layer widths do not compose: {prev.fan_out} -> {nxt.fan_in}")

    @property
    def input_width(self) -> int:
        return self.layers[0].fan_in

    def parameters(self) -> list[np.ndarray]:
        return [p for layer in self.layers for p in layer.parameters()]

    def param_count(self) -> int:
        return sum(p.size for p in self.parameters())

    def forward(self, x, training: bool = True) -> np.ndarray:
        """Evaluate the network and keep the activations needed by :meth:`backward`.

        In training mode batch-norm layers normalise with batch statistics and
        update their running averages; in eval mode they use the running
        averages only.
        """
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[1] != self.input_width:
            raise ValueError(f"expected input of shape (batch, {self.input_width}), got {x.shape}")
        cache = []
        h = x
        for layer in self.layers:
            entry = {"input": h}
            z = h @ layer.weights + layer.biases
            bn = layer.batch_norm
            if bn is not None:
                if training:
                    mean = z.mean(axis=0)
                    var = z.var(axis=0)
                    n = z.shape[0]
                    bn.running_mean[:] = (1 - bn.momentum) * bn.running_mean + bn.momentum * mean
                    unbiased = var * n / (n - 1) if n > 1 else var
                    bn.running_var[:] = (1 - bn.momentum) * bn.running_var + bn.momentum * unbiased
                else:
                    mean, var = bn.running_mean, bn.running_var
                inv_std = 1.0 / np.sqrt(var + bn.epsilon)
                xhat = (z - mean) * inv_std
                entry.update(xhat=xhat, inv_std=inv_std, training=training)
                z = bn.gamma * xhat + bn.beta
            out = _activate(z, layer.activation, layer.slope)
            entry.update(pre=z, out=out)
            cache.append(entry)
            h = out
        self._cache = cache
        return h

    __call__ = forward

    def backward(self, upstream) -> tuple[list[np.ndarray], np.ndarray]:
        """Gradients for :meth:`parameters` (same order) and for the input batch."""
        if self._cache is None:
            raise RuntimeError("backward called before forward")
        grad = np.asarray(upstream, dtype=float)
        grads: list[list[np.ndarray]] = []
        for layer, entry in zip(reversed(self.layers), reversed(self._cache)):
            grad = grad * _activate_grad(entry["pre"], entry["out"], layer.activation, layer.slope)
            layer_grads = []
            bn = layer.batch_norm
            if bn is not None:
                xhat, inv_std = entry["xhat"], entry["inv_std"]
                d_gamma = np.sum(grad * xhat, axis=0)
                d_beta = np.sum(grad, axis=0)
                d_xhat = grad * bn.gamma
                if entry["training"]:
                    n = grad.shape[0]
                    grad = (inv_std / n) * (
                        n * d_xhat - d_xhat.sum(axis=0) - xhat * np.sum(d_xhat * xhat, axis=0)
                    )
                else:
                    grad = d_xhat * inv_std
                layer_grads = [d_gamma, d_beta]
            d_w = entry["input"].T @ grad
            d_b = grad.sum(axis=0)
            grad = grad @ layer.weights.T
            grads.append([d_w, d_b] + layer_grads)
        flat = [g for layer_grads in reversed(grads) for g in layer_grads]
        return flat, grad

    def to_dict(self) -> dict:
        layers = []
        for layer in self.layers:
            entry = {
                "weights": layer.weights.tolist(),
                "biases": layer.biases.tolist(),
                "activation": layer.activation,
                "slope": layer.slope,
            }
            bn = layer.batch_norm
            if bn is not None:
                entry["batch_norm"] = {
                    "gamma": bn.gamma.tolist(),
                    "beta": bn.beta.tolist(),
                    "running_mean": bn.running_mean.tolist(),
                    "running_var": bn.running_var.tolist(),
                    "momentum": bn.momentum,
                    "epsilon": bn.epsilon,
                }
            layers.append(entry)
        return {"layers": layers}

    @classmethod
    def from_dict(cls, payload: dict) -> Mlp:
        layers = []
        for entry in payload["layers"]:
            bn = entry.get("batch_norm")
            layers.append(
                Dense(
                    np.array(entry["weights"], dtype=float),
                    np.array(entry["biases"], dtype=float),
                    entry["activation"],
                    entry.get("slope", LEAKY_SLOPE),
                    None if bn is None else BatchNorm(
                        np.array(bn["gamma"], dtype=float),
                        np.array(bn["beta"], dtype=float),
                        np.array(bn["running_mean"], dtype=float),
                        np.array(bn["running_var"], dtype=float),
                        bn["momentum"],
                        bn["epsilon"],
                    ),
                )
            )
        return cls(layers)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")

    @classmethod
    def load(cls, path) -> Mlp:
        return cls.from_dict(json.loads(Path(path).read_text()))


def init_mlp(sizes, activations, batch_norm=None, seed=None) -> Mlp:
    """Uniform fan-in initialisation, ``W ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in))``, zero biases."""
    if len(activations) != len(sizes) - 1:
        raise ValueError("need one activation per layer")
    batch_norm = batch_norm or [False] * len(activations)
    rng = np.random.default_rng(seed)
    layers = []
    for fan_in, fan_out, act, bn in zip(sizes[:-1], sizes[1:], activations, batch_norm):
        bound = np.sqrt(1.0 / fan_in)
        w = rng.uniform(-bound, bound, size=(fan_in, fan_out))
        layers.append(Dense(w, np.zeros(fan_out), act, LEAKY_SLOPE, BatchNorm.fresh(fan_out) if bn else None))
    return Mlp(layers)


def discriminator(seed=None, hidden: int = 32) -> Mlp:
    return init_mlp([2, hidden, 1], ["leaky_relu", "sigmoid"], seed=seed)


def classical_generator(seed=None, noise_dim: int = 6, hidden: int = 2) -> Mlp:
    return init_mlp([noise_dim, hidden, 2], ["relu", "sigmoid"], [True, False], seed=seed)
