"""SPSA for circuit angles and Adam for network weights."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

Cost = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class SpsaConfig:
    a: float = 0.008
    c: float = 0.01
    gamma: float = 0.101
    iterations: int = 5
    seed: int | None = None

    def __post_init__(self):
        if self.a <= 0 or self.c <= 0 or self.gamma <= 0:
            raise ValueError("SPSA a, c and gamma must be positive")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")

    def gains(self, k: int) -> tuple[float, float]:
        """``(a_k, c_k)`` for 1-based iteration ``k``."""
        return self.a / k, self.c / k**self.gamma


def rademacher(size: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 2, size=size) * 2.0 - 1.0


def spsa_gradient_estimate(cost: Cost, theta, c_k: float, delta) -> np.ndarray:
    """Two-evaluation simultaneous-perturbation gradient estimate."""
    theta = np.asarray(theta, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if c_k <= 0:
        raise ValueError("c_k must be positive")
    if not np.all(np.abs(delta) == 1):
        raise ValueError("delta entries must be +1 or -1")
    diff = cost(theta + c_k * delta) - cost(theta - c_k * delta)
    return diff / (2.0 * c_k * delta)


def spsa_step(cost: Cost, theta, k: int, config: SpsaConfig, rng) -> np.ndarray:
    a_k, c_k = config.gains(k)
    theta = np.asarray(theta, dtype=float)
    delta = rademacher(theta.size, rng)
    return theta - a_k * spsa_gradient_estimate(cost, theta, c_k, delta)


def spsa_run(cost: Cost, theta0, config: SpsaConfig, rng=None, record: bool = True):
    """Run ``config.iterations`` SPSA steps from ``theta0``.

    Returns ``(theta, trace)`` where ``trace[k-1]`` is the cost at the
    iterate entering step ``k`` (empty when ``record`` is false).
    """
    rng = np.random.default_rng(config.seed if rng is None else rng)
    theta = np.array(theta0, dtype=float)
    trace = []
    for k in range(1, config.iterations + 1):
        if record:
            trace.append(float(cost(theta)))
        theta = spsa_step(cost, theta, k, config, rng)
    return theta, trace


@dataclass(frozen=True)
class AdamConfig:
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("betas must lie in [0, 1)")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


@dataclass
class AdamState:
    """Moments for a list of parameter arrays, updated in place."""

    params: list[np.ndarray]
    config: AdamConfig = field(default_factory=AdamConfig)
    step: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if not self.m:
            self.m = [np.zeros_like(p) for p in self.params]
            self.v = [np.zeros_like(p) for p in self.params]


def adam_step(state: AdamState, grads) -> list[np.ndarray]:
    if len(grads) != len(state.params):
        raise ValueError(f"expected {len(state.params)} gradients, got {len(grads)}")
    cfg = state.config
    state.step += 1
    t = state.step
    for p, g, m, v in zip(state.params, grads, state.m, state.v):
        g = np.asarray(g, dtype=float)
        if g.shape != p.shape:
            raise ValueError(f"gradient shape {g.shape} does not match parameter {p.shape}")
        m *= cfg.beta1
        m += (1 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1 - cfg.beta2) * g * g
        m_hat = m / (1 - cfg.beta1**t)
        v_hat = v / (1 - cfg.beta2**t)
        p -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
    return state.params


def sgd_step(params: list[np.ndarray], grads, learning_rate: float) -> list[np.ndarray]:
    for p, g in zip(params, grads):
        p -= learning_rate * np.asarray(g)
    return params
