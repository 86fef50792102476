"""Shared discriminator machinery for the quantum and classical GANs."""
from __future__ import annotations

import numpy as np

from ..nnet import Mlp
from ..optim import AdamConfig, AdamState, adam_step, sgd_step
from .losses import discriminator_loss, discriminator_loss_grad


class DiscriminatorTrainer:
    """Descends the discriminator loss with Adam (default) or plain SGD."""

    def __init__(self, net: Mlp, learning_rate: float, optimizer: str = "adam"):
        if optimizer not in ("adam", "sgd"):
            raise ValueError(f"optimizer must be 'adam' or 'sgd', got {optimizer!r}")
        self.net = net
        self.learning_rate = learning_rate
        self.optimizer = optimizer
        self._adam = AdamState(net.parameters(), AdamConfig(learning_rate=learning_rate))

    def step(self, real: np.ndarray, fake: np.ndarray) -> float:
        m = len(real)
        out = self.net.forward(np.concatenate([real, fake]))[:, 0]
        d_real, d_fake = out[:m], out[m:]
        loss = discriminator_loss(d_real, d_fake)
        g_real, g_fake = discriminator_loss_grad(d_real, d_fake)
        grads, _ = self.net.backward(np.concatenate([g_real, g_fake])[:, None])
        if self.optimizer == "adam":
            adam_step(self._adam, grads)
        else:
            sgd_step(self.net.parameters(), grads, self.learning_rate)
        return loss


def draw_real(real_points: np.ndarray, m: int, rng) -> np.ndarray:
    """Minibatch of ``m`` training points drawn with replacement."""
    return real_points[rng.integers(0, len(real_points), size=m)]
