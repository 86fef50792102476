"""Adversarial training of the qopula generator against a classical discriminator."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..nnet import Mlp, discriminator
from ..optim import SpsaConfig, spsa_step
from ..qopula import QopulaSpec, param_count, random_theta, sample_copula_points
from ..records import LogWriter, TrainingRecord
from ..statevec import NoiseConfig
from .adversarial import DiscriminatorTrainer, draw_real
from .losses import generator_loss


@dataclass
class QganConfig:
    spec: QopulaSpec = field(default_factory=QopulaSpec)
    batch: int = 2048
    iterations: int = 1000
    spsa: SpsaConfig = field(default_factory=SpsaConfig)
    disc_lr: float = 0.0015
    disc_steps: int = 1
    disc_optimizer: str = "adam"
    disc_hidden: int = 32
    seed: int = 0
    noise: NoiseConfig | None = None
    theta0: np.ndarray | None = None

    def __post_init__(self):
        if self.batch < 1:
            raise ValueError("batch must be >= 1")
        if self.disc_steps < 1:
            raise ValueError("disc_steps must be >= 1")


@dataclass
class QganResult:
    theta: np.ndarray
    discriminator: Mlp
    log: list[TrainingRecord]


def train_qgan(config: QganConfig, real_points, log_path=None, callback=None) -> QganResult:
    """Alternate one discriminator update with a short SPSA run on the generator.

    The SPSA gain schedule restarts at ``k = 1`` in every outer iteration, so
    each outer iteration takes ``config.spsa.iterations`` steps of sizes
    ``a/1, a/2, ...``. Each cost evaluation draws a fresh batch of circuit
    samples.
    """
    real_points = np.asarray(real_points, dtype=float)
    if real_points.ndim != 2 or real_points.shape[1] != config.spec.num_vars:
        raise ValueError(f"real_points must have shape (N, {config.spec.num_vars})")
    if np.any((real_points <= 0) | (real_points >= 1)):
        raise ValueError("real_points must lie in the open unit hypercube")
    seeds = np.random.SeedSequence(config.seed).spawn(3)
    init_rng, data_rng, circuit_rng = (np.random.default_rng(s) for s in seeds)

    spec, m = config.spec, config.batch
    if config.theta0 is None:
        theta = random_theta(spec, init_rng)
    else:
        theta = np.array(config.theta0, dtype=float)
        if theta.size != param_count(spec):
            raise ValueError(f"theta0 has {theta.size} entries, spec needs {param_count(spec)}")
    disc = discriminator(init_rng, hidden=config.disc_hidden)
    trainer = DiscriminatorTrainer(disc, config.disc_lr, config.disc_optimizer)

    def sample(t):
        return sample_copula_points(spec, t, m, circuit_rng, config.noise)

    def cost(t):
        return generator_loss(disc.forward(sample(t), training=False))

    log: list[TrainingRecord] = []
    with LogWriter(log_path) as writer:
        for it in range(1, config.iterations + 1):
            fake = sample(theta)
            for _ in range(config.disc_steps):
                loss_d = trainer.step(draw_real(real_points, m, data_rng), fake)
            loss_g = generator_loss(disc.forward(fake, training=False))
            for k in range(1, config.spsa.iterations + 1):
                theta = spsa_step(cost, theta, k, config.spsa, circuit_rng)
            record = TrainingRecord(it, {"loss_g": loss_g, "loss_d": loss_d}, theta.copy())
            log.append(record)
            writer.write(record)
            if callback is not None:
                callback(record)
    return QganResult(theta, disc, log)
