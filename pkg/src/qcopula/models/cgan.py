"""Classical GAN baseline with a 24-parameter generator."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nnet import Mlp, classical_generator, discriminator
from ..optim import AdamConfig, AdamState, adam_step
from ..records import LogWriter, TrainingRecord
from .adversarial import DiscriminatorTrainer, draw_real
from .losses import generator_loss, generator_loss_grad

NOISE_DIM = 6


@dataclass
class CganConfig:
    batch: int = 2048
    iterations: int = 20000
    learning_rate: float = 0.0001
    seed: int = 0


@dataclass
class CganResult:
    generator: Mlp
    discriminator: Mlp
    log: list[TrainingRecord]


def generate(gen: Mlp, count: int, seed) -> np.ndarray:
    """Eval-mode samples from a trained generator."""
    rng = np.random.default_rng(seed)
    return gen.forward(rng.random((count, gen.input_width)), training=False)


def train_classical_gan(config: CganConfig, real_points, log_path=None, callback=None) -> CganResult:
    real_points = np.asarray(real_points, dtype=float)
    seeds = np.random.SeedSequence(config.seed).spawn(3)
    init_rng, data_rng, noise_rng = (np.random.default_rng(s) for s in seeds)
    gen = classical_generator(init_rng, noise_dim=NOISE_DIM)
    disc = discriminator(init_rng)
    d_trainer = DiscriminatorTrainer(disc, config.learning_rate)
    g_adam = AdamState(gen.parameters(), AdamConfig(learning_rate=config.learning_rate))
    m = config.batch

    log: list[TrainingRecord] = []
    with LogWriter(log_path) as writer:
        for it in range(1, config.iterations + 1):
            z = noise_rng.random((m, NOISE_DIM))
            fake = gen.forward(z, training=True)
            loss_d = d_trainer.step(draw_real(real_points, m, data_rng), fake)
            d_fake = disc.forward(fake, training=False)[:, 0]
            loss_g = generator_loss(d_fake)
            _, d_input = disc.backward(generator_loss_grad(d_fake)[:, None])
            g_grads, _ = gen.backward(d_input)
            adam_step(g_adam, g_grads)
            record = TrainingRecord(it, {"loss_g": loss_g, "loss_d": loss_d})
            log.append(record)
            writer.write(record)
            if callback is not None:
                callback(record)
    return CganResult(gen, disc, log)
