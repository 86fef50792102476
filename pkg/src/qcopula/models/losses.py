"""Divergences and the binary cross-entropy pair used by the adversarial models."""
from __future__ import annotations

import numpy as np

LOG_CLIP = 1e-12
KL_CLIP = 1e-6


def _as_probs(x) -> np.ndarray:
    return np.asarray(getattr(x, "probs", x), dtype=float)


def kl_divergence(p, q, clip: float = KL_CLIP) -> float:
    """``sum p log(p / max(q, clip))``; cells with ``p == 0`` contribute nothing."""
    p, q = _as_probs(p), _as_probs(q)
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {q.shape}")
    if clip <= 0:
        raise ValueError("clip must be positive")
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / np.maximum(q[mask], clip))))


def qcbm_cost(q, p, clip: float = KL_CLIP) -> float:
    """KL divergence of model histogram ``q`` from target ``p`` with ``p`` clipped below."""
    return kl_divergence(q, p, clip)


def discriminator_loss(d_real, d_fake) -> float:
    d_real, d_fake = np.ravel(d_real), np.ravel(d_fake)
    if d_real.size == 0 or d_fake.size == 0:
        raise ValueError("empty batch")
    if d_real.size != d_fake.size:
        raise ValueError("real and fake batches must have equal size")
    m = d_real.size
    return float(
        -(np.sum(np.log(np.maximum(d_real, LOG_CLIP))) + np.sum(np.log(np.maximum(1 - d_fake, LOG_CLIP))))
        / (2 * m)
    )


def discriminator_loss_grad(d_real, d_fake) -> tuple[np.ndarray, np.ndarray]:
    """Derivatives of :func:`discriminator_loss` with respect to each output."""
    m = np.size(d_real)
    g_real = np.where(d_real > LOG_CLIP, -1.0 / (2 * m * np.maximum(d_real, LOG_CLIP)), 0.0)
    g_fake = np.where(1 - d_fake > LOG_CLIP, 1.0 / (2 * m * np.maximum(1 - d_fake, LOG_CLIP)), 0.0)
    return g_real, g_fake


def generator_loss(d_fake) -> float:
    d_fake = np.ravel(d_fake)
    if d_fake.size == 0:
        raise ValueError("empty batch")
    return float(-np.mean(np.log(np.maximum(d_fake, LOG_CLIP))))


def generator_loss_grad(d_fake) -> np.ndarray:
    m = np.size(d_fake)
    return np.where(d_fake > LOG_CLIP, -1.0 / (m * np.maximum(d_fake, LOG_CLIP)), 0.0)
