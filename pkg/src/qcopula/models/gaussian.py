"""Gaussian-copula baseline."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import ndtr, ndtri

RHO_LIMIT = 0.999


def normal_quantile(p):
    """Standard normal inverse CDF."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise ValueError("p must lie strictly inside (0, 1)")
    out = ndtri(p)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GaussianCopulaModel:
    rho: float

    def __post_init__(self):
        if not -1 < self.rho < 1:
            raise ValueError(f"rho must lie in (-1, 1), got {self.rho}")

    def save(self, path) -> None:
        Path(path).write_text(json.dumps({"rho": self.rho}) + "\n")

    @classmethod
    def load(cls, path) -> GaussianCopulaModel:
        return cls(json.loads(Path(path).read_text())["rho"])


def fit_gaussian_copula(points) -> GaussianCopulaModel:
    """Pearson correlation of normal scores, clamped to ``[-0.999, 0.999]``."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise ValueError("need an (N, 2) array of copula points")
    if len(points) < 10:
        raise ValueError("need at least 10 points")
    z = normal_quantile(points)
    if np.any(z.std(axis=0) == 0):
        raise ValueError("normal scores have zero variance")
    rho = float(np.corrcoef(z[:, 0], z[:, 1])[0, 1])
    return GaussianCopulaModel(float(np.clip(rho, -RHO_LIMIT, RHO_LIMIT)))


def sample_gaussian_copula(model: GaussianCopulaModel, count: int, seed) -> np.ndarray:
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(np.array([[1.0, model.rho], [model.rho, 1.0]]))
    z = rng.standard_normal((count, 2)) @ chol.T
    return ndtr(z)
