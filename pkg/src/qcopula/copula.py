"""Empirical CDFs, the probability integral transform, and copula-space binning."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata


def daily_returns(prices) -> np.ndarray:
    """Simple returns ``(P[t+1] - P[t]) / P[t]``."""
    prices = np.asarray(prices, dtype=float)
    if prices.ndim != 1 or prices.size < 2:
        raise ValueError("need at least two prices")
    if np.any(~np.isfinite(prices)) or np.any(prices <= 0):
        raise ValueError("prices must be finite and positive")
    return np.diff(prices) / prices[:-1]


def pit_transform(data) -> np.ndarray:
    """Map a sample to ``(0, 1)`` by ``rank / (N + 1)`` with average ranks for ties."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 1 or data.size < 2:
        raise ValueError("need a 1-d sample of at least two values")
    return rankdata(data, method="average") / (data.size + 1)


def pit_transform_columns(data) -> np.ndarray:
    data = np.asarray(data, dtype=float)
    return np.column_stack([pit_transform(col) for col in data.T])


@dataclass(frozen=True)
class EmpiricalCdf:
    sorted_values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.sorted_values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("an empirical CDF needs at least two values")
        if np.any(np.diff(values) < 0):
            raise ValueError("sorted_values must be non-decreasing")
        object.__setattr__(self, "sorted_values", values)

    @classmethod
    def from_sample(cls, data) -> EmpiricalCdf:
        return cls(np.sort(np.asarray(data, dtype=float)))

    @property
    def size(self) -> int:
        return self.sorted_values.size

    def __call__(self, x):
        """Fraction of the sample ``<= x``."""
        return np.searchsorted(self.sorted_values, x, side="right") / self.size

    def quantile(self, u):
        """Interpolated order statistic at position ``u * (N + 1)``, clamped to the sample range."""
        u = np.asarray(u, dtype=float)
        if np.any((u <= 0) | (u >= 1)):
            raise ValueError("u must lie strictly inside (0, 1)")
        n = self.size
        pos = np.clip(u * (n + 1), 1.0, float(n)) - 1.0
        return np.interp(pos, np.arange(n), self.sorted_values)


def inverse_pit(u, cdf: EmpiricalCdf):
    out = cdf.quantile(u)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class DiscreteDistribution2D:
    bins: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (self.bins, self.bins):
            raise ValueError(f"probs must be {self.bins}x{self.bins}, got {probs.shape}")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError("probs must be non-negative and sum to 1")
        object.__setattr__(self, "probs", probs)


def bin_indices(values, bins: int) -> np.ndarray:
    return np.clip(np.floor(np.asarray(values, dtype=float) * bins).astype(np.int64), 0, bins - 1)


def bin_2d(points, bins: int) -> DiscreteDistribution2D:
    points = np.asarray(points, dtype=float)
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    if points.ndim != 2 or points.shape[1] != 2 or len(points) == 0:
        raise ValueError("need a non-empty (N, 2) array of points")
    return counts_to_distribution(bin_indices(points[:, 0], bins), bin_indices(points[:, 1], bins), bins)


def counts_to_distribution(i, j, bins: int) -> DiscreteDistribution2D:
    """Normalised 2-d histogram of integer cell indices."""
    grid = np.zeros((bins, bins))
    np.add.at(grid, (np.asarray(i), np.asarray(j)), 1.0)
    return DiscreteDistribution2D(bins, grid / grid.sum())


def bootstrap(data, size: int | None, seed) -> np.ndarray:
    data = np.asarray(data)
    rng = np.random.default_rng(seed)
    size = len(data) if size is None else size
    return data[rng.integers(0, len(data), size=size)]
