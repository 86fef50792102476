"""Two-sample 2-d Kolmogorov-Smirnov testing and distribution diagnostics."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .models.losses import KL_CLIP, kl_divergence

_ANCHOR_BLOCK = 1024
_PERM_BLOCK = 128
_TIE_TOL = 1e-12


@dataclass(frozen=True)
class Ks2dResult:
    statistic: float
    p_value: float
    permutations: int


def _as_points(sample, name: str) -> np.ndarray:
    sample = np.asarray(sample, dtype=float)
    if sample.ndim != 2 or sample.shape[1] != 2:
        raise ValueError(f"{name} must be an (N, 2) array")
    if len(sample) == 0:
        raise ValueError(f"{name} is empty")
    return sample


class _Pooled:
    """Label-independent geometry of the pooled sample.

    For anchor ``a`` and a 0/1 label vector ``s`` the quadrant counts are
    ``ll = #{x <= x_a, y <= y_a}``, ``nx = #{x <= x_a}``, ``ny = #{y <= y_a}``
    over the labelled points; the other three quadrants follow from these.
    """

    def __init__(self, pooled: np.ndarray):
        self.x, self.y = pooled[:, 0], pooled[:, 1]
        self.n = len(pooled)
        self.x_order = np.argsort(self.x, kind="stable")
        self.y_order = np.argsort(self.y, kind="stable")
        # index of the last sorted point <= each anchor
        self.x_pos = np.searchsorted(self.x[self.x_order], self.x, side="right") - 1
        self.y_pos = np.searchsorted(self.y[self.y_order], self.y, side="right") - 1

    def max_discrepancy(self, labels: np.ndarray) -> np.ndarray:
        """Statistic for each column of ``labels`` (1 marks sample A)."""
        labels = labels.astype(np.float64)
        n_a = labels.sum(axis=0)
        n_b = self.n - n_a
        cx_a = np.cumsum(labels[self.x_order], axis=0)[self.x_pos]
        cy_a = np.cumsum(labels[self.y_order], axis=0)[self.y_pos]
        cx_all = (self.x_pos + 1.0)[:, None]
        cy_all = (self.y_pos + 1.0)[:, None]
        best = np.zeros(labels.shape[1])
        lab32 = labels.astype(np.float32)
        for start in range(0, self.n, _ANCHOR_BLOCK):
            sl = slice(start, start + _ANCHOR_BLOCK)
            inside = (self.x[None, :] <= self.x[sl, None]) & (self.y[None, :] <= self.y[sl, None])
            ll_all = inside.sum(axis=1, dtype=np.float64)[:, None]
            ll_a = (inside.astype(np.float32) @ lab32).astype(np.float64)
            nx_a, ny_a = cx_a[sl], cy_a[sl]
            nx_b, ny_b = cx_all[sl] - nx_a, cy_all[sl] - ny_a
            ll_b = ll_all - ll_a
            quads_a = (ll_a, nx_a - ll_a, ny_a - ll_a, n_a - nx_a - ny_a + ll_a)
            quads_b = (ll_b, nx_b - ll_b, ny_b - ll_b, n_b - nx_b - ny_b + ll_b)
            for qa, qb in zip(quads_a, quads_b):
                best = np.maximum(best, np.abs(qa / n_a - qb / n_b).max(axis=0))
        return best


def ks2d_statistic(sample_a, sample_b) -> float:
    """Peacock two-sample statistic with anchors at every pooled point.

    Points lying on an anchor's axis count toward the ``<=`` side.
    """
    a = _as_points(sample_a, "sample_a")
    b = _as_points(sample_b, "sample_b")
    pooled = _Pooled(np.concatenate([a, b]))
    labels = np.zeros((pooled.n, 1))
    labels[: len(a)] = 1
    return float(pooled.max_discrepancy(labels)[0])


def ks2d_test(sample_a, sample_b, permutations: int = 1000, seed=0) -> Ks2dResult:
    """Permutation test: ``p = (#{perm stat >= observed} + 1) / (permutations + 1)``.

    Replicate ``i`` shuffles labels with a generator seeded from ``(seed, i)``,
    so the p-value does not depend on how replicates are batched.
    """
    if permutations < 100:
        raise ValueError(f"need at least 100 permutations, got {permutations}")
    a = _as_points(sample_a, "sample_a")
    b = _as_points(sample_b, "sample_b")
    pooled = _Pooled(np.concatenate([a, b]))
    n, n_a = pooled.n, len(a)
    observed_labels = np.zeros((n, 1))
    observed_labels[:n_a] = 1
    observed = float(pooled.max_discrepancy(observed_labels)[0])

    exceed = 0
    for start in range(0, permutations, _PERM_BLOCK):
        reps = range(start, min(start + _PERM_BLOCK, permutations))
        labels = np.zeros((n, len(reps)))
        for col, i in enumerate(reps):
            perm = np.random.default_rng([seed, i]).permutation(n)
            labels[perm[:n_a], col] = 1
        exceed += int(np.sum(pooled.max_discrepancy(labels) >= observed - _TIE_TOL))
    return Ks2dResult(observed, (exceed + 1) / (permutations + 1), permutations)


def kl_report(q, p, direction: str = "forward", clip: float = KL_CLIP) -> float:
    """Forward ``sum p log(p/q)`` or reverse ``sum q log(q/p)``, clipping the denominator."""
    if direction == "forward":
        return kl_divergence(p, q, clip)
    if direction == "reverse":
        return kl_divergence(q, p, clip)
    raise ValueError(f"direction must be 'forward' or 'reverse', got {direction!r}")


@dataclass(frozen=True)
class MarginalUniformity:
    max_deviation: np.ndarray
    band: float
    flagged: np.ndarray

    @property
    def within_band(self) -> np.ndarray:
        return self.max_deviation <= self.band


def marginal_uniformity(points=None, *, counts=None, bins: int, shots: int | None = None) -> MarginalUniformity:
    """Per-variable histogram deviation from ``1/bins``.

    Pass either ``points`` (``(N, d)`` values in ``[0, 1]``) or ``counts``
    (``(d, bins)`` histogram counts or frequencies). The band is
    ``1/sqrt(shots)``; variables deviating by more than three bands are flagged.
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    if (points is None) == (counts is None):
        raise ValueError("pass exactly one of points or counts")
    if points is not None:
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        idx = np.clip(np.floor(points * bins).astype(np.int64), 0, bins - 1)
        hist = np.array([np.bincount(col, minlength=bins) for col in idx.T], dtype=float)
        shots = len(points) if shots is None else shots
    else:
        hist = np.atleast_2d(np.asarray(counts, dtype=float))
        if hist.shape[1] != bins:
            raise ValueError(f"counts must have {bins} columns")
        shots = int(round(hist[0].sum())) if shots is None else shots
    freq = hist / hist.sum(axis=1, keepdims=True)
    dev = np.abs(freq - 1.0 / bins).max(axis=1)
    band = 1.0 / np.sqrt(shots)
    return MarginalUniformity(dev, band, dev > 3 * band)


@dataclass(frozen=True)
class EvaluationReport:
    model: str
    d_ks: float
    p_value: float
    n_a: int
    n_b: int
    permutations: int

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2) + "\n")


def evaluate_samples(model: str, samples, reference, permutations: int = 1000, seed=0) -> EvaluationReport:
    res = ks2d_test(samples, reference, permutations, seed)
    return EvaluationReport(model, res.statistic, res.p_value, len(samples), len(reference), permutations)
