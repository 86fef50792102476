"""Born-machine training of the qopula circuit against a binned copula target."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..copula import DiscreteDistribution2D, counts_to_distribution
from ..optim import SpsaConfig, spsa_step
from ..qopula import QopulaSpec, param_count, random_theta, sample_register_values, values_to_unit
from ..records import LogWriter, TrainingRecord
from ..statevec import NoiseConfig
from .losses import KL_CLIP, kl_divergence


@dataclass
class QcbmConfig:
    target: DiscreteDistribution2D
    spec: QopulaSpec = field(default_factory=QopulaSpec)
    spsa: SpsaConfig = field(default_factory=lambda: SpsaConfig(a=0.5, c=0.5, gamma=0.101, iterations=200))
    shots: int = 500
    clip: float = KL_CLIP
    kl_direction: str = "reverse"
    noise: NoiseConfig | None = None
    seed: int = 0
    theta0: np.ndarray | None = None

    def __post_init__(self):
        if self.spec.num_vars != 2:
            raise ValueError("the QCBM target is a 2-d histogram; num_vars must be 2")
        if self.target.bins != self.spec.bins:
            raise ValueError(f"target has {self.target.bins} bins per axis, circuit gives {self.spec.bins}")
        if self.kl_direction not in ("reverse", "forward"):
            raise ValueError(f"kl_direction must be 'reverse' or 'forward', got {self.kl_direction!r}")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")


@dataclass
class QcbmResult:
    theta: np.ndarray
    log: list[TrainingRecord]
    best_iteration: int

    @property
    def costs(self) -> np.ndarray:
        return np.array([r.metrics["kl"] for r in self.log])

    def best_thetas(self, k: int) -> list[np.ndarray]:
        """Angles of the ``k`` lowest-cost logged iterations, best first."""
        order = np.argsort(self.costs, kind="stable")[:k]
        return [self.log[i].theta_snapshot for i in order]


def histogram_cost(config: QcbmConfig, theta, rng) -> float:
    """Sampled KL cost of ``theta``: ``shots`` measurements binned on the register grid."""
    values = sample_register_values(config.spec, theta, config.shots, rng, config.noise)
    q = counts_to_distribution(values[:, 0], values[:, 1], config.spec.bins)
    if config.kl_direction == "reverse":
        return kl_divergence(q, config.target, config.clip)
    return kl_divergence(config.target, q, config.clip)


def train_qcbm(config: QcbmConfig, log_path=None, callback=None) -> QcbmResult:
    """Algorithm: sample, score the histogram, take one SPSA step; repeat.

    Every iteration logs the cost of the iterate *before* its update; the
    returned angles are those with the lowest logged cost.
    """
    rng = np.random.default_rng(config.seed)
    spec = config.spec
    if config.theta0 is None:
        theta = random_theta(spec, rng)
    else:
        theta = np.array(config.theta0, dtype=float)
        if theta.size != param_count(spec):
            raise ValueError(f"theta0 has {theta.size} entries, spec needs {param_count(spec)}")

    def cost(t):
        return histogram_cost(config, t, rng)

    log: list[TrainingRecord] = []
    best = (np.inf, 0, theta.copy())
    with LogWriter(log_path) as writer:
        for k in range(1, config.spsa.iterations + 1):
            kl = cost(theta)
            record = TrainingRecord(k, {"kl": kl}, theta.copy())
            log.append(record)
            writer.write(record)
            if kl < best[0]:
                best = (kl, k, theta.copy())
            if callback is not None:
                callback(record)
            theta = spsa_step(cost, theta, k, config.spsa, rng)
    return QcbmResult(best[2], log, best[1])


def sample_circuits(spec: QopulaSpec, thetas, shots_each: int, seed, noise: NoiseConfig | None = None) -> np.ndarray:
    """Pool padded copula samples from several parameter sets."""
    rng = np.random.default_rng(seed)
    chunks = []
    for theta in thetas:
        values = sample_register_values(spec, theta, shots_each, rng, noise)
        chunks.append(values_to_unit(values, spec.qubits_per_register, spec.pad_bits, rng))
    return np.concatenate(chunks)


def transfer_config(config: QcbmConfig, theta0) -> QcbmConfig:
    return replace(config, theta0=np.asarray(theta0, dtype=float))
