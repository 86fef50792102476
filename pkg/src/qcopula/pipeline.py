"""Transform, fit, sample, back-transform and evaluate.

The marginals are modelled by empirical CDFs of the training returns; only
the dependence structure is learned, in copula space.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .copula import EmpiricalCdf, bin_2d, bootstrap, pit_transform_columns
from .datasets import paired_returns, read_points_csv, read_prices_csv, write_points_csv
from .evaluation import EvaluationReport, evaluate_samples
from .models import (
    CganConfig,
    GaussianCopulaModel,
    QcbmConfig,
    QganConfig,
    fit_gaussian_copula,
    generate,
    sample_circuits,
    sample_gaussian_copula,
    train_classical_gan,
    train_qcbm,
    train_qgan,
)
from .nnet import Mlp
from .optim import SpsaConfig
from .qopula import QopulaSpec, load_params, param_count, sample_copula_points, save_params, transfer_params
from .statevec import NoiseConfig

MODELS = ("qcbm", "qgan", "cgan", "gaussian")
QCBM_TOP_K = 4
SAMPLE_COUNT = {"qcbm": 2000, "qgan": 2048, "cgan": 2048, "gaussian": 2048}
# u values from a sigmoid or normal CDF can round to exactly 0 or 1
_U_EPS = 1e-12


def ingest(prices_csv, returns_csv=None) -> np.ndarray:
    _, prices, _ = read_prices_csv(prices_csv)
    returns = paired_returns(prices)
    if returns_csv is not None:
        write_points_csv(returns_csv, returns, ("r1", "r2"))
    return returns


def load_returns(path) -> np.ndarray:
    header, data = read_points_csv(path)
    if header != ("r1", "r2"):
        raise ValueError(f"returns CSV must have header r1,r2, got {','.join(header)}")
    if len(data) < 2:
        raise ValueError("need at least two return rows")
    return data


@dataclass(frozen=True)
class Marginals:
    """Per-column empirical CDFs of the training data."""

    cdfs: tuple[EmpiricalCdf, ...]

    @classmethod
    def fit(cls, data) -> Marginals:
        data = np.asarray(data, dtype=float)
        return cls(tuple(EmpiricalCdf.from_sample(col) for col in data.T))

    def to_data(self, u) -> np.ndarray:
        u = np.clip(np.asarray(u, dtype=float), _U_EPS, 1 - _U_EPS)
        return np.column_stack([cdf.quantile(col) for cdf, col in zip(self.cdfs, u.T)])


@dataclass
class RunConfig:
    """Hyperparameters shared by the training and sampling commands.

    ``None`` fields fall back to the per-model defaults in :func:`resolve`.
    """

    seed: int
    qubits: int = 6
    layers: int = 1
    pad_bits: int = 20
    shots: int | None = None
    iterations: int | None = None
    a: float | None = None
    c: float | None = None
    gamma: float = 0.101
    n_inner: int = 5
    lr_disc: float = 0.0015
    lr: float = 0.0001
    batch: int = 2048
    noise_p: float = 0.0
    permutations: int = 1000
    samples: int | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.seed is None:
            raise ValueError("a seed is required")
        if self.qubits < 2 or self.qubits % 2:
            raise ValueError(f"--qubits is the total over both registers and must be even, got {self.qubits}")

    @property
    def spec(self) -> QopulaSpec:
        return QopulaSpec(2, self.qubits // 2, self.layers, self.pad_bits)

    @property
    def noise(self) -> NoiseConfig | None:
        return NoiseConfig(self.noise_p) if self.noise_p > 0 else None


_DEFAULTS = {
    "qcbm": {"shots": 500, "iterations": 200, "a": 0.5, "c": 0.5},
    "qgan": {"iterations": 1000, "a": 0.008, "c": 0.01},
    "cgan": {"iterations": 20000},
    "gaussian": {},
}


def resolve(config: RunConfig, model: str, key: str):
    value = getattr(config, key)
    return _DEFAULTS[model].get(key) if value is None else value


def qcbm_config(config: RunConfig, u, theta0=None) -> QcbmConfig:
    spec = config.spec
    spsa = SpsaConfig(
        resolve(config, "qcbm", "a"), resolve(config, "qcbm", "c"), config.gamma, resolve(config, "qcbm", "iterations")
    )
    return QcbmConfig(
        bin_2d(u, spec.bins), spec, spsa, resolve(config, "qcbm", "shots"),
        noise=config.noise, seed=config.seed, theta0=theta0,
    )


def qgan_config(config: RunConfig) -> QganConfig:
    spsa = SpsaConfig(resolve(config, "qgan", "a"), resolve(config, "qgan", "c"), config.gamma, config.n_inner)
    return QganConfig(
        config.spec, config.batch, resolve(config, "qgan", "iterations"), spsa,
        disc_lr=config.lr_disc, seed=config.seed, noise=config.noise,
    )


def save_qcbm_top(path, spec: QopulaSpec, thetas) -> None:
    payload = {
        "d": spec.num_vars,
        "n": spec.qubits_per_register,
        "layers": spec.layers,
        "pad_bits": spec.pad_bits,
        "thetas": [[float(t) for t in theta] for theta in thetas],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_circuits(path) -> tuple[QopulaSpec, list[np.ndarray]]:
    """Read a single-angle checkpoint or a top-k list of angle sets."""
    payload = json.loads(Path(path).read_text())
    if "thetas" in payload:
        spec = QopulaSpec(payload["d"], payload["n"], payload["layers"], payload["pad_bits"])
        thetas = [np.asarray(theta, dtype=float) for theta in payload["thetas"]]
        expected = param_count(spec)
        if not thetas or any(t.shape != (expected,) for t in thetas):
            raise ValueError(f"every angle set must have {expected} entries")
        return spec, thetas
    spec, theta = load_params(path)
    return spec, [theta]


def train(model: str, u, config: RunConfig, out_dir) -> dict:
    """Fit ``model`` to copula-space points ``u`` and write its log and checkpoint.

    Returns the checkpoint paths keyed by role.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    log_path = out / f"{model}_log.jsonl"
    if model == "qcbm":
        theta0 = None
        init = config.extra.get("init_from")
        if init is not None:
            small, theta_small = load_params(init)
            theta0 = transfer_params(theta_small, small, config.spec)
        result = train_qcbm(qcbm_config(config, u, theta0), log_path)
        save_params(out / "qcbm_params.json", config.spec, result.theta)
        save_qcbm_top(out / "qcbm_top.json", config.spec, result.best_thetas(QCBM_TOP_K))
        return {"log": log_path, "checkpoint": out / "qcbm_top.json", "params": out / "qcbm_params.json"}
    if model == "qgan":
        result = train_qgan(qgan_config(config), u, log_path)
        save_params(out / "qgan_params.json", config.spec, result.theta)
        result.discriminator.save(out / "qgan_discriminator.json")
        return {"log": log_path, "checkpoint": out / "qgan_params.json"}
    if model == "cgan":
        cfg = CganConfig(config.batch, resolve(config, "cgan", "iterations"), config.lr, config.seed)
        result = train_classical_gan(cfg, u, log_path)
        result.generator.save(out / "cgan_generator.json")
        result.discriminator.save(out / "cgan_discriminator.json")
        return {"log": log_path, "checkpoint": out / "cgan_generator.json"}
    if model == "gaussian":
        fit_gaussian_copula(u).save(out / "gaussian.json")
        return {"checkpoint": out / "gaussian.json"}
    raise ValueError(f"unknown model {model!r}; choose from {MODELS}")


def sample(model: str, checkpoint, count: int, seed, noise_p: float = 0.0) -> np.ndarray:
    """Copula-space samples from a saved model."""
    if count < 1:
        raise ValueError("count must be >= 1")
    noise = NoiseConfig(noise_p) if noise_p > 0 else None
    if model in ("qcbm", "qgan"):
        spec, thetas = load_circuits(checkpoint)
        if len(thetas) == 1:
            return sample_copula_points(spec, thetas[0], count, seed, noise)
        if count % len(thetas):
            raise ValueError(f"count {count} is not a multiple of {len(thetas)} circuits")
        return sample_circuits(spec, thetas, count // len(thetas), seed, noise)
    if model == "cgan":
        return generate(Mlp.load(checkpoint), count, seed)
    if model == "gaussian":
        return sample_gaussian_copula(GaussianCopulaModel.load(checkpoint), count, seed)
    raise ValueError(f"unknown model {model!r}; choose from {MODELS}")


def evaluate(model: str, samples, training, permutations: int = 1000, seed=0) -> EvaluationReport:
    """KS test of ``samples`` against a same-size-as-training bootstrap of ``training``."""
    reference = bootstrap(training, None, [seed, 1])
    return evaluate_samples(model, samples, reference, permutations, seed)


def run_pipeline(returns, model: str, config: RunConfig, out_dir) -> EvaluationReport:
    """Transform, fit, sample, back-transform and evaluate in data space."""
    returns = np.asarray(returns, dtype=float)
    out = Path(out_dir)
    u = pit_transform_columns(returns)
    paths = train(model, u, config, out)
    count = config.samples or SAMPLE_COUNT[model]
    u_gen = sample(model, paths["checkpoint"], count, [config.seed, 2], config.noise_p)
    x_gen = Marginals.fit(returns).to_data(u_gen)
    write_points_csv(out / f"{model}_samples.csv", x_gen, ("x1", "x2"))
    report = evaluate(model, x_gen, returns, config.permutations, config.seed)
    report.save(out / f"{model}_report.json")
    return report
