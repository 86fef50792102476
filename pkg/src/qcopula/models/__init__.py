from .cgan import CganConfig, CganResult, generate, train_classical_gan
from .gaussian import GaussianCopulaModel, fit_gaussian_copula, normal_quantile, sample_gaussian_copula
from .losses import discriminator_loss, generator_loss, kl_divergence, qcbm_cost
from .qcbm import QcbmConfig, QcbmResult, sample_circuits, train_qcbm
from .qgan import QganConfig, QganResult, train_qgan

__all__ = [
    "CganConfig",
    "CganResult",
    "GaussianCopulaModel",
    "QcbmConfig",
    "QcbmResult",
    "QganConfig",
    "QganResult",
    "discriminator_loss",
    "fit_gaussian_copula",
    "generate",
    "generator_loss",
    "kl_divergence",
    "normal_quantile",
    "qcbm_cost",
    "sample_circuits",
    "sample_gaussian_copula",
    "train_classical_gan",
    "train_qcbm",
    "train_qgan",
]
