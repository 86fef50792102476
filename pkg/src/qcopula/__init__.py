"""Copula generative modelling with variational quantum circuits.

The copula of two variables is learned by a circuit whose two qubit
registers start in a Bell/GHZ-type state, which makes every register
marginal exactly uniform. Training is by KL divergence (Born machine) or
adversarially (quantum GAN); classical GAN and Gaussian copula baselines
are included for comparison.
"""
from .qopula import QopulaSpec, exact_distribution, param_count, sample_copula_points
from .statevec import Circuit, NoiseConfig, simulate

__all__ = [
    "Circuit",
    "NoiseConfig",
    "QopulaSpec",
    "exact_distribution",
    "param_count",
    "sample_copula_points",
    "simulate",
]
__version__ = "0.1.0"
