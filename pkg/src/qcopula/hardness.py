"""IQP output distributions recovered as a post-selected qopula conditional.

With register B left untouched, conditioning on B measuring all zeros
leaves register A in ``U_A|0...0>``. A single ansatz layer whose RZ angles
are zero is ``prod exp(i J_kl X_k X_l) prod exp(i M_k X_k)``, which equals
``H^n exp(i D) H^n`` with ``D = sum_{k<l} J_kl Z_k Z_l + sum_k M_k Z_k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.linalg import hadamard

from .qopula import QopulaSpec, exact_distribution, layer_size, local_ansatz_circuit, register_params
from .statevec import probabilities, simulate

IQP_MAX_QUBITS = 10
REDUCTION_MAX_QUBITS = 8


@dataclass(frozen=True)
class IqpInstance:
    J: np.ndarray
    M: np.ndarray

    def __post_init__(self):
        J = np.asarray(self.J, dtype=float)
        M = np.asarray(self.M, dtype=float).ravel()
        n = M.size
        if J.shape != (n, n):
            raise ValueError(f"J must be {n}x{n}, got {J.shape}")
        if not np.allclose(J, J.T) or np.any(np.diag(J) != 0):
            raise ValueError("J must be symmetric with zero diagonal")
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "M", M)

    @property
    def n(self) -> int:
        return self.M.size

    @classmethod
    def random(cls, n: int, seed) -> IqpInstance:
        rng = np.random.default_rng(seed)
        upper = np.triu(rng.uniform(0, 2 * np.pi, (n, n)), 1)
        return cls(upper + upper.T, rng.uniform(0, 2 * np.pi, n))


def _spins(n: int) -> np.ndarray:
    """``Z`` eigenvalues (+1 for bit 0) of every basis state, qubit 0 most significant."""
    idx = np.arange(2**n)
    bits = (idx[:, None] >> np.arange(n - 1, -1, -1)) & 1
    return 1 - 2 * bits


def iqp_distribution(instance: IqpInstance) -> np.ndarray:
    """``|<z| H^n exp(iD) H^n |0^n>|^2`` for every ``z``."""
    n = instance.n
    if n > IQP_MAX_QUBITS:
        raise ValueError(f"IQP distribution limited to {IQP_MAX_QUBITS} qubits")
    s = _spins(n)
    iu, ju = np.triu_indices(n, 1)
    diag = (s[:, iu] * s[:, ju]) @ instance.J[iu, ju] + s @ instance.M
    wh = hadamard(2**n) / np.sqrt(2**n)
    amps = wh @ (np.exp(1j * diag) * wh[:, 0])
    return np.abs(amps) ** 2


def reduction_theta(instance: IqpInstance, layers: int = 1) -> tuple[QopulaSpec, np.ndarray]:
    """Qopula angles that embed ``instance`` in register A with register B idle."""
    n = instance.n
    spec = QopulaSpec(num_vars=2, qubits_per_register=n, layers=layers, pad_bits=0)
    block = np.zeros(layer_size(n))
    block[n:2 * n] = instance.M
    block[3 * n:] = [instance.J[i, j] for i, j in combinations(range(n), 2)]
    theta_a = np.zeros(layers * layer_size(n))
    theta_a[: layer_size(n)] = block
    return spec, np.concatenate([theta_a, np.zeros_like(theta_a)])


def qopula_conditional(spec: QopulaSpec, theta) -> np.ndarray:
    """Distribution of register A given register B reads all zeros."""
    if spec.num_vars != 2:
        raise ValueError("the conditional is defined for two registers")
    if np.any(register_params(spec, theta, 1) != 0):
        raise ValueError("register-B angles must all be zero")
    joint = exact_distribution(spec, theta)
    event = joint[:, 0].sum()
    if event <= 0:
        raise ValueError("conditioning event has zero probability")
    return joint[:, 0] / event


def conditioning_probability(spec: QopulaSpec, theta) -> float:
    return float(exact_distribution(spec, theta)[:, 0].sum())


def local_distribution(spec: QopulaSpec, theta) -> np.ndarray:
    """Direct n-qubit simulation of ``U_A|0...0>``."""
    circ = local_ansatz_circuit(spec.qubits_per_register, spec.layers, register_params(spec, theta, 0))
    return probabilities(simulate(circ))


def verify_iqp_reduction(instance: IqpInstance) -> float:
    """Largest absolute gap between the qopula conditional and the IQP distribution."""
    if instance.n > REDUCTION_MAX_QUBITS:
        raise ValueError(f"reduction check limited to {REDUCTION_MAX_QUBITS} qubits")
    spec, theta = reduction_theta(instance)
    return float(np.max(np.abs(qopula_conditional(spec, theta) - iqp_distribution(instance))))
