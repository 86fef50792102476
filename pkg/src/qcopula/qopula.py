"""The qopula ansatz: GHZ/Bell entangler plus per-register local unitaries.

Register ``r`` owns qubits ``r*n .. r*n + n - 1``. Because the entangler
leaves every register maximally mixed and the trainable part acts locally,
each register's measurement marginal is exactly uniform for any angles,
so the sampled points always form a copula.

Parameter layout is register-major, then layer, then gate order inside a
layer: ``n`` RZ, ``n`` RX, ``n`` RZ, then RXX over pairs ``(i, j)``, ``i < j``,
in lexicographic order.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .statevec import (
    MAX_QUBITS,
    Circuit,
    NoiseConfig,
    probabilities,
    sample_indices,
    sample_noisy_indices,
    simulate,
)


@dataclass(frozen=True)
class QopulaSpec:
    num_vars: int = 2
    qubits_per_register: int = 3
    layers: int = 1
    pad_bits: int = 20

    def __post_init__(self):
        if self.num_vars < 2:
            raise ValueError(f"num_vars must be >= 2, got {self.num_vars}")
        if self.qubits_per_register < 1:
            raise ValueError(f"qubits_per_register must be >= 1, got {self.qubits_per_register}")
        if self.layers < 1:
            raise ValueError(f"layers must be >= 1, got {self.layers}")
        if self.pad_bits < 0:
            raise ValueError(f"pad_bits must be >= 0, got {self.pad_bits}")
        if self.num_qubits > MAX_QUBITS:
            raise ValueError(f"{self.num_qubits} qubits exceeds simulator cap {MAX_QUBITS}")
        if self.qubits_per_register + self.pad_bits > 60:
            raise ValueError("at most 60 bits per variable are supported")

    @property
    def num_qubits(self) -> int:
        return self.num_vars * self.qubits_per_register

    @property
    def bins(self) -> int:
        return 2**self.qubits_per_register

    def register(self, r: int) -> list[int]:
        n = self.qubits_per_register
        return list(range(r * n, (r + 1) * n))


def layer_size(n: int) -> int:
    return 3 * n + n * (n - 1) // 2


def param_count(spec: QopulaSpec) -> int:
    return spec.num_vars * spec.layers * layer_size(spec.qubits_per_register)


def entangler_circuit(d: int, n: int) -> Circuit:
    """``n`` GHZ states over ``d`` registers (Bell pairs when ``d == 2``)."""
    if d < 2 or n < 1:
        raise ValueError(f"need d >= 2 and n >= 1, got d={d}, n={n}")
    circ = Circuit(d * n)
    for j in range(n):
        circ.h(j)
        for r in range(1, d):
            circ.cnot(j, r * n + j)
    return circ


def _append_local(circ: Circuit, qubits: list[int], layers: int, params: np.ndarray) -> None:
    n = len(qubits)
    it = iter(params)
    pairs = list(combinations(range(n), 2))
    for _ in range(layers):
        for q in qubits:
            circ.rz(q, next(it))
        for q in qubits:
            circ.rx(q, next(it))
        for q in qubits:
            circ.rz(q, next(it))
        for i, j in pairs:
            circ.rxx(qubits[i], qubits[j], next(it))


def local_ansatz_circuit(n: int, layers: int, register_params) -> Circuit:
    """The driver/entangler layers for a single register of ``n`` qubits."""
    params = np.asarray(register_params, dtype=float).ravel()
    expected = layers * layer_size(n)
    if params.size != expected:
        raise ValueError(f"expected {expected} angles for n={n}, L={layers}, got {params.size}")
    circ = Circuit(n)
    _append_local(circ, list(range(n)), layers, params)
    return circ


def _check_theta(spec: QopulaSpec, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.size != param_count(spec):
        raise ValueError(f"theta has {theta.size} entries, spec needs {param_count(spec)}")
    return theta


def register_params(spec: QopulaSpec, theta, r: int) -> np.ndarray:
    theta = _check_theta(spec, theta)
    per = spec.layers * layer_size(spec.qubits_per_register)
    return theta[r * per:(r + 1) * per]


def assemble(spec: QopulaSpec, theta) -> Circuit:
    theta = _check_theta(spec, theta)
    circ = entangler_circuit(spec.num_vars, spec.qubits_per_register)
    for r in range(spec.num_vars):
        _append_local(circ, spec.register(r), spec.layers, register_params(spec, theta, r))
    return circ


def exact_distribution(spec: QopulaSpec, theta) -> np.ndarray:
    """Joint outcome probabilities as an array of shape ``(2**n,) * d``."""
    probs = probabilities(simulate(assemble(spec, theta)))
    return probs.reshape((spec.bins,) * spec.num_vars)


def register_marginals(spec: QopulaSpec, theta) -> np.ndarray:
    """Exact per-register marginals, shape ``(d, 2**n)``."""
    joint = exact_distribution(spec, theta)
    d = spec.num_vars
    return np.array([joint.sum(axis=tuple(a for a in range(d) if a != r)) for r in range(d)])


def split_registers(indices: np.ndarray, spec: QopulaSpec) -> np.ndarray:
    """Basis indices -> per-register integer values, shape ``(shots, d)``."""
    n, d = spec.qubits_per_register, spec.num_vars
    indices = np.asarray(indices, dtype=np.int64)
    shifts = n * np.arange(d - 1, -1, -1)
    return (indices[:, None] >> shifts) & (2**n - 1)


def sample_register_values(spec: QopulaSpec, theta, shots: int, seed, noise: NoiseConfig | None = None):
    """Measured register integers for ``shots`` runs of the circuit."""
    circ = assemble(spec, theta)
    if noise is None or noise.p_depol == 0:
        idx = sample_indices(probabilities(simulate(circ)), shots, seed)
    else:
        idx = sample_noisy_indices(circ, noise, shots, seed)
    return split_registers(idx, spec)


def bits_to_unit(bits) -> float:
    """Centre of the bin addressed by an MSB-first bit vector."""
    bits = [int(b) for b in bits]
    if not bits:
        raise ValueError("bits must be non-empty")
    if len(bits) > 60:
        raise ValueError(f"at most 60 bits supported, got {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"bits must be 0/1, got {bits}")
    k = 0
    for b in bits:
        k = (k << 1) | b
    return (k + 0.5) / 2 ** len(bits)


def values_to_unit(values: np.ndarray, n: int, pad_bits: int, seed) -> np.ndarray:
    """Vectorised :func:`bits_to_unit` with random less-significant padding."""
    values = np.asarray(values, dtype=np.int64)
    rng = np.random.default_rng(seed)
    if pad_bits:
        low = rng.integers(0, 2**pad_bits, size=values.shape, dtype=np.int64)
        k = (values << pad_bits) | low
    else:
        k = values
    return (k.astype(float) + 0.5) / 2.0 ** (n + pad_bits)


def sample_copula_points(
    spec: QopulaSpec, theta, shots: int, seed, noise: NoiseConfig | None = None
) -> np.ndarray:
    """Sample ``shots`` points in ``(0, 1)^d`` from the circuit."""
    rng = np.random.default_rng(seed)
    values = sample_register_values(spec, theta, shots, rng, noise)
    return values_to_unit(values, spec.qubits_per_register, spec.pad_bits, rng)


def random_theta(spec: QopulaSpec, seed) -> np.ndarray:
    return np.random.default_rng(seed).uniform(0.0, 2 * np.pi, param_count(spec))


def transfer_params(theta_small, small: QopulaSpec, large: QopulaSpec) -> np.ndarray:
    """Embed angles of a smaller ansatz into a larger one.

    Gates present in both (same register, layer, kind and qubit indices)
    keep their angle; every new gate starts at zero.
    """
    if small.num_vars != large.num_vars or small.layers != large.layers:
        raise ValueError("transfer requires equal num_vars and layers")
    ns, nl = small.qubits_per_register, large.qubits_per_register
    if ns > nl:
        raise ValueError("source ansatz is larger than target")
    theta_small = _check_theta(small, theta_small)
    out = np.zeros(param_count(large))
    pairs_l = {p: k for k, p in enumerate(combinations(range(nl), 2))}
    pairs_s = list(combinations(range(ns), 2))
    for r in range(small.num_vars):
        for layer in range(small.layers):
            src = (r * small.layers + layer) * layer_size(ns)
            dst = (r * large.layers + layer) * layer_size(nl)
            for block in range(3):
                out[dst + block * nl: dst + block * nl + ns] = theta_small[src + block * ns: src + (block + 1) * ns]
            for k, pair in enumerate(pairs_s):
                out[dst + 3 * nl + pairs_l[pair]] = theta_small[src + 3 * ns + k]
    return out


def save_params(path, spec: QopulaSpec, theta) -> None:
    theta = _check_theta(spec, theta)
    payload = {
        "d": spec.num_vars,
        "n": spec.qubits_per_register,
        "layers": spec.layers,
        "pad_bits": spec.pad_bits,
        "theta": [float(t) for t in theta],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_params(path) -> tuple[QopulaSpec, np.ndarray]:
    payload = json.loads(Path(path).read_text())
    spec = QopulaSpec(payload["d"], payload["n"], payload["layers"], payload["pad_bits"])
    return spec, _check_theta(spec, payload["theta"])
