"""Dense statevector simulation for the qopula gate set.

Conventions (fixed for the whole package):

* qubit 0 is the most significant bit of a basis index and the leftmost
  character of an emitted bitstring;
* ``RZ(t) = exp(i t Z)``, ``RX(t) = exp(i t X)``, ``RXX(t) = exp(i t X_i X_j)``
  with no factor of one half.

Noise is a two-qubit depolarizing channel applied after every two-qubit gate
and is simulated by Pauli trajectories. :func:`density_oracle_probabilities`
is an independent density-matrix path kept for validation on small circuits.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import cos, sin, sqrt

import numpy as np
from scipy.linalg import expm

MAX_QUBITS = 24
DENSITY_MAX_QUBITS = 6

SINGLE_QUBIT_KINDS = ("H", "X", "RZ", "RX")
TWO_QUBIT_KINDS = ("CNOT", "RXX")
ROTATION_KINDS = ("RZ", "RX", "RXX")

_H = np.array([[1, 1], [1, -1]], dtype=complex) / sqrt(2)
_PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    angle: float = 0.0

    def __post_init__(self):
        if self.kind not in SINGLE_QUBIT_KINDS + TWO_QUBIT_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        arity = 2 if self.kind in TWO_QUBIT_KINDS else 1
        if len(self.targets) != arity:
            raise ValueError(f"{self.kind} takes {arity} target(s), got {self.targets}")
        if len(set(self.targets)) != arity:
            raise ValueError(f"{self.kind} targets must be distinct, got {self.targets}")
        if any(q < 0 for q in self.targets):
            raise ValueError(f"negative qubit index in {self.targets}")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT_KINDS


@dataclass
class Circuit:
    """Ordered gate list on a fixed number of qubits.

    The builder methods return ``self`` so circuits can be chained::

        Circuit(2).h(0).cnot(0, 1)
    """

    num_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}")
        for gate in self.gates:
            self._check(gate)

    def _check(self, gate: Gate) -> None:
        if max(gate.targets) >= self.num_qubits:
            raise ValueError(f"gate {gate} out of range for {self.num_qubits} qubits")

    def append(self, gate: Gate) -> Circuit:
        self._check(gate)
        self.gates.append(gate)
        return self

    def extend(self, gates) -> Circuit:
        for gate in gates:
            self.append(gate)
        return self

    def h(self, q: int) -> Circuit:
        return self.append(Gate("H", (q,)))

    def x(self, q: int) -> Circuit:
        return self.append(Gate("X", (q,)))

    def cnot(self, control: int, target: int) -> Circuit:
        return self.append(Gate("CNOT", (control, target)))

    def rz(self, q: int, angle: float) -> Circuit:
        return self.append(Gate("RZ", (q,), float(angle)))

    def rx(self, q: int, angle: float) -> Circuit:
        return self.append(Gate("RX", (q,), float(angle)))

    def rxx(self, i: int, j: int, angle: float) -> Circuit:
        return self.append(Gate("RXX", (i, j), float(angle)))

    def count(self, kind: str) -> int:
        return sum(g.kind == kind for g in self.gates)

    @property
    def two_qubit_gates(self) -> list[Gate]:
        return [g for g in self.gates if g.is_two_qubit]


@dataclass
class QuantumState:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2**self.num_qubits,):
            raise ValueError(
                f"expected {2**self.num_qubits} amplitudes, got shape {self.amplitudes.shape}"
            )

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


@dataclass(frozen=True)
class NoiseConfig:
    p_depol: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.p_depol <= 1.0:
            raise ValueError(f"p_depol must be in [0, 1], got {self.p_depol}")


def zero_state(num_qubits: int) -> QuantumState:
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits}")
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[0] = 1.0
    return QuantumState(num_qubits, amps)


# -- tensor kernels -----------------------------------------------------------
# All kernels act on an array of shape (2,) * n and return a new array.


def _slice(n: int, axis: int, value: int) -> tuple:
    idx = [slice(None)] * n
    idx[axis] = value
    return tuple(idx)


def _apply_matrix_1q(psi: np.ndarray, matrix: np.ndarray, q: int) -> np.ndarray:
    out = np.tensordot(matrix, psi, axes=([1], [q]))
    return np.moveaxis(out, 0, q)


def _apply_pauli(psi: np.ndarray, pauli: int, q: int) -> np.ndarray:
    if pauli == 0:
        return psi
    return _apply_matrix_1q(psi, _PAULIS[pauli], q)


def _apply_gate(psi: np.ndarray, gate: Gate) -> np.ndarray:
    n = psi.ndim
    kind, t = gate.kind, gate.targets
    if kind == "H":
        return _apply_matrix_1q(psi, _H, t[0])
    if kind == "X":
        return np.flip(psi, axis=t[0])
    if kind == "RZ":
        out = psi.copy()
        out[_slice(n, t[0], 0)] *= np.exp(1j * gate.angle)
        out[_slice(n, t[0], 1)] *= np.exp(-1j * gate.angle)
        return out
    if kind == "RX":
        return cos(gate.angle) * psi + 1j * sin(gate.angle) * np.flip(psi, axis=t[0])
    if kind == "RXX":
        return cos(gate.angle) * psi + 1j * sin(gate.angle) * np.flip(psi, axis=t)
    if kind == "CNOT":
        c, tg = t
        out = psi.copy()
        sel = _slice(n, c, 1)
        # after fixing the control axis the target axis shifts down if it came later
        out[sel] = np.flip(psi[sel], axis=tg - (tg > c))
        return out
    raise ValueError(f"unknown gate kind {kind!r}")


def _run(psi: np.ndarray, circuit: Circuit, errors=None) -> np.ndarray:
    """Apply ``circuit`` to tensor ``psi``.

    ``errors`` optionally holds one Pauli-pair code per two-qubit gate
    (0 = no error, 1..15 = ``4 * a + b`` for Paulis ``a`` on the first target
    and ``b`` on the second).
    """
    k = 0
    for gate in circuit.gates:
        psi = _apply_gate(psi, gate)
        if gate.is_two_qubit:
            if errors is not None and errors[k]:
                a, b = divmod(int(errors[k]), 4)
                psi = _apply_pauli(psi, a, gate.targets[0])
                psi = _apply_pauli(psi, b, gate.targets[1])
            k += 1
    return psi


def apply_circuit(state: QuantumState, circuit: Circuit) -> QuantumState:
    if state.num_qubits != circuit.num_qubits:
        raise ValueError(
            f"state has {state.num_qubits} qubits but circuit has {circuit.num_qubits}"
        )
    psi = state.amplitudes.reshape((2,) * state.num_qubits)
    return QuantumState(state.num_qubits, _run(psi, circuit).reshape(-1))


def simulate(circuit: Circuit) -> QuantumState:
    """Run ``circuit`` from ``|0...0>``."""
    return apply_circuit(zero_state(circuit.num_qubits), circuit)


def probabilities(state: QuantumState) -> np.ndarray:
    p = np.abs(state.amplitudes) ** 2
    return p / p.sum()


def format_bitstring(index: int, num_qubits: int) -> str:
    return format(index, f"0{num_qubits}b")


def sample_indices(probs: np.ndarray, shots: int, seed) -> np.ndarray:
    """Draw ``shots`` basis indices from a probability vector."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    p = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    return rng.choice(p.size, size=shots, p=p / p.sum())


def sample_shots(state: QuantumState, shots: int, seed) -> dict[str, int]:
    """Born-rule measurement of every qubit, returned as bitstring counts."""
    idx = sample_indices(probabilities(state), shots, seed)
    counts = Counter(idx.tolist())
    return {format_bitstring(i, state.num_qubits): c for i, c in sorted(counts.items())}


# -- depolarizing noise ---------------------------------------------------------


def draw_error_patterns(num_two_qubit: int, p: float, count: int, seed) -> np.ndarray:
    """Sample ``count`` trajectories' error codes, shape ``(count, num_two_qubit)``.

    Each entry is 0 with probability ``1 - p`` and otherwise uniform over the
    15 non-identity two-qubit Paulis (codes 1..15).
    """
    rng = np.random.default_rng(seed)
    hit = rng.random((count, num_two_qubit)) < p
    which = rng.integers(1, 16, size=(count, num_two_qubit))
    return np.where(hit, which, 0).astype(np.int8)


def apply_noisy_circuit(circuit: Circuit, noise: NoiseConfig, seed) -> QuantumState:
    """One stochastic Pauli trajectory of ``circuit`` started from ``|0...0>``."""
    errors = draw_error_patterns(len(circuit.two_qubit_gates), noise.p_depol, 1, seed)[0]
    psi = zero_state(circuit.num_qubits).amplitudes.reshape((2,) * circuit.num_qubits)
    return QuantumState(circuit.num_qubits, _run(psi, circuit, errors).reshape(-1))


def _grouped_trajectories(circuit: Circuit, noise: NoiseConfig, count: int, seed):
    """Yield ``(probabilities, multiplicity)`` for each distinct error pattern."""
    patterns = draw_error_patterns(len(circuit.two_qubit_gates), noise.p_depol, count, seed)
    if patterns.shape[1] == 0:
        patterns = np.zeros((count, 1), dtype=np.int8)
    uniq, inverse, mult = np.unique(patterns, axis=0, return_inverse=True, return_counts=True)
    zero = zero_state(circuit.num_qubits).amplitudes.reshape((2,) * circuit.num_qubits)
    probs = []
    for row in uniq:
        psi = _run(zero, circuit, row)
        probs.append(np.abs(psi.reshape(-1)) ** 2)
    return np.array(probs), mult, inverse.reshape(-1)


def trajectory_statistics(
    circuit: Circuit, noise: NoiseConfig, trajectories: int, seed
) -> tuple[np.ndarray, np.ndarray]:
    """Mean and standard error of per-trajectory outcome probabilities.

    Trajectories that share an error pattern have identical states, so each
    distinct pattern is simulated once and weighted by its multiplicity.
    """
    probs, mult, _ = _grouped_trajectories(circuit, noise, trajectories, seed)
    w = mult / trajectories
    mean = w @ probs
    var = w @ (probs - mean) ** 2
    if trajectories > 1:
        var *= trajectories / (trajectories - 1)
    return mean, np.sqrt(var / trajectories)


def sample_noisy_indices(circuit: Circuit, noise: NoiseConfig, shots: int, seed) -> np.ndarray:
    """Measure ``shots`` independent noisy trajectories, one shot each."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    probs, _, which = _grouped_trajectories(circuit, noise, shots, rng)
    out = np.empty(shots, dtype=np.int64)
    for g in range(len(probs)):
        members = np.flatnonzero(which == g)
        p = probs[g] / probs[g].sum()
        out[members] = rng.choice(p.size, size=members.size, p=p)
    return out


# -- density-matrix oracle ------------------------------------------------------


def _embed(ops: dict[int, np.ndarray], n: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for q in range(n):
        out = np.kron(out, ops.get(q, _PAULIS[0]))
    return out


def _gate_unitary(gate: Gate, n: int) -> np.ndarray:
    X, Z = _PAULIS[1], _PAULIS[3]
    t = gate.targets
    if gate.kind == "H":
        return _embed({t[0]: _H}, n)
    if gate.kind == "X":
        return _embed({t[0]: X}, n)
    if gate.kind == "RZ":
        return expm(1j * gate.angle * _embed({t[0]: Z}, n))
    if gate.kind == "RX":
        return expm(1j * gate.angle * _embed({t[0]: X}, n))
    if gate.kind == "RXX":
        return expm(1j * gate.angle * _embed({t[0]: X, t[1]: X}, n))
    if gate.kind == "CNOT":
        p0 = np.diag([1, 0]).astype(complex)
        p1 = np.diag([0, 1]).astype(complex)
        return _embed({t[0]: p0}, n) + _embed({t[0]: p1, t[1]: X}, n)
    raise ValueError(f"unknown gate kind {gate.kind!r}")


def density_oracle_probabilities(circuit: Circuit, noise: NoiseConfig) -> np.ndarray:
    """Exact outcome probabilities under the depolarizing channel.

    Evolves the full density matrix with dense Kronecker-built unitaries and
    applies ``(1 - p) rho + p/15 * sum_{P != I} P rho P`` after each
    two-qubit gate.
    """
    n = circuit.num_qubits
    if n > DENSITY_MAX_QUBITS:
        raise ValueError(f"density oracle limited to {DENSITY_MAX_QUBITS} qubits, got {n}")
    dim = 2**n
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    p = noise.p_depol
    for gate in circuit.gates:
        u = _gate_unitary(gate, n)
        rho = u @ rho @ u.conj().T
        if gate.is_two_qubit and p > 0:
            i, j = gate.targets
            mixed = np.zeros_like(rho)
            for a in range(4):
                for b in range(4):
                    if a == b == 0:
                        continue
                    P = _embed({i: _PAULIS[a], j: _PAULIS[b]}, n)
                    mixed += P @ rho @ P
            rho = (1 - p) * rho + (p / 15) * mixed
    return np.real(np.diag(rho)).copy()
