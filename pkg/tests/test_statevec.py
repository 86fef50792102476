import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcopula.statevec import (
    Circuit,
    Gate,
    NoiseConfig,
    QuantumState,
    apply_circuit,
    apply_noisy_circuit,
    density_oracle_probabilities,
    draw_error_patterns,
    probabilities,
    sample_noisy_indices,
    sample_shots,
    simulate,
    trajectory_statistics,
    zero_state,
)

SQ = 1 / np.sqrt(2)


def bell():
    return Circuit(2).h(0).cnot(0, 1)


def random_state(n, rng):
    amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return QuantumState(n, amps / np.linalg.norm(amps))


def random_circuit(n, gates, rng):
    circ = Circuit(n)
    for _ in range(gates):
        kind = rng.choice(["H", "X", "RZ", "RX", "RXX", "CNOT"] if n > 1 else ["H", "X", "RZ", "RX"])
        if kind in ("RXX", "CNOT"):
            i, j = rng.choice(n, 2, replace=False)
            circ.append(Gate(kind, (int(i), int(j)), rng.uniform(-np.pi, np.pi) if kind == "RXX" else 0.0))
        else:
            q = int(rng.integers(n))
            circ.append(Gate(kind, (q,), rng.uniform(-np.pi, np.pi) if kind.startswith("R") else 0.0))
    return circ


def test_zero_state_amplitudes():
    assert np.array_equal(zero_state(2).amplitudes, [1, 0, 0, 0])
    assert np.array_equal(zero_state(1).amplitudes, [1, 0])
    with pytest.raises(ValueError):
        zero_state(25)


def test_hadamard_and_bell():
    out = apply_circuit(zero_state(1), Circuit(1).h(0))
    assert np.allclose(out.amplitudes, [SQ, SQ])
    assert np.allclose(probabilities(simulate(bell())), [0.5, 0, 0, 0.5])


def test_rx_convention():
    probs = probabilities(simulate(Circuit(1).rx(0, np.pi / 4)))
    assert np.allclose(probs, [np.cos(np.pi / 4) ** 2, np.sin(np.pi / 4) ** 2])
    # exp(i t X)|0> = cos t |0> + i sin t |1>
    amps = simulate(Circuit(1).rx(0, 0.3)).amplitudes
    assert np.allclose(amps, [np.cos(0.3), 1j * np.sin(0.3)])


def test_rz_phase_convention():
    amps = simulate(Circuit(1).h(0).rz(0, 0.4)).amplitudes
    assert np.allclose(amps, [SQ * np.exp(0.4j), SQ * np.exp(-0.4j)])


def test_qubit_zero_is_msb():
    probs = probabilities(simulate(Circuit(3).x(0)))
    assert probs[0b100] == pytest.approx(1.0)


def test_probabilities_of_named_states():
    assert np.allclose(probabilities(zero_state(3)), np.eye(8)[0])
    ghz = Circuit(3).h(0).cnot(0, 1).cnot(0, 2)
    expected = np.zeros(8)
    expected[[0, 7]] = 0.5
    assert np.allclose(probabilities(simulate(ghz)), expected)


def test_sample_shots_excludes_zero_probability_outcomes():
    counts = sample_shots(simulate(bell()), 500, seed=1)
    assert set(counts) <= {"00", "11"}
    assert sum(counts.values()) == 500
    assert sample_shots(zero_state(1), 37, seed=2) == {"0": 37}


def test_sample_shots_binomial_bound():
    shots = 10**5
    counts = sample_shots(simulate(bell()), shots, seed=3)
    sigma = np.sqrt(0.25 / shots)
    assert abs(counts["00"] / shots - 0.5) <= 5 * sigma


def test_sampling_is_seeded():
    state = simulate(Circuit(2).rx(0, 0.7).rxx(0, 1, 0.4))
    assert sample_shots(state, 200, 9) == sample_shots(state, 200, 9)


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("CNOT", (0, 0))
    with pytest.raises(ValueError):
        Gate("RY", (0,))
    with pytest.raises(ValueError):
        Circuit(2).h(2)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(0, 200), st.integers(0, 2**32 - 1))
def test_norm_preserved(n, gates, seed):
    rng = np.random.default_rng(seed)
    out = apply_circuit(random_state(n, rng), random_circuit(n, gates, rng))
    assert abs(out.norm() - 1) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(st.floats(-10, 10), st.integers(0, 2**32 - 1))
def test_rotations_invert(theta, seed):
    rng = np.random.default_rng(seed)
    state = random_state(3, rng)
    for forward, backward in (
        (Circuit(3).rx(1, theta), Circuit(3).rx(1, -theta)),
        (Circuit(3).rz(2, theta), Circuit(3).rz(2, -theta)),
        (Circuit(3).rxx(0, 2, theta), Circuit(3).rxx(0, 2, -theta)),
    ):
        back = apply_circuit(apply_circuit(state, forward), backward)
        assert np.allclose(back.amplitudes, state.amplitudes, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(-10, 10), st.integers(0, 2**32 - 1), st.sampled_from([(0, 1), (2, 0), (1, 3)]))
def test_rxx_decomposition(theta, seed, pair):
    i, j = pair
    state = random_state(4, np.random.default_rng(seed))
    direct = apply_circuit(state, Circuit(4).rxx(i, j, theta))
    decomposed = apply_circuit(state, Circuit(4).cnot(i, j).rx(i, theta).cnot(i, j))
    assert np.allclose(direct.amplitudes, decomposed.amplitudes, atol=1e-10)


def test_simulator_matches_dense_unitaries():
    rng = np.random.default_rng(4)
    for _ in range(10):
        circ = random_circuit(4, 30, rng)
        exact = density_oracle_probabilities(circ, NoiseConfig(0.0))
        assert np.allclose(probabilities(simulate(circ)), exact, atol=1e-12)


def test_zero_noise_trajectory_equals_ideal():
    circ = Circuit(3).h(0).cnot(0, 1).rxx(1, 2, 0.3).rx(2, 1.1)
    noisy = apply_noisy_circuit(circ, NoiseConfig(0.0), seed=5)
    assert np.allclose(noisy.amplitudes, simulate(circ).amplitudes)


def test_error_pattern_statistics():
    pats = draw_error_patterns(3, 0.3, 20000, seed=6)
    assert pats.shape == (20000, 3)
    frac = np.mean(pats != 0)
    assert abs(frac - 0.3) < 5 * np.sqrt(0.3 * 0.7 / 60000)
    assert set(np.unique(pats[pats != 0])) == set(range(1, 16))


def test_full_depolarization_leaves_uniform_marginals():
    bell_p1 = density_oracle_probabilities(bell(), NoiseConfig(1.0)).reshape(2, 2)
    assert np.allclose(bell_p1.sum(axis=0), [0.5, 0.5], atol=1e-12)
    assert np.allclose(bell_p1.sum(axis=1), [0.5, 0.5], atol=1e-12)
    mean, se = trajectory_statistics(bell(), NoiseConfig(1.0), 10**5, seed=7)
    marg = mean.reshape(2, 2).sum(axis=1)
    assert np.all(np.abs(marg - 0.5) <= 3 * se.reshape(2, 2).sum(axis=1) + 1e-12)


def test_depolarized_bell_closed_form():
    # channel algebra: of the 15 Paulis, the 8 with exactly one of X/Y on
    # each side flip parity; an error therefore sends half the weight across
    p = 0.04
    probs = density_oracle_probabilities(bell(), NoiseConfig(p))
    flip = p * 8 / 15
    assert np.allclose(probs, [(1 - flip) / 2, flip / 2, flip / 2, (1 - flip) / 2], atol=1e-12)


@pytest.mark.parametrize("p", [0.0, 0.04, 0.5, 1.0])
def test_trajectories_match_density_oracle(p):
    circ = Circuit(2).h(0).cnot(0, 1).rx(0, 0.4).rxx(0, 1, 0.9).rz(1, 0.3).h(1)
    mean, se = trajectory_statistics(circ, NoiseConfig(p), 10**5, seed=11)
    exact = density_oracle_probabilities(circ, NoiseConfig(p))
    assert np.all(np.abs(mean - exact) <= 3 * se + 1e-12)


def test_trajectories_are_seeded():
    circ = bell().rxx(0, 1, 0.2)
    a = trajectory_statistics(circ, NoiseConfig(0.3), 1000, seed=12)
    b = trajectory_statistics(circ, NoiseConfig(0.3), 1000, seed=12)
    assert np.array_equal(a[0], b[0])
    assert np.array_equal(sample_noisy_indices(circ, NoiseConfig(0.3), 500, 4), sample_noisy_indices(circ, NoiseConfig(0.3), 500, 4))


def test_noisy_sampling_frequencies():
    circ = bell()
    idx = sample_noisy_indices(circ, NoiseConfig(0.5), 20000, seed=13)
    freq = np.bincount(idx, minlength=4) / idx.size
    exact = density_oracle_probabilities(circ, NoiseConfig(0.5))
    assert np.all(np.abs(freq - exact) <= 5 * np.sqrt(exact * (1 - exact) / idx.size) + 1e-12)


def test_noise_config_validation():
    with pytest.raises(ValueError):
        NoiseConfig(1.5)
    with pytest.raises(ValueError):
        density_oracle_probabilities(Circuit(7), NoiseConfig(0.1))
