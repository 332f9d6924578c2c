from math import pi, sqrt

import numpy as np
import pytest
from scipy.linalg import expm

from two_body_qsl.bounds import hadamard_hamiltonian
from two_body_qsl.dynamics import *
from two_body_qsl.errors import DimensionError, InvalidArgumentError, ZeroBandwidthError
from two_body_qsl.operators import (
    Axis,
    HamiltonianMatrix,
    HamiltonianModel,
    InteractionGraph,
    SymmetryClass,
    pauli_embed,
    swap_operator,
)
from two_body_qsl.reference import reference_hamiltonian
from two_body_qsl.states import StateVector, TargetFamily, dicke, ghz, w_state, zero_state


def random_hamiltonian(rng: np.random.Generator, n_sites: int) -> HamiltonianMatrix:
    dimension = 2**n_sites
    a = rng.normal(size=(dimension, dimension)) + 1j * rng.normal(size=(dimension, dimension))
    return HamiltonianMatrix(n_sites, (a + a.conj().T) / 2)


def test_eigendecompose() -> None:
    rng = np.random.default_rng(0)
    H = random_hamiltonian(rng, 3)
    spectrum = eigendecompose(H)
    assert np.all(np.diff(spectrum.eigenvalues) >= 0)
    assert np.allclose(spectrum.reconstruct(), H.entries)
    assert spectrum.bandwidth > 0


def test_normalize_bandwidth() -> None:
    rng = np.random.default_rng(1)
    H = random_hamiltonian(rng, 3)
    normalized = normalize_bandwidth(H)
    eigenvalues = eigendecompose(normalized).eigenvalues
    assert np.isclose(eigenvalues[0], 0.0, atol=1e-12)
    assert np.isclose(eigenvalues[-1], 1.0, atol=1e-12)

    spectrum = normalize_spectrum(eigendecompose(H))
    assert spectrum.eigenvalues[0] == 0.0
    assert spectrum.eigenvalues[-1] == 1.0
    assert np.allclose(spectrum.reconstruct(), normalized.entries, atol=1e-12)

    # scaling and shifting do not change the normalised operator
    shifted = HamiltonianMatrix(3, 3.5 * H.entries + 2.0 * np.eye(8))
    assert np.allclose(normalize_bandwidth(shifted).entries, normalized.entries, atol=1e-10)

    with pytest.raises(ZeroBandwidthError):
        normalize_bandwidth(HamiltonianMatrix(2, np.zeros((4, 4), dtype=complex)))
    with pytest.raises(ZeroBandwidthError):
        normalize_bandwidth(HamiltonianMatrix(2, 5.0 * np.eye(4, dtype=complex)))


def test_evolve() -> None:
    x = pauli_embed(1, 0, Axis.X)
    psi = zero_state(1)
    assert evolve(x, 0.0, psi) is psi

    flipped = evolve(x, pi / 2, psi)
    assert np.isclose(fidelity(flipped, StateVector(1, np.array([0, 1], dtype=complex))), 1.0)

    rng = np.random.default_rng(2)
    H = random_hamiltonian(rng, 2)
    expected = expm(-1j * 0.7 * H.entries) @ zero_state(2).amplitudes
    assert np.allclose(evolve(H, 0.7, zero_state(2)).amplitudes, expected)

    with pytest.raises(InvalidArgumentError):
        evolve(x, -1.0, psi)
    with pytest.raises(DimensionError):
        evolve(x, 1.0, zero_state(2))


def test_hadamard_generator() -> None:
    H = hadamard_hamiltonian()
    assert np.allclose(eigendecompose(H).eigenvalues, [-pi, 0.0])

    gate = np.array([[1, 1], [1, -1]]) / sqrt(2)
    assert np.allclose(expm(-1j * H.entries), gate)

    plus = StateVector(1, np.array([1, 1], dtype=complex) / sqrt(2))
    normalized = normalize_bandwidth(H)
    assert np.isclose(fidelity(evolve(normalized, pi, zero_state(1)), plus), 1.0)


def test_overlap_and_fidelity() -> None:
    assert np.isclose(overlap(zero_state(3), ghz(3)), 1 / sqrt(2))
    assert np.isclose(fidelity(zero_state(3), ghz(3)), 0.5)
    assert np.isclose(fidelity(zero_state(3), w_state(3)), 0.0)

    with pytest.raises(DimensionError):
        overlap(zero_state(2), ghz(3))


def test_energy_stddev() -> None:
    psi = zero_state(1)
    assert np.isclose(energy_stddev(pauli_embed(1, 0, Axis.X), psi), 1.0)
    assert np.isclose(energy_stddev(pauli_embed(1, 0, Axis.Z), psi), 0.0)

    with pytest.raises(DimensionError):
        energy_stddev(pauli_embed(1, 0, Axis.X), zero_state(2))


def test_speed_limit_holds() -> None:
    rng = np.random.default_rng(3)
    psi = zero_state(3)
    for _ in range(200):
        H = normalize_bandwidth(random_hamiltonian(rng, 3))
        delta_h = energy_stddev(H, psi)
        spectrum = eigendecompose(H)
        for t in rng.uniform(0, 10, size=5):
            evolved = evolve_spectrum(spectrum, float(t), psi)
            angle = np.arccos(min(overlap(psi, evolved), 1.0))
            assert angle <= t * delta_h + 1e-8


def test_levels() -> None:
    assert group_levels(np.array([0.0, 1e-12, 0.5, 1.0])) == [[0, 1], [2], [3]]
    assert group_levels(np.array([])) == []

    x = pauli_embed(1, 0, Axis.X)
    levels = populated_levels(eigendecompose(x), zero_state(1))
    assert len(levels) == 2
    assert np.allclose([energy for energy, _ in levels], [-1.0, 1.0])
    assert np.allclose([weight for _, weight in levels], [0.5, 0.5])

    z = pauli_embed(1, 0, Axis.Z)
    levels = populated_levels(eigendecompose(z), zero_state(1))
    assert len(levels) == 1
    assert np.isclose(levels[0][0], 1.0)


def test_component_fidelities() -> None:
    basis = [dicke(3, k) for k in range(4)]
    values = component_fidelities(ghz(3), basis)
    assert np.allclose(values, [0.5, 0.0, 0.0, 0.5])


def test_fidelity_series() -> None:
    x = pauli_embed(1, 0, Axis.X)
    one = StateVector(1, np.array([0, 1], dtype=complex))
    times = np.linspace(0, pi, 5)
    series = fidelity_series(eigendecompose(x), zero_state(1), one, times)
    assert np.allclose(series.values, np.sin(times) ** 2)

    with pytest.raises(DimensionError):
        FidelitySeries(np.zeros(3), np.zeros(2))


def test_evolution_group_property() -> None:
    rng = np.random.default_rng(8)
    H = random_hamiltonian(rng, 3)
    psi = ghz(3)
    for t1, t2 in [(0.3, 1.1), (2.0, 0.05), (4.5, 3.25)]:
        direct = evolve(H, t1 + t2, psi)
        stepped = evolve(H, t2, evolve(H, t1, psi))
        assert np.allclose(direct.amplitudes, stepped.amplitudes, atol=1e-10)


def test_evolution_keeps_permutation_symmetry() -> None:
    rng = np.random.default_rng(9)
    model = HamiltonianModel(InteractionGraph.complete(4), SymmetryClass.full_permutation())
    for _ in range(5):
        H = model.assemble(rng.uniform(-1, 1, size=model.parameter_count))
        for t in [0.7, 3.0, 11.0]:
            evolved = evolve(H, t, zero_state(4))
            for i in range(4):
                for j in range(i + 1, 4):
                    swapped = swap_operator(4, i, j).entries @ evolved.amplitudes
                    assert np.allclose(swapped, evolved.amplitudes, atol=1e-10)


def test_ghz3_passes_through_w_component() -> None:
    entry = reference_hamiltonian(TargetFamily.GHZ, 3)
    spectrum = normalize_spectrum(eigendecompose(entry.matrix))
    times = np.linspace(0, 2 * pi, 201)
    w_series = fidelity_series(spectrum, zero_state(3), w_state(3), times)
    ghz_series = fidelity_series(spectrum, zero_state(3), ghz(3), times)

    assert w_series.values[0] == pytest.approx(0.0, abs=1e-12)
    # populated on the way, gone again at the end
    assert np.max(w_series.values[1:-1]) > 1e-3
    assert w_series.values[-1] < 1e-6
    assert ghz_series.values[-1] >= 1 - 1e-6


def test_fidelity_series_rejects_negative_times() -> None:
    x = pauli_embed(1, 0, Axis.X)
    with pytest.raises(InvalidArgumentError):
        fidelity_series(eigendecompose(x), zero_state(1), zero_state(1), np.array([0.0, -0.1]))
