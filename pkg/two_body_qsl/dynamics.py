import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
import scipy.linalg
from typeguard import typechecked

from two_body_qsl import settings
from two_body_qsl.errors import DimensionError, InvalidArgumentError, ZeroBandwidthError
from two_body_qsl.operators import HamiltonianMatrix
from two_body_qsl.states import StateVector

logger = logging.getLogger(__name__)


@typechecked
@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def bandwidth(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0])

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T


@typechecked
@dataclass(frozen=True, eq=False)
class FidelitySeries:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.times.shape != self.values.shape:
            raise DimensionError(
                f"Times {self.times.shape} and values {self.values.shape} differ in length"
            )


@typechecked
def eigendecompose(H: HamiltonianMatrix) -> Spectrum:
    return spectrum_of(H.entries)


def spectrum_of(entries: np.ndarray) -> Spectrum:
    # eigh returns ascending eigenvalues
    eigenvalues, eigenvectors = scipy.linalg.eigh(entries)
    return Spectrum(eigenvalues, eigenvectors)


def _check_bandwidth(eigenvalues: np.ndarray) -> Tuple[float, float]:
    e_min = float(eigenvalues[0])
    e_max = float(eigenvalues[-1])
    if e_max - e_min <= 1e-12 * max(1.0, abs(e_max)):
        raise ZeroBandwidthError(
            f"Hamiltonian has zero energy bandwidth: [{e_min}, {e_max}]"
        )
    return e_min, e_max - e_min


@typechecked
def normalize_spectrum(spectrum: Spectrum) -> Spectrum:
    """Affinely map the spectrum onto [0, 1], keeping the eigenvectors."""
    e_min, bandwidth = _check_bandwidth(spectrum.eigenvalues)
    eigenvalues = (spectrum.eigenvalues - e_min) / bandwidth
    # pin the end points against round-off
    eigenvalues[0] = 0.0
    eigenvalues[-1] = 1.0
    return Spectrum(eigenvalues, spectrum.eigenvectors)


@typechecked
def normalize_bandwidth(H: HamiltonianMatrix) -> HamiltonianMatrix:
    spectrum = eigendecompose(H)
    e_min, bandwidth = _check_bandwidth(spectrum.eigenvalues)
    identity = np.eye(H.dimension, dtype=complex)
    return HamiltonianMatrix(H.n_sites, (H.entries - e_min * identity) / bandwidth)


def evolve_amplitudes(
    spectrum: Spectrum, t: float, amplitudes: np.ndarray
) -> np.ndarray:
    vectors = spectrum.eigenvectors
    coefficients = vectors.conj().T @ amplitudes
    return vectors @ (np.exp(-1j * spectrum.eigenvalues * t) * coefficients)


@typechecked
def evolve_spectrum(spectrum: Spectrum, t: float, psi: StateVector) -> StateVector:
    if spectrum.eigenvectors.shape[0] != psi.dimension:
        raise DimensionError(
            f"Hamiltonian of dimension {spectrum.eigenvectors.shape[0]} "
            f"cannot act on a state of dimension {psi.dimension}"
        )
    if t < 0:
        raise InvalidArgumentError(f"Evolution time must be non-negative: {t}")
    if t == 0:
        return psi
    return StateVector(psi.n_sites, evolve_amplitudes(spectrum, t, psi.amplitudes))


@typechecked
def evolve(H: HamiltonianMatrix, t: float, psi: StateVector) -> StateVector:
    if H.dimension != psi.dimension:
        raise DimensionError(
            f"Hamiltonian of dimension {H.dimension} "
            f"cannot act on a state of dimension {psi.dimension}"
        )
    return evolve_spectrum(eigendecompose(H), t, psi)


def _check_same_dimension(psi: StateVector, phi: StateVector) -> None:
    if psi.dimension != phi.dimension:
        raise DimensionError(
            f"States of dimension {psi.dimension} and {phi.dimension} cannot be compared"
        )


@typechecked
def overlap(psi: StateVector, phi: StateVector) -> float:
    _check_same_dimension(psi, phi)
    return float(abs(np.vdot(psi.amplitudes, phi.amplitudes)))


@typechecked
def fidelity(psi: StateVector, phi: StateVector) -> float:
    return overlap(psi, phi) ** 2


@typechecked
def energy_stddev(H: HamiltonianMatrix, psi: StateVector) -> float:
    if H.dimension != psi.dimension:
        raise DimensionError(
            f"Hamiltonian of dimension {H.dimension} "
            f"cannot act on a state of dimension {psi.dimension}"
        )
    h_psi = H.entries @ psi.amplitudes
    mean = float(np.vdot(psi.amplitudes, h_psi).real)
    second_moment = float(np.vdot(h_psi, h_psi).real)
    return float(np.sqrt(max(second_moment - mean**2, 0.0)))


@typechecked
def component_fidelities(
    psi: StateVector, basis: Sequence[StateVector]
) -> np.ndarray:
    return np.array([fidelity(component, psi) for component in basis])


@typechecked
def group_levels(
    eigenvalues: np.ndarray, rel_tol: float = settings.LEVEL_GAP_TOLERANCE
) -> List[List[int]]:
    """Group indices of ascending eigenvalues into degenerate levels.

    Neighbouring eigenvalues closer than rel_tol * bandwidth share a level.
    """
    if eigenvalues.size == 0:
        return []
    bandwidth = float(eigenvalues[-1] - eigenvalues[0])
    gap = rel_tol * max(bandwidth, 1e-300)
    levels = [[0]]
    for index in range(1, eigenvalues.size):
        if eigenvalues[index] - eigenvalues[index - 1] > gap:
            levels.append([index])
        else:
            levels[-1].append(index)
    return levels


@typechecked
def populated_levels(
    spectrum: Spectrum, psi: StateVector, weight_tolerance: float = 1e-12
) -> List[Tuple[float, float]]:
    """Distinct energy levels carrying weight in psi, as (energy, weight) pairs."""
    if spectrum.eigenvectors.shape[0] != psi.dimension:
        raise DimensionError(
            f"Spectrum of dimension {spectrum.eigenvectors.shape[0]} "
            f"does not match a state of dimension {psi.dimension}"
        )
    weights = np.abs(spectrum.eigenvectors.conj().T @ psi.amplitudes) ** 2
    populated = []
    for level in group_levels(spectrum.eigenvalues):
        weight = float(np.sum(weights[level]))
        if weight > weight_tolerance:
            energy = float(np.mean(spectrum.eigenvalues[level]))
            populated.append((energy, weight))
    return populated


@typechecked
def fidelity_series(
    spectrum: Spectrum, psi: StateVector, target: StateVector, times: np.ndarray
) -> FidelitySeries:
    _check_same_dimension(psi, target)
    if np.any(np.asarray(times) < 0):
        raise InvalidArgumentError(f"Evolution times must be non-negative: {times}")
    values = np.array(
        [
            abs(np.vdot(target.amplitudes, evolve_amplitudes(spectrum, float(t), psi.amplitudes)))
            ** 2
            for t in times
        ]
    )
    return FidelitySeries(np.asarray(times, dtype=float), values)
