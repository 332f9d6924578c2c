import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from math import comb, sqrt
from typing import List, Optional, Sequence, Tuple

import numpy as np
from typeguard import typechecked

from two_body_qsl import settings
from two_body_qsl.errors import DimensionError
from two_body_qsl.operators import permute_amplitudes

logger = logging.getLogger(__name__)


@typechecked
@dataclass(frozen=True, eq=False)
class StateVector:
    n_sites: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (2**self.n_sites,):
            raise DimensionError(
                f"Expected {2**self.n_sites} amplitudes, got shape {self.amplitudes.shape}"
            )
        norm = float(np.linalg.norm(self.amplitudes))
        if abs(norm - 1.0) > settings.NORM_TOLERANCE:
            raise DimensionError(f"State vector is not normalised: norm = {norm}")

    @property
    def dimension(self) -> int:
        return 2**self.n_sites


def basis_index(bits: str) -> int:
    """Computational basis index of a ket label, first character = site 1."""
    return int(bits, 2)


@typechecked
def basis_state(n_sites: int, index: int) -> StateVector:
    amplitudes = np.zeros(2**n_sites, dtype=complex)
    amplitudes[index] = 1.0
    return StateVector(n_sites, amplitudes)


@typechecked
def zero_state(n_sites: int) -> StateVector:
    if n_sites < 1:
        raise DimensionError(f"Need at least one site: {n_sites}")
    return basis_state(n_sites, 0)


@typechecked
def ghz(n_sites: int) -> StateVector:
    if n_sites < 2:
        raise DimensionError(f"GHZ state needs at least two sites: {n_sites}")
    amplitudes = np.zeros(2**n_sites, dtype=complex)
    amplitudes[0] = amplitudes[-1] = 1 / sqrt(2)
    return StateVector(n_sites, amplitudes)


@typechecked
def dicke(n_sites: int, k: int) -> StateVector:
    if n_sites < 1:
        raise DimensionError(f"Need at least one site: {n_sites}")
    if not 0 <= k <= n_sites:
        raise DimensionError(f"Excitation number {k} out of range for {n_sites} sites")
    amplitudes = np.zeros(2**n_sites, dtype=complex)
    amplitude = 1 / sqrt(comb(n_sites, k))
    for ones in itertools.combinations(range(n_sites), k):
        # site 0 is the most significant bit
        index = sum(1 << (n_sites - 1 - site) for site in ones)
        amplitudes[index] = amplitude
    return StateVector(n_sites, amplitudes)


@typechecked
def w_state(n_sites: int) -> StateVector:
    if n_sites < 2:
        raise DimensionError(f"W state needs at least two sites: {n_sites}")
    return dicke(n_sites, 1)


AME52_TERMS: Tuple[Tuple[str, int], ...] = (
    ("01111", 1),
    ("10011", 1),
    ("10101", 1),
    ("11100", 1),
    ("00000", -1),
    ("00110", -1),
    ("01001", -1),
    ("11010", -1),
)


@typechecked
def ame52() -> StateVector:
    amplitudes = np.zeros(32, dtype=complex)
    for bits, sign in AME52_TERMS:
        amplitudes[basis_index(bits)] = sign / sqrt(8)
    return StateVector(5, amplitudes)


@typechecked
def is_invariant(
    state: StateVector, permutation: Sequence[int]
) -> Tuple[bool, float]:
    permuted = permute_amplitudes(state.amplitudes, state.n_sites, permutation)
    residual = float(np.linalg.norm(permuted - state.amplitudes))
    return residual <= settings.INVARIANCE_TOLERANCE, residual


@typechecked
def transposition(n_sites: int, i: int, j: int) -> List[int]:
    permutation = list(range(n_sites))
    permutation[i], permutation[j] = j, i
    return permutation


@typechecked
def symmetric_weight(state: StateVector) -> float:
    """Weight of the state inside the permutation-symmetric subspace.

    A permutation-invariant hamiltonian acting on a symmetric initial state
    cannot reach fidelity above this value.
    """
    weight = 0.0
    for k in range(state.n_sites + 1):
        overlap = np.vdot(dicke(state.n_sites, k).amplitudes, state.amplitudes)
        weight += float(abs(overlap) ** 2)
    return min(weight, 1.0)


@typechecked
def reduced_density_matrix(state: StateVector, keep: Sequence[int]) -> np.ndarray:
    n_sites = state.n_sites
    if len(set(keep)) != len(keep) or any(not 0 <= s < n_sites for s in keep):
        raise DimensionError(f"Invalid subsystem {list(keep)} for {n_sites} sites")
    traced = [s for s in range(n_sites) if s not in keep]
    tensor = state.amplitudes.reshape((2,) * n_sites)
    tensor = np.transpose(tensor, list(keep) + traced)
    matrix = tensor.reshape(2 ** len(keep), 2 ** len(traced))
    return matrix @ matrix.conj().T


class TargetFamily(Enum):
    GHZ = "ghz"
    W = "w"
    DICKE = "dicke"
    AME52 = "ame52"


@typechecked
@dataclass(frozen=True)
class TargetSpec:
    family: TargetFamily
    k: Optional[int] = None

    def __post_init__(self) -> None:
        if self.family is TargetFamily.DICKE and self.k is None:
            raise DimensionError("Dicke target needs the excitation number k")
        if self.family is not TargetFamily.DICKE and self.k is not None:
            raise DimensionError(f"Excitation number only applies to Dicke targets")

    def build(self, n_sites: int) -> StateVector:
        if self.family is TargetFamily.GHZ:
            return ghz(n_sites)
        if self.family is TargetFamily.W:
            return w_state(n_sites)
        if self.family is TargetFamily.DICKE:
            assert self.k is not None
            return dicke(n_sites, self.k)
        if n_sites != 5:
            raise DimensionError(f"AME(5,2) target needs 5 sites: {n_sites}")
        return ame52()

    @property
    def label(self) -> str:
        if self.family is TargetFamily.DICKE:
            return f"dicke{self.k}"
        return self.family.value
