from dataclasses import dataclass
from math import acos, ceil, inf, pi, sqrt
from typing import Tuple

import numpy as np
from typeguard import typechecked

from two_body_qsl import settings
from two_body_qsl.dynamics import (
    eigendecompose,
    energy_stddev,
    group_levels,
    overlap as state_overlap,
)
from two_body_qsl.errors import InvalidArgumentError, SymmetryError
from two_body_qsl.operators import (
    HamiltonianMatrix,
    InteractionGraph,
    SymmetryClass,
    assemble,
    uniform_parameters,
)
from two_body_qsl.states import StateVector


def _clamped_arccos(overlap: float) -> float:
    if not -1e-12 <= overlap <= 1 + 1e-12:
        raise InvalidArgumentError(f"Overlap must lie in [0, 1]: {overlap}")
    return acos(min(max(overlap, 0.0), 1.0))


@typechecked
def mt_bound(overlap: float, delta_h: float) -> float:
    """Mandelstam-Tamm time to rotate away from a state by arccos(overlap)."""
    if delta_h <= 0:
        raise InvalidArgumentError(f"Energy spread must be positive: {delta_h}")
    return _clamped_arccos(overlap) / delta_h


@typechecked
def two_level_time(p1: float, overlap: float) -> float:
    if not 0 < p1 < 1:
        raise InvalidArgumentError(f"Upper level occupation must lie in (0, 1): {p1}")
    return mt_bound(overlap, sqrt(p1 * (1 - p1)))


@typechecked
def three_body_time(overlap: float) -> float:
    """Time reached by XXX/YYY/ZZZ hamiltonians, whose two levels split the state evenly."""
    return two_level_time(0.5, overlap)


def _check_symmetric(h: np.ndarray) -> None:
    if h.shape != (3, 3) or not np.allclose(h, h.T, rtol=0.0, atol=1e-12):
        raise SymmetryError(f"Expected a symmetric 3x3 coupling matrix:\n{h}")


@typechecked
def symmetric3_spectrum(h: np.ndarray) -> np.ndarray:
    """Closed-form spectrum of the permutation-symmetric three-qubit pair hamiltonian."""
    _check_symmetric(h)
    hxx, hyy, hzz = h[0, 0], h[1, 1], h[2, 2]
    hxy, hxz, hyz = h[0, 1], h[0, 2], h[1, 2]
    trace = hxx + hyy + hzz
    f_squared = (
        hxx**2
        + hyy**2
        + hzz**2
        + 3 * (hxy**2 + hxz**2 + hyz**2)
        - hxx * hyy
        - hxx * hzz
        - hyy * hzz
    )
    f = sqrt(max(float(f_squared), 0.0))
    eigenvalues = [-trace] * 4 + [trace - 2 * f] * 2 + [trace + 2 * f] * 2
    return np.sort(np.array(eigenvalues, dtype=float))


@typechecked
def two_eigenvalue_hxx(
    h_yy: float, h_zz: float, h_xy: float, h_yz: float, h_xz: float
) -> Tuple[float, float]:
    """h_xx that collapses the three-qubit spectrum onto two levels, with its scale eta.

    The levels are then -eta (six-fold) and 3 eta (two-fold).
    """
    denominator = h_yy + h_zz
    if abs(denominator) <= 1e-12:
        raise InvalidArgumentError(f"Singular two-level condition: h_yy + h_zz = {denominator}")
    h_xx = (-h_yy * h_zz + h_xy**2 + h_yz**2 + h_xz**2) / denominator
    eta = (h_yy**2 + h_zz**2 + h_xy**2 + h_yz**2 + h_xz**2 + h_yy * h_zz) / denominator
    return h_xx, eta


@typechecked
def coupling_matrix(
    h_xx: float, h_yy: float, h_zz: float, h_xy: float, h_yz: float, h_xz: float
) -> np.ndarray:
    return np.array(
        [
            [h_xx, h_xy, h_xz],
            [h_xy, h_yy, h_yz],
            [h_xz, h_yz, h_zz],
        ],
        dtype=float,
    )


@typechecked
def symmetric3_hamiltonian(h: np.ndarray, b_y: float = 0.0) -> HamiltonianMatrix:
    _check_symmetric(h)
    graph = InteractionGraph.complete(3)
    sym = SymmetryClass.full_permutation()
    params = uniform_parameters(graph, sym, h, np.array([0.0, b_y, 0.0]))
    return assemble(params, graph, sym)


@typechecked
def ghz5level_closed_form(h: np.ndarray, b_y: float) -> np.ndarray:
    trace = float(np.trace(h))
    return np.sort(np.array([-trace - b_y] * 2 + [-trace + b_y] * 2))


@typechecked
def ghz5level_spectrum(h: np.ndarray, b_y: float) -> np.ndarray:
    """Spectrum of the three-qubit symmetric hamiltonian with a y field.

    Four eigenvalues come from the closed form; the other four are the
    remaining eigenvalues of the numeric solution.
    """
    _check_symmetric(h)
    numeric = list(eigendecompose(symmetric3_hamiltonian(h, b_y)).eigenvalues)
    closed = ghz5level_closed_form(h, b_y)
    worst = 0.0
    for value in closed:
        nearest = min(range(len(numeric)), key=lambda k: abs(numeric[k] - value))
        worst = max(worst, abs(numeric[nearest] - value))
        numeric.pop(nearest)
    if worst > 1e-9 * max(1.0, float(np.max(np.abs(closed)))):
        raise InvalidArgumentError(
            f"Closed-form eigenvalues deviate from the numeric ones by {worst}"
        )
    return np.sort(np.concatenate([closed, np.array(numeric)]))


@typechecked
def distinct_levels(
    eigenvalues: np.ndarray, rel_tol: float = settings.LEVEL_GAP_TOLERANCE
) -> np.ndarray:
    ordered = np.sort(np.asarray(eigenvalues, dtype=float))
    return np.array(
        [float(np.mean(ordered[level])) for level in group_levels(ordered, rel_tol)]
    )


@typechecked
def ghz_two_body_time(n_sites: int) -> float:
    if n_sites < 3:
        raise InvalidArgumentError(f"Two-body GHZ time is defined from 3 sites: {n_sites}")
    return pi * ceil(n_sites / 2) ** 2 / 2


@typechecked
def pairwise_sequence_time(n_sites: int) -> float:
    """Bound for ceil(N/2) gates sharing a unit energy range, each with overlap 1/sqrt(2)."""
    if n_sites < 2:
        raise InvalidArgumentError(f"Need at least two sites: {n_sites}")
    gates = ceil(n_sites / 2)
    return gates * 2 * gates * pi / 4


@typechecked
def sequential_ghz_time(n_sites: int) -> float:
    """Hadamard plus N-1 CNOTs under a shared unit energy range."""
    if n_sites < 2:
        raise InvalidArgumentError(f"Need at least two sites: {n_sites}")
    return n_sites**2 * pi


@typechecked
def energy_for_deadline(t_min_at_unit_bandwidth: float, t: float) -> float:
    if t <= 0:
        raise InvalidArgumentError(f"Deadline must be positive: {t}")
    return t_min_at_unit_bandwidth / t


@typechecked
def hadamard_hamiltonian() -> HamiltonianMatrix:
    """Generator of the Hadamard gate at unit time (exp(-iH) is exactly the gate)."""
    off_diagonal = 1 / (2 * sqrt(2))
    entries = pi * np.array(
        [
            [(sqrt(2) - 2) / 4, off_diagonal],
            [off_diagonal, -(2 + sqrt(2)) / 4],
        ],
        dtype=complex,
    )
    return HamiltonianMatrix(1, entries)


@typechecked
@dataclass(frozen=True)
class QslReport:
    overlap: float
    delta_h: float
    t_min: float


@typechecked
def qsl_report(
    target: StateVector, psi0: StateVector, H: HamiltonianMatrix
) -> QslReport:
    value = state_overlap(psi0, target)
    delta_h = energy_stddev(H, psi0)
    if delta_h > 0:
        t_min = mt_bound(min(value, 1.0), delta_h)
    else:
        # a stationary state never leaves itself
        t_min = 0.0 if value >= 1 - 1e-12 else inf
    return QslReport(value, delta_h, t_min)

