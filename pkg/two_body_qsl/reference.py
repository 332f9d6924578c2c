import logging
from dataclasses import dataclass
from enum import Enum
from math import pi, sqrt
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar
from typeguard import typechecked

from two_body_qsl import settings
from two_body_qsl.bounds import distinct_levels
from two_body_qsl.dynamics import (
    eigendecompose,
    energy_stddev,
    evolve_amplitudes,
    normalize_bandwidth,
    populated_levels,
)
from two_body_qsl.errors import CombinationNotInCatalogError
from two_body_qsl.operators import (
    HamiltonianMatrix,
    InteractionGraph,
    SymmetryClass,
    assemble,
    uniform_parameters,
)
from two_body_qsl.states import TargetFamily, TargetSpec, zero_state

logger = logging.getLogger(__name__)


class GraphKind(Enum):
    COMPLETE = "complete"
    CHAIN = "chain"


class ClaimPrecision(Enum):
    EXACT = "exact"
    APPROXIMATE = "approximate"


@typechecked
@dataclass(frozen=True, eq=False)
class ReferenceEntry:
    """A printed optimal hamiltonian: prefactor * (pair sum + shift * identity)."""

    family: TargetFamily
    n_sites: int
    graph_kind: GraphKind
    coupling: np.ndarray
    field_vector: np.ndarray
    prefactor: float
    shift: float
    claimed_time: float
    precision: ClaimPrecision
    expressions: Dict[str, str]
    claimed_delta_h: Optional[float] = None

    @property
    def label(self) -> str:
        return f"{self.family.value}{self.n_sites}-{self.graph_kind.value}"

    @property
    def target(self) -> TargetSpec:
        return TargetSpec(self.family)

    @property
    def graph(self) -> InteractionGraph:
        if self.graph_kind is GraphKind.CHAIN:
            return InteractionGraph.chain(self.n_sites)
        return InteractionGraph.complete(self.n_sites)

    def pair_hamiltonian(self) -> HamiltonianMatrix:
        return _pair_hamiltonian(self.graph, self.coupling, self.field_vector)

    @property
    def matrix(self) -> HamiltonianMatrix:
        pair = self.pair_hamiltonian()
        identity = np.eye(pair.dimension, dtype=complex)
        return HamiltonianMatrix(
            self.n_sites, self.prefactor * (pair.entries + self.shift * identity)
        )


def _pair_hamiltonian(
    graph: InteractionGraph, coupling: np.ndarray, field_vector: np.ndarray
) -> HamiltonianMatrix:
    if graph.edges == InteractionGraph.complete(graph.n_sites).edges:
        sym = SymmetryClass.full_permutation()
    else:
        sym = SymmetryClass.unconstrained()
    return assemble(uniform_parameters(graph, sym, coupling, field_vector), graph, sym)


def _xz_coupling() -> np.ndarray:
    return np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])


def _xxyz_coupling() -> np.ndarray:
    return np.diag([1.0, -1.0, 1.0])


def _ghz4_coupling() -> np.ndarray:
    return np.array(
        [[0.0, 0.5, 0.0], [0.5, 1.0, 0.0], [0.0, 0.0, 0.5 - 1 / sqrt(2)]]
    )


def _ghz6_coupling() -> np.ndarray:
    return np.array([[0.0, -1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, -1.0]])


def _w_field(n_sites: int) -> np.ndarray:
    return np.array([-(n_sites - 3.0), 0.0, 0.0])


W_PAIR_TEXT = "sum_{i<j} (sx_i sz_j + sz_i sx_j)"
GHZ_ODD_PAIR_TEXT = "sum_{i<j} (sx_i sx_j - sy_i sy_j + sz_i sz_j) + 2 sum_i sy_i"


def _w_entries() -> List[ReferenceEntry]:
    root_w6 = sqrt(3 * (41 + sqrt(921)))
    printed = [
        (3, 1 / (4 * sqrt(3)), 2 * sqrt(3), pi, ClaimPrecision.EXACT,
         ("1/(4*sqrt(3))", "2*sqrt(3)", "pi")),
        (4, 1 / (4 * sqrt(22)), 2 * sqrt(22), sqrt(11) * pi / sqrt(2), ClaimPrecision.EXACT,
         ("1/(4*sqrt(22))", "2*sqrt(22)", "sqrt(11)*pi/sqrt(2)")),
        (5, 1 / 36, 18.0, 9 * pi / sqrt(5), ClaimPrecision.EXACT,
         ("1/36", "18", "9*pi/sqrt(5)")),
        (6, 1 / (4 * root_w6), -2 * root_w6, 18.76, ClaimPrecision.APPROXIMATE,
         ("1/(4*sqrt(3*(41+sqrt(921))))", "-2*sqrt(3*(41+sqrt(921)))", "~18.76")),
        (7, 1 / (32 * (16 + sqrt(31))), -2 * (16 + sqrt(31)), 25.60, ClaimPrecision.APPROXIMATE,
         ("1/(32*(16+sqrt(31)))", "-2*(16+sqrt(31))", "~25.60")),
    ]
    entries = []
    for n_sites, prefactor, shift, time, precision, texts in printed:
        field_text = "" if n_sites == 3 else f" - {n_sites - 3} sum_i sx_i"
        entries.append(
            ReferenceEntry(
                TargetFamily.W,
                n_sites,
                GraphKind.COMPLETE,
                _xz_coupling(),
                _w_field(n_sites),
                prefactor,
                shift,
                time,
                precision,
                {
                    "operator": W_PAIR_TEXT + field_text,
                    "prefactor": texts[0],
                    "shift": texts[1],
                    "claimed_time": texts[2],
                },
                0.5 if n_sites == 3 else None,
            )
        )
    return entries


def _ghz_entries() -> List[ReferenceEntry]:
    y_field = np.array([0.0, 2.0, 0.0])
    no_field = np.zeros(3)
    printed = [
        (3, GraphKind.CHAIN, sqrt(2) * np.diag([1.0, 0.0, 1.0]), np.array([0.0, 1.0, 0.0]),
         1 / 10, 5.0, 5 * pi / 2,
         ("sqrt(2) sum_{i=1,2} (sx_i sx_{i+1} + sz_i sz_{i+1}) + sum_i sy_i",
          "1/10", "5", "5*pi/2")),
        (3, GraphKind.COMPLETE, _xxyz_coupling(), y_field, 1 / 16, 9.0, 2 * pi,
         (GHZ_ODD_PAIR_TEXT, "1/16", "9", "2*pi")),
        (4, GraphKind.COMPLETE, _ghz4_coupling(), no_field, 1 / (8 * sqrt(2)), 3 - 5 * sqrt(2), 2 * pi,
         ("sum_{i<j} (1/2 (sx_i sy_j + sy_i sx_j) + sy_i sy_j + (1/2 - 1/sqrt(2)) sz_i sz_j)",
          "1/(8*sqrt(2))", "3-5*sqrt(2)", "2*pi")),
        (5, GraphKind.COMPLETE, _xxyz_coupling(), y_field, 1 / 36, 20.0, 9 * pi / 2,
         (GHZ_ODD_PAIR_TEXT, "1/36", "20", "9*pi/2")),
        (6, GraphKind.COMPLETE, _ghz6_coupling(), no_field, 1 / 36, 21.0, 9 * pi / 2,
         ("sum_{i<j} (-(sx_i sy_j + sy_i sx_j) - sz_i sz_j)", "1/36", "21", "9*pi/2")),
        (7, GraphKind.COMPLETE, _xxyz_coupling(), y_field, 1 / 64, 35.0, 8 * pi,
         (GHZ_ODD_PAIR_TEXT, "1/64", "35", "8*pi")),
    ]
    entries = []
    for n_sites, graph_kind, coupling, field_vector, prefactor, shift, time, texts in printed:
        claimed_delta_h = 1 / 8 if (n_sites, graph_kind) == (3, GraphKind.COMPLETE) else None
        entries.append(
            ReferenceEntry(
                TargetFamily.GHZ,
                n_sites,
                graph_kind,
                coupling,
                field_vector.copy(),
                prefactor,
                shift,
                time,
                ClaimPrecision.EXACT,
                {
                    "operator": texts[0],
                    "prefactor": texts[1],
                    "shift": texts[2],
                    "claimed_time": texts[3],
                },
                claimed_delta_h,
            )
        )
    return entries


@typechecked
def catalog() -> List[ReferenceEntry]:
    return _w_entries() + _ghz_entries()


@typechecked
def reference_hamiltonian(
    family: TargetFamily, n_sites: int, graph_kind: GraphKind = GraphKind.COMPLETE
) -> ReferenceEntry:
    for entry in catalog():
        if (entry.family, entry.n_sites, entry.graph_kind) == (family, n_sites, graph_kind):
            return entry
    raise CombinationNotInCatalogError(
        f"No reference hamiltonian for {family.value} on {n_sites} sites "
        f"({graph_kind.value} graph): not in catalog"
    )


@typechecked
def unnormalized_family(family: TargetFamily, n_sites: int) -> HamiltonianMatrix:
    """General unnormalised optimal hamiltonian on the complete graph."""
    graph = InteractionGraph.complete(n_sites)
    if family is TargetFamily.W and n_sites >= 2:
        return _pair_hamiltonian(graph, _xz_coupling(), _w_field(n_sites))
    if family is TargetFamily.GHZ and n_sites >= 3 and n_sites % 2 == 1:
        return _pair_hamiltonian(graph, _xxyz_coupling(), np.array([0.0, 2.0, 0.0]))
    if family is TargetFamily.GHZ and n_sites == 4:
        return _pair_hamiltonian(graph, _ghz4_coupling(), np.zeros(3))
    raise CombinationNotInCatalogError(
        f"No general hamiltonian form for {family.value} on {n_sites} sites"
    )


@typechecked
@dataclass(frozen=True)
class VerifyReport:
    label: str
    claimed_time: float
    precision: ClaimPrecision
    printed_band: Tuple[float, float]
    printed_normalized: bool
    fidelity_at_claimed_time: float
    best_time: float
    best_fidelity: float
    delta_h: float
    populated_levels: int
    distinct_levels: int
    tolerance: float
    discrepancies: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.best_fidelity >= 1 - self.tolerance


@typechecked
def verify_entry(entry: ReferenceEntry) -> VerifyReport:
    printed = entry.matrix
    printed_spectrum = eigendecompose(printed)
    band = (float(printed_spectrum.eigenvalues[0]), float(printed_spectrum.eigenvalues[-1]))
    tolerance_band = 1e-9
    printed_normalized = abs(band[0]) <= tolerance_band and abs(band[1] - 1) <= tolerance_band

    discrepancies: List[str] = []
    if printed_normalized:
        operator = printed
    else:
        operator = normalize_bandwidth(printed)
        discrepancies.append(
            f"printed prefactor {entry.expressions['prefactor']} and shift "
            f"{entry.expressions['shift']} give the band [{band[0]:.6f}, {band[1]:.6f}], "
            f"re-normalised to [0, 1]"
        )

    spectrum = eigendecompose(operator)
    initial = zero_state(entry.n_sites)
    target = entry.target.build(entry.n_sites).amplitudes

    def fidelity_at(t: float) -> float:
        evolved = evolve_amplitudes(spectrum, t, initial.amplitudes)
        return float(abs(np.vdot(target, evolved)) ** 2)

    claimed_fidelity = fidelity_at(entry.claimed_time)
    if entry.precision is ClaimPrecision.APPROXIMATE:
        best_time, best_fidelity = scan_window(
            fidelity_at, entry.claimed_time, settings.APPROXIMATE_TIME_WINDOW
        )
        tolerance = settings.APPROXIMATE_CLAIM_TOLERANCE
    else:
        best_time, best_fidelity = entry.claimed_time, claimed_fidelity
        tolerance = settings.EXACT_CLAIM_TOLERANCE

    delta_h = energy_stddev(operator, initial)
    if entry.claimed_delta_h is not None and abs(delta_h - entry.claimed_delta_h) > 1e-9:
        discrepancies.append(
            f"energy spread in the zero state is {delta_h:.9f}, "
            f"claimed {entry.claimed_delta_h:.9f}"
        )

    report = VerifyReport(
        entry.label,
        entry.claimed_time,
        entry.precision,
        band,
        printed_normalized,
        claimed_fidelity,
        best_time,
        best_fidelity,
        delta_h,
        len(populated_levels(spectrum, initial)),
        len(distinct_levels(spectrum.eigenvalues)),
        tolerance,
        tuple(discrepancies),
    )
    for discrepancy in discrepancies:
        logger.warning(f"{entry.label}: {discrepancy}")
    logger.info(
        f"{entry.label}: fidelity {best_fidelity:.{settings.FIDELITY_DISPLAY_DECIMALS}f} "
        f"at t={best_time:.6f} ({'PASS' if report.passed else 'FAIL'})"
    )
    return report


def scan_window(
    fidelity_at: Callable[[float], float], center: float, half_width: float
) -> Tuple[float, float]:
    """Best fidelity on [center - half_width, center + half_width]."""
    low, high = max(center - half_width, 0.0), center + half_width
    grid = np.linspace(low, high, 201)
    values = [fidelity_at(float(t)) for t in grid]
    best = int(np.argmax(values))
    step = grid[1] - grid[0]
    result = minimize_scalar(
        lambda t: -fidelity_at(float(t)),
        bounds=(max(low, grid[best] - step), min(high, grid[best] + step)),
        method="bounded",
        options={"xatol": 1e-12},
    )
    if -result.fun > values[best]:
        return float(result.x), float(-result.fun)
    return float(grid[best]), float(values[best])
