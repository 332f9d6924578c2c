import functools
import itertools
import logging
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from typeguard import typechecked

from two_body_qsl import settings
from two_body_qsl.errors import DimensionError, NonHermitianError, SymmetryError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
Permutation = Tuple[int, ...]


class Axis(IntEnum):
    X = 0
    Y = 1
    Z = 2

    @property
    def label(self) -> str:
        return self.name.lower()


PAULI_MATRICES: Dict[Axis, np.ndarray] = {
    Axis.X: np.array([[0, 1], [1, 0]], dtype=complex),
    Axis.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    Axis.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}


def canonical_edge(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


@typechecked
@dataclass(frozen=True)
class InteractionGraph:
    n_sites: int
    edges: Tuple[Edge, ...]

    def __post_init__(self) -> None:
        if self.n_sites < 1:
            raise DimensionError(f"Graph needs at least one site: {self.n_sites}")
        seen = set()
        for i, j in self.edges:
            if i == j:
                raise DimensionError(f"Self-loop in interaction graph: {(i, j)}")
            if not (0 <= i < self.n_sites and 0 <= j < self.n_sites):
                raise DimensionError(
                    f"Edge {(i, j)} out of range for {self.n_sites} sites"
                )
            edge = canonical_edge(i, j)
            if edge in seen:
                raise DimensionError(f"Duplicated edge in interaction graph: {edge}")
            seen.add(edge)
        object.__setattr__(self, "edges", tuple(sorted(seen)))

    @classmethod
    def complete(cls, n_sites: int) -> "InteractionGraph":
        return cls(n_sites, tuple(itertools.combinations(range(n_sites), 2)))

    @classmethod
    def ring(cls, n_sites: int, interaction_range: int) -> "InteractionGraph":
        """Periodic ring coupling sites at ring distance <= interaction_range."""
        if interaction_range < 1:
            raise DimensionError(f"Interaction range must be positive: {interaction_range}")
        edges = set()
        for i, j in itertools.combinations(range(n_sites), 2):
            distance = min(j - i, n_sites - (j - i))
            if distance <= interaction_range:
                edges.add((i, j))
        return cls(n_sites, tuple(edges))

    @classmethod
    def chain(cls, n_sites: int) -> "InteractionGraph":
        """Open nearest-neighbour line."""
        return cls(n_sites, tuple((i, i + 1) for i in range(n_sites - 1)))

    @classmethod
    def from_edges(
        cls, n_sites: int, edges: Iterable[Sequence[int]], one_based: bool = False
    ) -> "InteractionGraph":
        offset = 1 if one_based else 0
        pairs = []
        for edge in edges:
            if len(edge) != 2:
                raise DimensionError(f"Edge must join two sites: {list(edge)}")
            pairs.append((edge[0] - offset, edge[1] - offset))
        return cls(n_sites, tuple(pairs))

    @property
    def edge_set(self) -> FrozenSet[Edge]:
        return frozenset(self.edges)


class SymmetryKind(Enum):
    FULL_PERMUTATION = "full"
    PAIR_SWAP_PRODUCT = "pair_swap"
    UNCONSTRAINED = "unconstrained"
    THREE_BODY_DIAGONAL = "three_body"


@typechecked
@dataclass(frozen=True)
class SymmetryClass:
    kind: SymmetryKind
    swaps: Tuple[Edge, ...] = ()

    def __post_init__(self) -> None:
        if self.kind is not SymmetryKind.PAIR_SWAP_PRODUCT and self.swaps:
            raise SymmetryError(f"Transpositions only apply to pair swaps: {self}")
        if self.kind is SymmetryKind.PAIR_SWAP_PRODUCT:
            if not self.swaps:
                raise SymmetryError("Pair swap symmetry needs at least one transposition")
            touched: List[int] = []
            for i, j in self.swaps:
                if i == j or i < 0 or j < 0:
                    raise SymmetryError(f"Invalid transposition: {(i, j)}")
                touched.extend([i, j])
            if len(touched) != len(set(touched)):
                raise SymmetryError(f"Transpositions are not disjoint: {self.swaps}")

    @classmethod
    def full_permutation(cls) -> "SymmetryClass":
        return cls(SymmetryKind.FULL_PERMUTATION)

    @classmethod
    def unconstrained(cls) -> "SymmetryClass":
        return cls(SymmetryKind.UNCONSTRAINED)

    @classmethod
    def three_body_diagonal(cls) -> "SymmetryClass":
        return cls(SymmetryKind.THREE_BODY_DIAGONAL)

    @classmethod
    def pair_swap_product(cls, swaps: Sequence[Edge]) -> "SymmetryClass":
        return cls(SymmetryKind.PAIR_SWAP_PRODUCT, tuple(swaps))

    @classmethod
    def pair_swap_product_one_based(cls, swaps: Sequence[Edge]) -> "SymmetryClass":
        return cls.pair_swap_product([(i - 1, j - 1) for i, j in swaps])

    def generators(self, n_sites: int) -> List[Permutation]:
        identity = list(range(n_sites))
        if self.kind is SymmetryKind.FULL_PERMUTATION:
            generators = []
            for i in range(n_sites - 1):
                perm = list(identity)
                perm[i], perm[i + 1] = perm[i + 1], perm[i]
                generators.append(tuple(perm))
            return generators
        if self.kind is SymmetryKind.PAIR_SWAP_PRODUCT:
            perm = list(identity)
            for i, j in self.swaps:
                if not (i < n_sites and j < n_sites):
                    raise SymmetryError(
                        f"Transposition {(i, j)} out of range for {n_sites} sites"
                    )
                perm[i], perm[j] = perm[j], perm[i]
            return [tuple(perm)]
        return []

    def group(self, n_sites: int) -> List[Permutation]:
        return list(_group_closure(n_sites, tuple(self.generators(n_sites))))


@functools.lru_cache(maxsize=None)
def _group_closure(
    n_sites: int, generators: Tuple[Permutation, ...]
) -> Tuple[Permutation, ...]:
    identity = tuple(range(n_sites))
    elements = [identity]
    seen = {identity}
    frontier = [identity]
    while frontier:
        next_frontier = []
        for element in frontier:
            for generator in generators:
                composed = tuple(generator[element[i]] for i in range(n_sites))
                if composed not in seen:
                    seen.add(composed)
                    elements.append(composed)
                    next_frontier.append(composed)
        frontier = next_frontier
    return tuple(elements)


@typechecked
@dataclass(frozen=True)
class OrbitDecomposition:
    edge_orbits: Tuple[Tuple[Edge, ...], ...]
    # image of the representative's orientation on every member edge
    oriented_edges: Tuple[Tuple[Edge, ...], ...]
    site_orbits: Tuple[Tuple[int, ...], ...]
    symmetric_flags: Tuple[bool, ...]

    def edge_orbit_index(self, edge: Edge) -> int:
        edge = canonical_edge(*edge)
        for index, orbit in enumerate(self.edge_orbits):
            if edge in orbit:
                return index
        raise DimensionError(f"Edge not in any orbit: {edge}")

    def site_orbit_index(self, site: int) -> int:
        for index, orbit in enumerate(self.site_orbits):
            if site in orbit:
                return index
        raise DimensionError(f"Site not in any orbit: {site}")


@typechecked
def orbit_decomposition(
    graph: InteractionGraph, sym: SymmetryClass
) -> OrbitDecomposition:
    if sym.kind is SymmetryKind.THREE_BODY_DIAGONAL:
        return OrbitDecomposition((), (), (), ())

    group = sym.group(graph.n_sites)
    edge_set = graph.edge_set
    for generator in sym.generators(graph.n_sites):
        for i, j in graph.edges:
            if canonical_edge(generator[i], generator[j]) not in edge_set:
                raise SymmetryError(
                    f"Permutation {generator} maps edge {(i, j)} outside the graph"
                )

    edge_orbits = []
    oriented_edges = []
    symmetric_flags = []
    assigned = set()
    for representative in graph.edges:
        if representative in assigned:
            continue
        a, b = representative
        orbit: List[Edge] = []
        oriented: List[Edge] = []
        reverses_itself = False
        for element in group:
            image = (element[a], element[b])
            edge = canonical_edge(*image)
            if edge == representative and image != representative:
                reverses_itself = True
            if edge not in orbit:
                orbit.append(edge)
                oriented.append(image)
        order = sorted(range(len(orbit)), key=lambda k: orbit[k])
        edge_orbits.append(tuple(orbit[k] for k in order))
        oriented_edges.append(tuple(oriented[k] for k in order))
        symmetric_flags.append(
            reverses_itself or sym.kind is SymmetryKind.FULL_PERMUTATION
        )
        assigned.update(orbit)

    site_orbits = []
    assigned_sites = set()
    for site in range(graph.n_sites):
        if site in assigned_sites:
            continue
        site_orbit = sorted({element[site] for element in group})
        site_orbits.append(tuple(site_orbit))
        assigned_sites.update(site_orbit)

    return OrbitDecomposition(
        tuple(edge_orbits),
        tuple(oriented_edges),
        tuple(site_orbits),
        tuple(symmetric_flags),
    )


@typechecked
def parameter_count(
    graph: InteractionGraph, sym: SymmetryClass, symmetric_couplings: bool = False
) -> int:
    if sym.kind is SymmetryKind.THREE_BODY_DIAGONAL:
        return 3
    decomposition = orbit_decomposition(graph, sym)
    coupling_count = sum(
        6 if flag or symmetric_couplings else 9
        for flag in decomposition.symmetric_flags
    )
    return coupling_count + 3 * len(decomposition.site_orbits)


@typechecked
@dataclass(frozen=True, eq=False)
class ParameterVector:
    coupling_orbits: Tuple[Tuple[int, np.ndarray], ...] = ()
    field_orbits: Tuple[Tuple[int, np.ndarray], ...] = ()
    three_body: Optional[np.ndarray] = None

    def scaled(self, factor: float) -> "ParameterVector":
        return ParameterVector(
            tuple((k, factor * h) for k, h in self.coupling_orbits),
            tuple((k, factor * b) for k, b in self.field_orbits),
            None if self.three_body is None else factor * self.three_body,
        )


@typechecked
@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    n_sites: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        dimension = 2**self.n_sites
        if self.entries.shape != (dimension, dimension):
            raise DimensionError(
                f"Expected a {dimension}x{dimension} matrix, got {self.entries.shape}"
            )
        scale = max(1.0, float(np.max(np.abs(self.entries), initial=0.0)))
        skew = float(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0))
        if skew > settings.HERMITIAN_TOLERANCE * scale:
            raise NonHermitianError(f"Matrix is not Hermitian: |H - H^dagger| = {skew}")

    @property
    def dimension(self) -> int:
        return 2**self.n_sites


@functools.lru_cache(maxsize=None)
def _embedded_pauli(n_sites: int, site: int, axis: Axis) -> np.ndarray:
    factors = [np.eye(2, dtype=complex)] * n_sites
    factors[site] = PAULI_MATRICES[axis]
    embedded = functools.reduce(np.kron, factors)
    embedded.setflags(write=False)
    return embedded


@typechecked
def pauli_embed(n_sites: int, site: int, axis: Axis) -> HamiltonianMatrix:
    """Single-site Pauli operator, site 0 being the most significant qubit."""
    if not 0 <= site < n_sites:
        raise DimensionError(f"Site {site} out of range for {n_sites} sites")
    return HamiltonianMatrix(n_sites, _embedded_pauli(n_sites, site, axis).copy())


@typechecked
def permute_amplitudes(
    amplitudes: np.ndarray, n_sites: int, permutation: Sequence[int]
) -> np.ndarray:
    """Move the qubit on site i to site permutation[i]."""
    if sorted(permutation) != list(range(n_sites)):
        raise SymmetryError(f"Not a permutation of {n_sites} sites: {permutation}")
    inverse = [0] * n_sites
    for source, target in enumerate(permutation):
        inverse[target] = source
    tensor = amplitudes.reshape((2,) * n_sites + amplitudes.shape[1:])
    extra_axes = list(range(n_sites, tensor.ndim))
    return np.transpose(tensor, inverse + extra_axes).reshape(amplitudes.shape)


@typechecked
def permutation_operator(n_sites: int, permutation: Sequence[int]) -> np.ndarray:
    identity = np.eye(2**n_sites, dtype=complex)
    return permute_amplitudes(identity, n_sites, permutation)


@typechecked
def swap_operator(n_sites: int, i: int, j: int) -> HamiltonianMatrix:
    if i == j or not (0 <= i < n_sites and 0 <= j < n_sites):
        raise DimensionError(f"Invalid swap ({i}, {j}) for {n_sites} sites")
    permutation = list(range(n_sites))
    permutation[i], permutation[j] = j, i
    return HamiltonianMatrix(n_sites, permutation_operator(n_sites, permutation))


@typechecked
def three_body_hamiltonian(h_tilde: np.ndarray, n_sites: int = 3) -> HamiltonianMatrix:
    if n_sites != 3:
        raise DimensionError(f"Three-body diagonal hamiltonian needs 3 sites: {n_sites}")
    if h_tilde.shape != (3,):
        raise DimensionError(f"Expected three couplings, got shape {h_tilde.shape}")
    entries = sum(
        float(h_tilde[axis]) * _triple_product(axis) for axis in Axis
    )
    return HamiltonianMatrix(3, np.asarray(entries, dtype=complex))


@functools.lru_cache(maxsize=None)
def _triple_product(axis: Axis) -> np.ndarray:
    pauli = PAULI_MATRICES[axis]
    return np.kron(np.kron(pauli, pauli), pauli)


SYMMETRIC_COUPLING_INDICES: Tuple[Tuple[Axis, Axis], ...] = tuple(
    (mu, nu) for mu in Axis for nu in Axis if mu <= nu
)
FULL_COUPLING_INDICES: Tuple[Tuple[Axis, Axis], ...] = tuple(
    (mu, nu) for mu in Axis for nu in Axis
)


@typechecked
class HamiltonianModel:
    """Linear map from a flat real parameter vector to a symmetric hamiltonian.

    Each free parameter owns one precomputed operator, so assembling is a
    single contraction over the parameter axis.
    """

    graph: InteractionGraph
    sym: SymmetryClass
    symmetric_couplings: bool
    decomposition: OrbitDecomposition
    labels: List[str]
    basis: np.ndarray

    def __init__(
        self,
        graph: InteractionGraph,
        sym: SymmetryClass,
        symmetric_couplings: bool = False,
    ) -> None:
        self.graph = graph
        self.sym = sym
        self.symmetric_couplings = symmetric_couplings
        self.decomposition = orbit_decomposition(graph, sym)

        n_sites = graph.n_sites
        labels: List[str] = []
        operators: List[np.ndarray] = []

        if sym.kind is SymmetryKind.THREE_BODY_DIAGONAL:
            if n_sites != 3:
                raise DimensionError(
                    f"Three-body diagonal hamiltonian needs 3 sites: {n_sites}"
                )
            for axis in Axis:
                labels.append(f"g_{axis.label * 3}")
                operators.append(_triple_product(axis))
        else:
            for orbit_index, oriented in enumerate(self.decomposition.oriented_edges):
                for mu, nu in self.coupling_indices(orbit_index):
                    labels.append(f"h{orbit_index}_{mu.label}{nu.label}")
                    operator = self._pair_sum(oriented, mu, nu)
                    if mu != nu and self.is_symmetric_orbit(orbit_index):
                        operator = operator + self._pair_sum(oriented, nu, mu)
                    operators.append(operator)
            for orbit_index, sites in enumerate(self.decomposition.site_orbits):
                for axis in Axis:
                    labels.append(f"b{orbit_index}_{axis.label}")
                    operators.append(
                        sum(_embedded_pauli(n_sites, site, axis) for site in sites)
                    )

        self.labels = labels
        dimension = 2**n_sites
        if operators:
            self.basis = np.stack(operators)
        else:
            self.basis = np.zeros((0, dimension, dimension), dtype=complex)
        logger.debug(
            f"Hamiltonian model: {n_sites} sites, {len(graph.edges)} edges, "
            f"{sym.kind.value} symmetry, {self.parameter_count} parameters"
        )

    def _pair_sum(self, oriented: Iterable[Edge], mu: Axis, nu: Axis) -> np.ndarray:
        n_sites = self.graph.n_sites
        return sum(
            _embedded_pauli(n_sites, p, mu) @ _embedded_pauli(n_sites, q, nu)
            for p, q in oriented
        )

    def is_symmetric_orbit(self, orbit_index: int) -> bool:
        return (
            self.symmetric_couplings
            or self.decomposition.symmetric_flags[orbit_index]
        )

    def coupling_indices(self, orbit_index: int) -> Tuple[Tuple[Axis, Axis], ...]:
        if self.is_symmetric_orbit(orbit_index):
            return SYMMETRIC_COUPLING_INDICES
        return FULL_COUPLING_INDICES

    @property
    def n_sites(self) -> int:
        return self.graph.n_sites

    @property
    def parameter_count(self) -> int:
        return len(self.labels)

    def matrix(self, flat: np.ndarray) -> np.ndarray:
        return np.tensordot(flat, self.basis, axes=(0, 0))

    def assemble(self, flat: np.ndarray) -> HamiltonianMatrix:
        if flat.shape != (self.parameter_count,):
            raise DimensionError(
                f"Expected {self.parameter_count} parameters, got shape {flat.shape}"
            )
        return HamiltonianMatrix(self.n_sites, self.matrix(flat))

    def to_parameters(self, flat: np.ndarray) -> ParameterVector:
        if flat.shape != (self.parameter_count,):
            raise DimensionError(
                f"Expected {self.parameter_count} parameters, got shape {flat.shape}"
            )
        if self.sym.kind is SymmetryKind.THREE_BODY_DIAGONAL:
            return ParameterVector(three_body=flat.astype(float).copy())

        cursor = 0
        couplings = []
        for orbit_index in range(len(self.decomposition.edge_orbits)):
            h = np.zeros((3, 3))
            for mu, nu in self.coupling_indices(orbit_index):
                h[mu, nu] = flat[cursor]
                if self.is_symmetric_orbit(orbit_index):
                    h[nu, mu] = flat[cursor]
                cursor += 1
            couplings.append((orbit_index, h))
        fields = []
        for orbit_index in range(len(self.decomposition.site_orbits)):
            fields.append((orbit_index, flat[cursor : cursor + 3].astype(float).copy()))
            cursor += 3
        return ParameterVector(tuple(couplings), tuple(fields))

    def to_flat(self, params: ParameterVector) -> np.ndarray:
        if self.sym.kind is SymmetryKind.THREE_BODY_DIAGONAL:
            if params.three_body is None or params.three_body.shape != (3,):
                raise DimensionError("Three-body parameters need a 3-vector")
            return params.three_body.astype(float)

        couplings = dict(params.coupling_orbits)
        fields = dict(params.field_orbits)
        if set(couplings) != set(range(len(self.decomposition.edge_orbits))):
            raise DimensionError(
                f"Coupling orbits {sorted(couplings)} do not match "
                f"{len(self.decomposition.edge_orbits)} edge orbits"
            )
        if set(fields) != set(range(len(self.decomposition.site_orbits))):
            raise DimensionError(
                f"Field orbits {sorted(fields)} do not match "
                f"{len(self.decomposition.site_orbits)} site orbits"
            )

        values: List[float] = []
        for orbit_index in range(len(self.decomposition.edge_orbits)):
            h = np.asarray(couplings[orbit_index], dtype=float)
            if h.shape != (3, 3):
                raise DimensionError(f"Coupling matrix must be 3x3: {h.shape}")
            if self.is_symmetric_orbit(orbit_index) and not np.allclose(
                h, h.T, rtol=0.0, atol=settings.HERMITIAN_TOLERANCE
            ):
                raise SymmetryError(
                    f"Edge orbit {orbit_index} requires a symmetric coupling matrix"
                )
            values.extend(float(h[mu, nu]) for mu, nu in self.coupling_indices(orbit_index))
        for orbit_index in range(len(self.decomposition.site_orbits)):
            b = np.asarray(fields[orbit_index], dtype=float)
            if b.shape != (3,):
                raise DimensionError(f"Field vector must have 3 entries: {b.shape}")
            values.extend(float(value) for value in b)
        return np.array(values)


@typechecked
def assemble(
    params: ParameterVector,
    graph: InteractionGraph,
    sym: SymmetryClass,
    symmetric_couplings: bool = False,
) -> HamiltonianMatrix:
    model = HamiltonianModel(graph, sym, symmetric_couplings)
    return model.assemble(model.to_flat(params))


@typechecked
def uniform_parameters(
    graph: InteractionGraph,
    sym: SymmetryClass,
    coupling: np.ndarray,
    field_vector: Optional[np.ndarray] = None,
) -> ParameterVector:
    """Same coupling matrix on every edge orbit and same field on every site orbit."""
    decomposition = orbit_decomposition(graph, sym)
    if field_vector is None:
        field_vector = np.zeros(3)
    return ParameterVector(
        tuple((k, coupling.copy()) for k in range(len(decomposition.edge_orbits))),
        tuple((k, field_vector.copy()) for k in range(len(decomposition.site_orbits))),
    )
