import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize
from typeguard import typechecked

from two_body_qsl import settings
from two_body_qsl.dynamics import evolve_amplitudes, normalize_spectrum, spectrum_of
from two_body_qsl.errors import ConfigError, InvalidArgumentError, ZeroBandwidthError
from two_body_qsl.operators import (
    HamiltonianModel,
    InteractionGraph,
    ParameterVector,
    SymmetryClass,
)
from two_body_qsl.states import TargetSpec, zero_state

logger = logging.getLogger(__name__)
progress_logger = logging.getLogger(settings.PROGRESS_LOGGER_NAME)


class LocalSearch(Enum):
    NELDER_MEAD = "nelder-mead"
    BFGS = "bfgs"


@typechecked
@dataclass(frozen=True)
class TimeSegment:
    start: float
    end: float
    step: float

    def __post_init__(self) -> None:
        if self.start < 0 or self.end < self.start:
            raise ConfigError(f"Invalid time segment [{self.start}, {self.end}]")
        if not settings.MIN_STEP <= self.step <= settings.MAX_STEP:
            raise ConfigError(
                f"Time step {self.step} outside [{settings.MIN_STEP}, {settings.MAX_STEP}]"
            )

    def times(self) -> np.ndarray:
        count = int(np.floor((self.end - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(count)


@typechecked
@dataclass(frozen=True)
class OptimizeConfig:
    target: TargetSpec
    graph: InteractionGraph
    sym: SymmetryClass
    time_grid: Tuple[TimeSegment, ...]
    symmetric_couplings: bool = False
    restarts: int = settings.DEFAULT_RESTARTS
    sampling_box: Tuple[float, float] = settings.DEFAULT_SAMPLING_BOX
    xatol: float = settings.DEFAULT_XATOL
    fatol: float = settings.DEFAULT_FATOL
    seed: int = settings.DEFAULT_SEED
    epsilon: float = settings.DEFAULT_EPSILON
    threshold_level: float = settings.DEFAULT_THRESHOLD_LEVEL
    local_search: LocalSearch = LocalSearch(settings.DEFAULT_LOCAL_SEARCH)
    warm_start: bool = True
    refine: bool = True
    refine_jump: float = settings.REFINE_JUMP
    max_iterations: Optional[int] = None
    polish: bool = True

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ConfigError(f"Need at least one restart: {self.restarts}")
        if self.epsilon <= 0:
            raise ConfigError(f"Fidelity tolerance must be positive: {self.epsilon}")
        low, high = self.sampling_box
        if not low < high:
            raise ConfigError(f"Empty sampling box: {self.sampling_box}")
        if not self.time_grid:
            raise ConfigError("Time grid needs at least one segment")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ConfigError(f"Invalid iteration limit: {self.max_iterations}")

    @property
    def n_sites(self) -> int:
        return self.graph.n_sites

    def times(self) -> np.ndarray:
        times = np.concatenate([segment.times() for segment in self.time_grid])
        # segments may share end points
        return np.unique(np.round(times, 12))


@typechecked
class FidelityObjective:
    """Fidelity of the evolved zero state with the target, after bandwidth normalisation."""

    model: HamiltonianModel

    def __init__(self, cfg: OptimizeConfig) -> None:
        self.model = HamiltonianModel(cfg.graph, cfg.sym, cfg.symmetric_couplings)
        self.initial = zero_state(cfg.n_sites).amplitudes
        self.target = cfg.target.build(cfg.n_sites).amplitudes

    def static_overlap(self) -> float:
        return float(abs(np.vdot(self.target, self.initial)) ** 2)

    def __call__(self, flat: np.ndarray, t: float) -> float:
        if t == 0:
            return self.static_overlap()
        try:
            spectrum = normalize_spectrum(spectrum_of(self.model.matrix(flat)))
        except ZeroBandwidthError:
            return 0.0
        evolved = evolve_amplitudes(spectrum, t, self.initial)
        return float(abs(np.vdot(self.target, evolved)) ** 2)


@typechecked
def objective(params: ParameterVector, t: float, cfg: OptimizeConfig) -> float:
    fidelity_of = FidelityObjective(cfg)
    return fidelity_of(fidelity_of.model.to_flat(params), t)


@typechecked
@dataclass(frozen=True, eq=False)
class RestartResult:
    index: int
    fidelity: float
    flat: np.ndarray
    evaluations: int


@typechecked
@dataclass(frozen=True, eq=False)
class TimePointResult:
    t: float
    fidelity: float
    flat: np.ndarray
    params: ParameterVector
    evaluations: int
    best_restart: int


def restart_start(cfg: OptimizeConfig, t: float, restart: int, size: int) -> np.ndarray:
    # seeds depend on the restart counter only, so fewer restarts is a prefix of more
    seed_sequence = np.random.SeedSequence([cfg.seed, int(round(t * 1e6)), restart])
    rng = np.random.default_rng(seed_sequence)
    low, high = cfg.sampling_box
    return rng.uniform(low, high, size=size)


def _rescaled(flat: np.ndarray) -> np.ndarray:
    largest = float(np.max(np.abs(flat), initial=0.0))
    if largest == 0.0 or not np.isfinite(largest):
        return flat
    return flat / largest


def _minimize(
    fidelity_of: FidelityObjective,
    t: float,
    start: np.ndarray,
    cfg: OptimizeConfig,
    method: LocalSearch,
) -> Tuple[np.ndarray, int]:
    def infidelity(flat: np.ndarray) -> float:
        return 1.0 - fidelity_of(flat, t)

    if method is LocalSearch.NELDER_MEAD:
        options: Dict[str, object] = {
            "xatol": cfg.xatol,
            "fatol": cfg.fatol,
            "adaptive": True,
        }
        if cfg.max_iterations is not None:
            options["maxiter"] = cfg.max_iterations
        result = minimize(infidelity, start, method="Nelder-Mead", options=options)
    else:
        options = {"gtol": settings.BFGS_GTOL}
        if cfg.max_iterations is not None:
            options["maxiter"] = cfg.max_iterations
        result = minimize(infidelity, start, method="BFGS", options=options)
    return np.asarray(result.x, dtype=float), int(result.nfev)


def run_restart(
    fidelity_of: FidelityObjective,
    t: float,
    start: np.ndarray,
    cfg: OptimizeConfig,
    index: int,
) -> RestartResult:
    flat, evaluations = _minimize(fidelity_of, t, start, cfg, cfg.local_search)
    if cfg.polish:
        # a fresh simplex around the optimum escapes collapsed ones
        flat, more = _minimize(fidelity_of, t, flat, cfg, LocalSearch.NELDER_MEAD)
        evaluations += more
    flat = _rescaled(flat)
    fidelity = fidelity_of(flat, t)
    start_fidelity = fidelity_of(start, t)
    if start_fidelity > fidelity:
        flat, fidelity = start, start_fidelity
    logger.debug(f"t={t:.6f} restart {index}: fidelity {fidelity:.12f} ({evaluations} evaluations)")
    return RestartResult(index, fidelity, flat, evaluations + 2)


@typechecked
def maximize_at_time(
    t: float,
    cfg: OptimizeConfig,
    warm_start: Optional[np.ndarray] = None,
    threads: int = settings.DEFAULT_THREADS,
    fidelity_of: Optional[FidelityObjective] = None,
) -> TimePointResult:
    if t < 0:
        raise InvalidArgumentError(f"Evolution time must be non-negative: {t}")
    if fidelity_of is None:
        fidelity_of = FidelityObjective(cfg)
    model = fidelity_of.model
    size = model.parameter_count

    if t == 0:
        flat = restart_start(cfg, t, 0, size)
        fidelity = fidelity_of.static_overlap()
        return TimePointResult(t, fidelity, flat, model.to_parameters(flat), 1, 0)

    starts = [restart_start(cfg, t, index, size) for index in range(cfg.restarts)]
    if warm_start is not None:
        starts.append(np.asarray(warm_start, dtype=float))

    def run(index: int) -> RestartResult:
        return run_restart(fidelity_of, t, starts[index], cfg, index)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(run, range(len(starts))))
    else:
        results = [run(index) for index in range(len(starts))]

    # strict comparison keeps the lowest restart index on ties
    best = results[0]
    for result in results[1:]:
        if result.fidelity > best.fidelity:
            best = result
    evaluations = sum(result.evaluations for result in results)

    logger.info(f"t={t:.6f}: best fidelity {best.fidelity:.12f} from restart {best.index}")
    progress_logger.info(
        "time point",
        extra={
            "progress": {
                "t": t,
                "fidelity": best.fidelity,
                "evaluations": evaluations,
                "restarts": len(starts),
                "best_restart": best.index,
            }
        },
    )
    return TimePointResult(
        t,
        best.fidelity,
        best.flat,
        model.to_parameters(best.flat),
        evaluations,
        best.index,
    )


@typechecked
@dataclass(frozen=True, eq=False)
class FidelityCurve:
    times: np.ndarray
    fidelities: np.ndarray
    flat_parameters: np.ndarray
    parameters: Tuple[ParameterVector, ...]
    evaluations: np.ndarray
    labels: Tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        count = len(self.times)
        if not (
            len(self.fidelities) == count
            and len(self.flat_parameters) == count
            and len(self.parameters) == count
            and len(self.evaluations) == count
        ):
            raise InvalidArgumentError("Fidelity curve columns differ in length")

    @property
    def best_fidelity(self) -> float:
        return float(np.max(self.fidelities, initial=0.0))

    @classmethod
    def from_points(
        cls, points: List[TimePointResult], labels: Tuple[str, ...]
    ) -> "FidelityCurve":
        points = sorted(points, key=lambda point: point.t)
        size = len(labels)
        return cls(
            np.array([point.t for point in points], dtype=float),
            np.array([point.fidelity for point in points], dtype=float),
            np.array([point.flat for point in points], dtype=float).reshape(len(points), size),
            tuple(point.params for point in points),
            np.array([point.evaluations for point in points], dtype=int),
            labels,
        )


def _refinement_midpoints(points: List[TimePointResult], jump: float) -> List[Tuple[float, TimePointResult]]:
    midpoints = []
    for left, right in zip(points, points[1:]):
        half_gap = (right.t - left.t) / 2
        if abs(right.fidelity - left.fidelity) > jump and half_gap >= settings.MIN_STEP:
            midpoints.append((left.t + half_gap, left))
    return midpoints


@typechecked
def sweep(cfg: OptimizeConfig, threads: int = settings.DEFAULT_THREADS) -> FidelityCurve:
    fidelity_of = FidelityObjective(cfg)
    times = cfg.times()
    logger.info(
        f"Sweeping {len(times)} time points for {cfg.target.label} on {cfg.n_sites} sites "
        f"({fidelity_of.model.parameter_count} parameters, {cfg.restarts} restarts)"
    )

    points: List[TimePointResult] = []
    previous: Optional[TimePointResult] = None
    for t in times:
        warm_start = previous.flat if cfg.warm_start and previous is not None else None
        previous = maximize_at_time(float(t), cfg, warm_start, threads, fidelity_of)
        points.append(previous)

    if cfg.refine:
        for refine_round in range(settings.REFINE_ROUNDS):
            midpoints = _refinement_midpoints(points, cfg.refine_jump)
            if not midpoints:
                break
            logger.info(f"Refinement round {refine_round + 1}: {len(midpoints)} new time points")
            for t, left in midpoints:
                warm_start = left.flat if cfg.warm_start else None
                points.append(maximize_at_time(t, cfg, warm_start, threads, fidelity_of))
            points.sort(key=lambda point: point.t)

    return FidelityCurve.from_points(points, tuple(fidelity_of.model.labels))


@typechecked
def minimal_time(
    curve: FidelityCurve, epsilon: float = settings.DEFAULT_EPSILON
) -> Optional[float]:
    if epsilon <= 0:
        raise InvalidArgumentError(f"Fidelity tolerance must be positive: {epsilon}")
    return threshold_time(curve, 1 - epsilon)


@typechecked
def threshold_time(curve: FidelityCurve, level: float) -> Optional[float]:
    if not 0 <= level <= 1:
        raise InvalidArgumentError(f"Threshold level must lie in [0, 1]: {level}")
    for t, value in zip(curve.times, curve.fidelities):
        if value >= level:
            return float(t)
    return None
