import copy
import importlib.util
import inspect
import json
import re
from importlib.machinery import SourceFileLoader
from pathlib import Path
from textwrap import indent
from typing import Any, Dict, Optional, Protocol, Type, Union, runtime_checkable

from schema import And, Or, Schema, SchemaError, Optional as SchemaOptional
from typeguard import typechecked

from two_body_qsl.errors import ConfigError, TwoBodyQslError
from two_body_qsl.operators import InteractionGraph, SymmetryClass, orbit_decomposition
from two_body_qsl.optimizer import LocalSearch, OptimizeConfig, TimeSegment
from two_body_qsl.states import TargetFamily, TargetSpec


@typechecked
@runtime_checkable
class RunConfigDefinition(Protocol):
    target: dict
    n_sites: int
    time_grid: list


Number = And(Or(int, float), lambda value: not isinstance(value, bool))
PositiveNumber = And(Number, lambda value: value > 0)
SitePair = And([And(int, lambda site: site >= 1)], lambda pair: len(pair) == 2)

TARGET_SCHEMA = Schema(
    {
        "family": Or(*[family.value for family in TargetFamily]),
        SchemaOptional("k"): And(int, lambda k: k >= 0),
    }
)

GRAPH_SCHEMA = Schema(
    Or(
        {"kind": Or("complete", "chain")},
        {"kind": "ring", "range": And(int, lambda value: value >= 1)},
        {"kind": "edges", "edges": [SitePair]},
    )
)

SYMMETRY_SCHEMA = Schema(
    {
        "kind": Or("full", "pair_swap", "unconstrained", "three_body"),
        SchemaOptional("swaps"): [SitePair],
        SchemaOptional("symmetric_couplings"): bool,
    }
)

SEGMENT_SCHEMA = Schema({"start": Number, "end": Number, "step": PositiveNumber})

RUN_CONFIG_SCHEMA = Schema(
    {
        "target": TARGET_SCHEMA,
        "n_sites": And(int, lambda n: n >= 1),
        SchemaOptional("graph", default={"kind": "complete"}): GRAPH_SCHEMA,
        SchemaOptional("symmetry", default={"kind": "full"}): SYMMETRY_SCHEMA,
        "time_grid": And([SEGMENT_SCHEMA], lambda segments: len(segments) > 0),
        SchemaOptional("restarts"): And(int, lambda value: value >= 1),
        SchemaOptional("sampling_box"): And([Number], lambda box: len(box) == 2),
        SchemaOptional("xatol"): PositiveNumber,
        SchemaOptional("fatol"): PositiveNumber,
        SchemaOptional("seed"): And(int, lambda value: value >= 0),
        SchemaOptional("epsilon"): PositiveNumber,
        SchemaOptional("threshold_level"): And(Number, lambda value: 0 <= value <= 1),
        SchemaOptional("local_search"): Or(*[method.value for method in LocalSearch]),
        SchemaOptional("warm_start"): bool,
        SchemaOptional("refine"): bool,
        SchemaOptional("refine_jump"): PositiveNumber,
        SchemaOptional("max_iterations"): And(int, lambda value: value >= 1),
        SchemaOptional("polish"): bool,
    }
)


@typechecked
class RunConfig:
    definition: Dict[str, Any]
    optimize: OptimizeConfig

    def __init__(self, conf_def: Any):
        raw = conf_def if isinstance(conf_def, dict) else definition_to_dict(conf_def)
        try:
            self.definition = RUN_CONFIG_SCHEMA.validate(copy.deepcopy(raw))
        except SchemaError as err:
            raise ConfigError(
                error_message(f"Invalid run config ({err.code})", raw)
            ) from err
        try:
            self.optimize = build_optimize_config(self.definition)
        except ConfigError:
            raise
        except TwoBodyQslError as err:
            raise ConfigError(
                error_message(f"Inconsistent run config ({err})", self.definition)
            ) from err

    def with_overrides(
        self,
        seed: Optional[int] = None,
        restarts: Optional[int] = None,
        tolerance: Optional[float] = None,
    ) -> "RunConfig":
        definition = self.snapshot()
        if seed is not None:
            definition["seed"] = seed
        if restarts is not None:
            definition["restarts"] = restarts
        if tolerance is not None:
            definition["epsilon"] = tolerance
        return RunConfig(definition)

    def snapshot(self) -> Dict[str, Any]:
        return copy.deepcopy(self.definition)

    @classmethod
    def create_by_definition(
        cls, definition_cls_or_path: Union[str, Path, Type, Dict[str, Any]]
    ) -> "RunConfig":
        if isinstance(definition_cls_or_path, dict):
            return cls(definition_cls_or_path)
        if inspect.isclass(definition_cls_or_path):
            return cls(definition_cls_or_path())

        definition_path = Path(definition_cls_or_path)
        if not definition_path.exists():
            raise ConfigError(f"Run config file not found: {definition_path}")

        if definition_path.suffix == ".json":
            try:
                with open(definition_path) as f:
                    return cls(json.load(f))
            except json.JSONDecodeError as err:
                raise ConfigError(f"Invalid json in run config: {definition_path}") from err

        definition_match = re.search(r"(.*)\.py$", definition_path.name)
        if definition_match is None:
            raise ConfigError(
                f"Run config file must be a python or json file: {definition_path}"
            )

        definition_modulename = definition_match.group(1)
        loader = SourceFileLoader(definition_modulename, str(definition_path))
        module_spec = importlib.util.spec_from_loader(definition_modulename, loader)
        assert module_spec is not None
        definition_module = importlib.util.module_from_spec(module_spec)
        try:
            loader.exec_module(definition_module)
        except SyntaxError as err:
            raise ConfigError(
                f"Invalid python syntax in run config: {definition_path}"
            ) from err

        definition_cls_candidates = [
            candidate
            for candidate in vars(definition_module).values()
            if inspect.isclass(candidate)
            and re.search(r"RunConfig", candidate.__name__) is not None
        ]
        if len(definition_cls_candidates) < 1:
            raise ConfigError(f"Class not found in run config: {definition_path}")
        if 1 < len(definition_cls_candidates):
            raise ConfigError(
                f"Too many classes in run config: {definition_cls_candidates}"
            )

        return cls(definition_cls_candidates[0]())


@typechecked
def definition_to_dict(conf_def: Any) -> Dict[str, Any]:
    if not isinstance(conf_def, RunConfigDefinition):
        raise ConfigError(
            error_message("Run config needs target, n_sites and time_grid", conf_def)
        )
    names = [name for name in dir(conf_def) if not name.startswith("_")]
    return {
        name: getattr(conf_def, name)
        for name in names
        if not callable(getattr(conf_def, name))
    }


@typechecked
def build_graph(n_sites: int, graph_def: Dict[str, Any]) -> InteractionGraph:
    kind = graph_def["kind"]
    if kind == "complete":
        return InteractionGraph.complete(n_sites)
    if kind == "chain":
        return InteractionGraph.chain(n_sites)
    if kind == "ring":
        return InteractionGraph.ring(n_sites, graph_def["range"])
    # site labels in config files start at 1
    return InteractionGraph.from_edges(n_sites, graph_def["edges"], one_based=True)


@typechecked
def build_symmetry(symmetry_def: Dict[str, Any]) -> SymmetryClass:
    kind = symmetry_def["kind"]
    if kind != "pair_swap" and "swaps" in symmetry_def:
        raise ConfigError(error_message("Swaps only apply to pair_swap symmetry", symmetry_def))
    if kind == "full":
        return SymmetryClass.full_permutation()
    if kind == "unconstrained":
        return SymmetryClass.unconstrained()
    if kind == "three_body":
        return SymmetryClass.three_body_diagonal()
    if "swaps" not in symmetry_def:
        raise ConfigError(error_message("pair_swap symmetry needs swaps", symmetry_def))
    return SymmetryClass.pair_swap_product_one_based(
        [(i, j) for i, j in symmetry_def["swaps"]]
    )


@typechecked
def build_optimize_config(definition: Dict[str, Any]) -> OptimizeConfig:
    n_sites = definition["n_sites"]
    target_def = definition["target"]
    target = TargetSpec(TargetFamily(target_def["family"]), target_def.get("k"))
    # builds the target once so size mismatches surface at load time
    target.build(n_sites)

    graph = build_graph(n_sites, definition["graph"])
    sym = build_symmetry(definition["symmetry"])
    orbit_decomposition(graph, sym)

    segments = tuple(
        TimeSegment(float(segment["start"]), float(segment["end"]), float(segment["step"]))
        for segment in definition["time_grid"]
    )

    options: Dict[str, Any] = {}
    for name in ["restarts", "seed", "max_iterations"]:
        if name in definition:
            options[name] = definition[name]
    for name in ["xatol", "fatol", "epsilon", "threshold_level", "refine_jump"]:
        if name in definition:
            options[name] = float(definition[name])
    for name in ["warm_start", "refine", "polish"]:
        if name in definition:
            options[name] = definition[name]
    if "sampling_box" in definition:
        low, high = definition["sampling_box"]
        options["sampling_box"] = (float(low), float(high))
    if "local_search" in definition:
        options["local_search"] = LocalSearch(definition["local_search"])

    return OptimizeConfig(
        target,
        graph,
        sym,
        segments,
        symmetric_couplings=definition["symmetry"].get("symmetric_couplings", False),
        **options,
    )


@typechecked
def error_message(message: str, source_obj: Any) -> str:
    return message + ":\n" + indent(get_source_string(source_obj), "    ")


@typechecked
def get_source_string(source_obj: Any) -> str:
    if isinstance(source_obj, (dict, list, tuple, str, int, float, type(None))):
        return json.dumps(source_obj, indent=4, sort_keys=True, default=str) + "\n"
    source_cls = source_obj if inspect.isclass(source_obj) else type(source_obj)
    try:
        return inspect.getsource(source_cls)
    except (OSError, TypeError):
        return repr(source_obj) + "\n"
