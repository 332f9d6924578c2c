import json
from os import path
from pathlib import Path
from typing import Any, Dict, List

import pytest

from two_body_qsl.conf import *
from two_body_qsl.operators import SymmetryKind
from two_body_qsl.optimizer import LocalSearch

from .utils import ghz3_definition, make_temporary_run_config_file

run_config_dir = path.join(path.dirname(__file__), "run_configs")


def test_run_config_init() -> None:
    config = RunConfig(
        {
            "target": {"family": "w"},
            "n_sites": 3,
            "time_grid": [{"start": 3.0, "end": 3.2, "step": 0.1}],
        }
    )
    cfg = config.optimize
    assert cfg.target.label == "w"
    assert cfg.graph.edges == ((0, 1), (0, 2), (1, 2))
    assert cfg.sym.kind is SymmetryKind.FULL_PERMUTATION
    assert cfg.restarts == 200
    # defaults are filled into the snapshot
    assert config.snapshot()["graph"] == {"kind": "complete"}
    assert config.snapshot()["symmetry"] == {"kind": "full"}

    config = RunConfig(
        {
            "target": {"family": "ame52"},
            "n_sites": 5,
            "symmetry": {
                "kind": "pair_swap",
                "swaps": [[2, 4], [3, 5]],
                "symmetric_couplings": True,
            },
            "time_grid": [{"start": 9, "end": 11, "step": 0.1}],
            "local_search": "bfgs",
            "sampling_box": [-2, 2],
            "max_iterations": 500,
            "warm_start": False,
        }
    )
    cfg = config.optimize
    assert cfg.sym.swaps == ((1, 3), (2, 4))
    assert cfg.symmetric_couplings
    assert cfg.local_search is LocalSearch.BFGS
    assert cfg.sampling_box == (-2.0, 2.0)
    assert cfg.max_iterations == 500
    assert not cfg.warm_start
    assert cfg.time_grid[0].start == 9.0


def test_run_config_graphs() -> None:
    config = RunConfig(ghz3_definition(graph={"kind": "chain"}, symmetry={"kind": "unconstrained"}))
    assert config.optimize.graph.edges == ((0, 1), (1, 2))

    config = RunConfig(
        ghz3_definition(
            graph={"kind": "edges", "edges": [[1, 2], [2, 3]]},
            symmetry={"kind": "pair_swap", "swaps": [[1, 3]]},
        )
    )
    assert config.optimize.graph.edges == ((0, 1), (1, 2))

    config = RunConfig(
        ghz3_definition(
            n_sites=6, graph={"kind": "ring", "range": 2}, symmetry={"kind": "unconstrained"}
        )
    )
    assert len(config.optimize.graph.edges) == 12


def test_run_config_graph_symmetry_mismatch() -> None:
    # swapping sites 1 and 2 maps the ring edge (1, 5) outside the ring
    with pytest.raises(ConfigError):
        RunConfig(
            ghz3_definition(
                n_sites=6, graph={"kind": "ring", "range": 2}, symmetry={"kind": "full"}
            )
        )


def test_run_config_init_error() -> None:
    with pytest.raises(ConfigError):
        RunConfig(ghz3_definition(unknown_key=1))
    with pytest.raises(ConfigError):
        RunConfig(ghz3_definition(target={"family": "cluster"}))
    with pytest.raises(ConfigError):
        RunConfig(ghz3_definition(n_sites=0))
    with pytest.raises(ConfigError):
        RunConfig(ghz3_definition(time_grid=[]))
    with pytest.raises(ConfigError):
        RunConfig(ghz3_definition(time_grid=[{"start": 0, "end": 1, "step": 0.5}]))
    with pytest.raises(ConfigError):
        RunConfig(ghz3_definition(restarts=0))
    with pytest.raises(ConfigError):
        RunConfig(ghz3_definition(sampling_box=[1, -1]))
    with pytest.raises(ConfigError):
        RunConfig(ghz3_definition(symmetry={"kind": "pair_swap"}))
    with pytest.raises(ConfigError):
        RunConfig(ghz3_definition(symmetry={"kind": "full", "swaps": [[1, 2]]}))
    # the swap does not preserve the chain
    with pytest.raises(ConfigError):
        RunConfig(
            ghz3_definition(
                graph={"kind": "chain"},
                symmetry={"kind": "pair_swap", "swaps": [[1, 2]]},
            )
        )
    with pytest.raises(ConfigError):
        RunConfig(ghz3_definition(target={"family": "ame52"}))
    with pytest.raises(ConfigError):
        RunConfig(ghz3_definition(target={"family": "dicke"}))
    with pytest.raises(ConfigError):
        RunConfig(ghz3_definition(target={"family": "dicke", "k": 4}))

    class NoTarget:
        n_sites = 3
        time_grid: List[Dict[str, float]] = []

    with pytest.raises(ConfigError):
        RunConfig(NoTarget())


def test_run_config_error_message() -> None:
    with pytest.raises(ConfigError) as exc_info:
        RunConfig(ghz3_definition(restarts=0))
    message = str(exc_info.value)
    assert message.startswith("Invalid run config")
    assert '    "restarts": 0' in message


def test_with_overrides() -> None:
    config = RunConfig(ghz3_definition(seed=1))
    overridden = config.with_overrides(seed=5, restarts=9, tolerance=1e-3)
    assert overridden.optimize.seed == 5
    assert overridden.optimize.restarts == 9
    assert overridden.optimize.epsilon == 1e-3
    assert overridden.snapshot()["seed"] == 5
    # the original is untouched
    assert config.optimize.seed == 1

    assert config.with_overrides().snapshot() == config.snapshot()


def test_create_by_definition() -> None:
    config = RunConfig.create_by_definition(
        path.join(run_config_dir, "run_config_000.py")
    )
    assert config.optimize.seed == 7
    assert config.optimize.sym.kind is SymmetryKind.THREE_BODY_DIAGONAL

    config = RunConfig.create_by_definition(
        Path(run_config_dir).joinpath("run_config_ame_pair_swap.json")
    )
    assert config.optimize.target.label == "ame52"
    assert config.optimize.sym.swaps == ((1, 3), (2, 4))

    with pytest.raises(ConfigError):
        RunConfig.create_by_definition(
            path.join(run_config_dir, "run_config_duplicated.py")
        )
    with pytest.raises(ConfigError):
        RunConfig.create_by_definition(
            path.join(run_config_dir, "run_config_no_class.py")
        )
    with pytest.raises(ConfigError):
        RunConfig.create_by_definition(path.join(run_config_dir, "missing.py"))

    class WRunConfig:
        target = {"family": "w"}
        n_sites = 4
        time_grid = [{"start": 4.0, "end": 4.2, "step": 0.1}]

    config = RunConfig.create_by_definition(WRunConfig)
    assert config.optimize.n_sites == 4


def test_create_by_definition_file(tmpdir: Any) -> None:
    tmpdir = Path(tmpdir)

    class DickeRunConfig:
        target = {"family": "dicke", "k": 2}
        n_sites = 4
        time_grid = [{"start": 23.0, "end": 24.0, "step": 0.1}]
        restarts = 3

    config_path = make_temporary_run_config_file(tmpdir, DickeRunConfig)
    config = RunConfig.create_by_definition(config_path)
    assert config.optimize.target.label == "dicke2"
    assert config.optimize.restarts == 3

    # a snapshot re-loads to the same definition
    snapshot_path = tmpdir.joinpath("config.json")
    snapshot_path.write_text(json.dumps(config.snapshot()))
    assert RunConfig.create_by_definition(snapshot_path).snapshot() == config.snapshot()

    broken_json = tmpdir.joinpath("broken.json")
    broken_json.write_text("{")
    with pytest.raises(ConfigError):
        RunConfig.create_by_definition(broken_json)

    broken_python = tmpdir.joinpath("broken.py")
    broken_python.write_text("class BrokenRunConfig(:\n")
    with pytest.raises(ConfigError):
        RunConfig.create_by_definition(broken_python)

    text_file = tmpdir.joinpath("config.txt")
    text_file.write_text("target = ghz")
    with pytest.raises(ConfigError):
        RunConfig.create_by_definition(text_file)


def test_get_source_string() -> None:
    assert get_source_string({"b": 1, "a": [1, 2]}).startswith("{\n")
    assert error_message("Broken", {"a": 1}) == 'Broken:\n    {\n        "a": 1\n    }\n'

    class SourceRunConfig:
        n_sites = 3

    assert "n_sites = 3" in get_source_string(SourceRunConfig)
    assert "n_sites = 3" in get_source_string(SourceRunConfig())
