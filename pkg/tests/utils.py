from pathlib import Path
from typing import Any, Dict, List, Optional, Type

import numpy as np
from dill.source import dumpsource

from two_body_qsl.operators import InteractionGraph, ParameterVector, SymmetryClass
from two_body_qsl.optimizer import FidelityCurve, OptimizeConfig, TimeSegment
from two_body_qsl.states import TargetFamily, TargetSpec


def make_temporary_run_config_file(tmpdir: Path, cls: Type) -> Path:
    file_path = tmpdir.joinpath(f"{cls.__name__}.py")
    assert not file_path.exists()
    file_path.write_text(dumpsource(cls, alias=cls.__name__, enclose=False))
    assert file_path.exists()
    return file_path


def ghz3_definition(**overrides: Any) -> Dict[str, Any]:
    definition: Dict[str, Any] = {
        "target": {"family": "ghz"},
        "n_sites": 3,
        "time_grid": [{"start": 1.4, "end": 1.7, "step": 0.1}],
        "symmetry": {"kind": "three_body"},
        "restarts": 4,
    }
    definition.update(overrides)
    return definition


def three_body_config(
    time_grid: Optional[List[TimeSegment]] = None, **options: Any
) -> OptimizeConfig:
    if time_grid is None:
        time_grid = [TimeSegment(1.4, 1.7, 0.1)]
    return OptimizeConfig(
        TargetSpec(TargetFamily.GHZ),
        InteractionGraph.complete(3),
        SymmetryClass.three_body_diagonal(),
        tuple(time_grid),
        **options,
    )


def fake_curve() -> FidelityCurve:
    flat = np.array([[0.0, -1.0, 0.0], [0.0, -1.0, 0.25]])
    return FidelityCurve(
        np.array([0.0, 1.6]),
        np.array([0.5, 1.0]),
        flat,
        tuple(ParameterVector(three_body=row.copy()) for row in flat),
        np.array([1, 120]),
        ("g_xxx", "g_yyy", "g_zzz"),
    )
