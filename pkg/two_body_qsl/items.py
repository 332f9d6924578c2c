from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from typeguard import typechecked

from two_body_qsl.optimizer import FidelityCurve, OptimizeConfig


@typechecked
@dataclass
class ResultItem:
    out_dir: Path
    command: str
    started_at: str
    finished_at: str
    seed: Optional[int] = None
    config_snapshot: Optional[Dict[str, Any]] = None
    # filled in by the output pipelines
    output_files: List[Path] = field(default_factory=list)


@typechecked
@dataclass
class SweepResultItem(ResultItem):
    optimize_config: Optional[OptimizeConfig] = None
    curve: Optional[FidelityCurve] = None
    threads: int = 1


@typechecked
@dataclass
class TableItem(ResultItem):
    file_name: str = ""
    header: Sequence[str] = ()
    rows: Sequence[Sequence[float]] = ()


@typechecked
@dataclass
class DocumentItem(ResultItem):
    file_name: str = ""
    content: Any = None
