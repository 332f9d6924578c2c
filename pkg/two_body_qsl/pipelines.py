import csv
import importlib
import json
import logging
import os
from typing import Any, Dict, List, Sequence

import numpy as np
from typeguard import typechecked

from two_body_qsl import __version__, settings
from two_body_qsl.items import DocumentItem, ResultItem, SweepResultItem, TableItem
from two_body_qsl.operators import SymmetryKind
from two_body_qsl.optimizer import minimal_time, threshold_time
from two_body_qsl.states import symmetric_weight

logger = logging.getLogger(__name__)


@typechecked
def format_float(value: float) -> str:
    return format(float(value), settings.FLOAT_FORMAT)


@typechecked
def write_table(path: str, header: Sequence[str], rows: Sequence[Sequence[float]]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(value) for value in row])


@typechecked
def write_json(path: str, content: Any) -> None:
    with open(path, "w") as f:
        json.dump(content, f, indent=2, sort_keys=True)
        f.write("\n")


@typechecked
class PrepareOutputDirPipeline:
    def process_item(self, item: ResultItem) -> ResultItem:
        os.makedirs(item.out_dir, exist_ok=True)
        return item


@typechecked
class SaveCurveTablePipeline:
    def process_item(self, item: ResultItem) -> ResultItem:
        if isinstance(item, SweepResultItem) and item.curve is not None:
            curve = item.curve
            file_path = item.out_dir / settings.CURVE_FILE_NAME
            rows = [
                [t, fidelity, *parameters]
                for t, fidelity, parameters in zip(
                    curve.times, curve.fidelities, curve.flat_parameters
                )
            ]
            write_table(str(file_path), ["t", "fidelity", *curve.labels], rows)
            item.output_files.append(file_path)
            logger.debug(f"Save fidelity curve: {len(rows)} rows -> {file_path}")
        return item


@typechecked
class SaveTablePipeline:
    def process_item(self, item: ResultItem) -> ResultItem:
        if isinstance(item, TableItem):
            file_path = item.out_dir / item.file_name
            write_table(str(file_path), item.header, item.rows)
            item.output_files.append(file_path)
            logger.debug(f"Save table: {len(item.rows)} rows -> {file_path}")
        return item


@typechecked
class SaveSummaryPipeline:
    def process_item(self, item: ResultItem) -> ResultItem:
        if isinstance(item, SweepResultItem) and item.curve is not None:
            assert item.optimize_config is not None
            file_path = item.out_dir / settings.SUMMARY_FILE_NAME
            write_json(str(file_path), sweep_summary(item))
            item.output_files.append(file_path)
            logger.debug(f"Save summary -> {file_path}")
        return item


@typechecked
def sweep_summary(item: SweepResultItem) -> Dict[str, Any]:
    cfg = item.optimize_config
    curve = item.curve
    assert cfg is not None and curve is not None
    best_index = int(np.argmax(curve.fidelities))
    summary: Dict[str, Any] = {
        "target": cfg.target.label,
        "n_sites": cfg.n_sites,
        "symmetry": cfg.sym.kind.value,
        "parameter_count": len(curve.labels),
        "time_points": len(curve.times),
        "evaluations": int(np.sum(curve.evaluations)),
        "epsilon": cfg.epsilon,
        "minimal_time": minimal_time(curve, cfg.epsilon),
        "threshold_level": cfg.threshold_level,
        "threshold_time": threshold_time(curve, cfg.threshold_level),
        "best_fidelity": curve.best_fidelity,
        "best_fidelity_rounded": round(curve.best_fidelity, settings.FIDELITY_DISPLAY_DECIMALS),
        "best_time": float(curve.times[best_index]),
    }
    if cfg.sym.kind is SymmetryKind.FULL_PERMUTATION:
        # the evolved state never leaves the symmetric subspace
        summary["symmetric_ceiling"] = symmetric_weight(cfg.target.build(cfg.n_sites))
    return summary


@typechecked
class SaveDocumentPipeline:
    def process_item(self, item: ResultItem) -> ResultItem:
        if isinstance(item, DocumentItem):
            file_path = item.out_dir / item.file_name
            write_json(str(file_path), item.content)
            item.output_files.append(file_path)
            logger.debug(f"Save document -> {file_path}")
        return item


@typechecked
class SaveConfigSnapshotPipeline:
    def process_item(self, item: ResultItem) -> ResultItem:
        if item.config_snapshot is not None:
            file_path = item.out_dir / settings.CONFIG_SNAPSHOT_FILE_NAME
            write_json(str(file_path), item.config_snapshot)
            item.output_files.append(file_path)
        return item


@typechecked
class SaveManifestPipeline:
    def process_item(self, item: ResultItem) -> ResultItem:
        file_path = item.out_dir / settings.MANIFEST_FILE_NAME
        manifest: Dict[str, Any] = {
            "command": item.command,
            "version": __version__,
            "seed": item.seed,
            "config": item.config_snapshot,
            "started_at": item.started_at,
            "finished_at": item.finished_at,
            "output_files": [path.name for path in item.output_files],
        }
        if isinstance(item, SweepResultItem):
            manifest["threads"] = item.threads
        write_json(str(file_path), manifest)
        item.output_files.append(file_path)
        logger.info(f"Results written to {item.out_dir}")
        return item


@typechecked
def load_object(path: str) -> Any:
    """Import an object from its dotted path, e.g. "two_body_qsl.pipelines.SaveTablePipeline"."""
    module_name, _, name = path.rpartition(".")
    return getattr(importlib.import_module(module_name), name)


@typechecked
def load_pipelines() -> List[Any]:
    """Instantiate the OUTPUT_PIPELINES classes, lowest order value first."""
    ordered = sorted(settings.OUTPUT_PIPELINES.items(), key=lambda pair: pair[1])
    return [load_object(path)() for path, _ in ordered]


@typechecked
def process_item(item: ResultItem) -> ResultItem:
    # each pipeline gets the item returned by the previous one
    for pipeline in load_pipelines():
        item = pipeline.process_item(item)
    return item
