import json
import os
import sys
import traceback
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import click
import numpy as np
from typeguard import typechecked

from two_body_qsl import settings
from two_body_qsl.bounds import (
    energy_for_deadline,
    ghz_two_body_time,
    mt_bound,
    pairwise_sequence_time,
    sequential_ghz_time,
    three_body_time,
)
from two_body_qsl.conf import RunConfig
from two_body_qsl.dynamics import eigendecompose, fidelity_series, normalize_spectrum
from two_body_qsl.errors import CombinationNotInCatalogError, ConfigError, TwoBodyQslError
from two_body_qsl.items import DocumentItem, SweepResultItem, TableItem
from two_body_qsl.logformatters import configure_logging
from two_body_qsl.optimizer import TimeSegment, minimal_time, sweep, threshold_time
from two_body_qsl.pipelines import process_item
from two_body_qsl.reference import (
    GraphKind,
    ReferenceEntry,
    catalog,
    reference_hamiltonian,
    verify_entry,
)
from two_body_qsl.states import TargetFamily, TargetSpec, dicke, zero_state


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CLAIM_FAILED = 2
EXIT_INTERNAL = 3

FAMILY_CHOICE = click.Choice([family.value for family in TargetFamily], case_sensitive=False)
CATALOG_FAMILY_CHOICE = click.Choice(["ghz", "w"], case_sensitive=False)
GRAPH_CHOICE = click.Choice([kind.value for kind in GraphKind], case_sensitive=False)


def now() -> str:
    return datetime.now(timezone.utc).isoformat()


@click.group()
@click.option("--verbose", "-v", "verbose", is_flag=True)
def main_command(verbose: bool) -> None:
    configure_logging(verbose)


@main_command.command("sweep")
@click.option("--config", "-c", "config_path", type=Path, required=True)
@click.option("--out", "-o", "out_dir", type=Path, required=True)
@click.option("--seed", type=int, default=None)
@click.option("--restarts", type=int, default=None)
@click.option("--threads", type=int, default=None)
@click.option("--tolerance", type=float, default=None)
def sweep_command(
    config_path: Path,
    out_dir: Path,
    seed: Optional[int],
    restarts: Optional[int],
    threads: Optional[int],
    tolerance: Optional[float],
) -> int:
    config = RunConfig.create_by_definition(config_path).with_overrides(
        seed, restarts, tolerance
    )
    return run_sweep(config, out_dir, threads or os.cpu_count() or 1)


@typechecked
def run_sweep(config: RunConfig, out_dir: Path, threads: int) -> int:
    cfg = config.optimize
    started_at = now()
    curve = sweep(cfg, threads)
    item = SweepResultItem(
        out_dir,
        "sweep",
        started_at,
        now(),
        seed=cfg.seed,
        config_snapshot=config.snapshot(),
        optimize_config=cfg,
        curve=curve,
        threads=threads,
    )
    process_item(item)

    t_min = minimal_time(curve, cfg.epsilon)
    t_level = threshold_time(curve, cfg.threshold_level)
    click.echo(f"target: {cfg.target.label} on {cfg.n_sites} sites")
    click.echo(f"best fidelity: {curve.best_fidelity:.{settings.FIDELITY_DISPLAY_DECIMALS}f}")
    click.echo(f"minimal time: {'none' if t_min is None else f'{t_min:.6f}'}")
    click.echo(
        f"time to fidelity {cfg.threshold_level}: "
        f"{'none' if t_level is None else f'{t_level:.6f}'}"
    )
    return EXIT_OK


@main_command.command("verify")
@click.argument("family", type=CATALOG_FAMILY_CHOICE)
@click.argument("n_sites", type=int)
@click.argument("graph", type=GRAPH_CHOICE, default="complete")
@click.option("--out", "-o", "out_dir", type=Path, default=None)
def verify_command(family: str, n_sites: int, graph: str, out_dir: Optional[Path]) -> int:
    started_at = now()
    entry = reference_hamiltonian(
        TargetFamily(family.lower()), n_sites, GraphKind(graph.lower())
    )
    report = verify_entry(entry)

    click.echo(f"{report.label}: {'PASS' if report.passed else 'FAIL'}")
    click.echo(
        f"fidelity {report.best_fidelity:.{settings.FIDELITY_DISPLAY_DECIMALS}f} "
        f"at t={report.best_time:.6f} (claimed {entry.expressions['claimed_time']})"
    )
    click.echo(
        f"printed band [{report.printed_band[0]:.9f}, {report.printed_band[1]:.9f}], "
        f"delta H {report.delta_h:.9f}, populated levels {report.populated_levels}"
    )
    for discrepancy in report.discrepancies:
        click.echo(f"discrepancy: {discrepancy}")

    if out_dir is not None:
        content = asdict(report)
        content["precision"] = report.precision.value
        content["passed"] = report.passed
        process_item(
            DocumentItem(
                out_dir,
                "verify",
                started_at,
                now(),
                file_name=settings.VERIFY_FILE_NAME,
                content=content,
            )
        )
    return EXIT_OK if report.passed else EXIT_CLAIM_FAILED


@main_command.command("bound")
@click.argument("family", type=FAMILY_CHOICE)
@click.argument("n_sites", type=int)
@click.option("--k", "k", type=int, default=None)
def bound_command(family: str, n_sites: int, k: Optional[int]) -> int:
    target = TargetSpec(TargetFamily(family.lower()), k)
    overlap = float(abs(np.vdot(target.build(n_sites).amplitudes, zero_state(n_sites).amplitudes)))
    click.echo(f"target: {target.label} on {n_sites} sites, overlap {overlap:.9f}")
    click.echo(f"MT bound: {mt_bound(overlap, settings.MAX_TWO_LEVEL_DELTA_H):.6f}")
    if target.family is TargetFamily.GHZ:
        if n_sites >= 3:
            click.echo(f"two-body time: {ghz_two_body_time(n_sites):.6f}")
        click.echo(f"pairwise gate sequence: {pairwise_sequence_time(n_sites):.6f}")
        click.echo(f"sequential circuit: {sequential_ghz_time(n_sites):.6f}")
    if n_sites == 3 and target.family in (TargetFamily.GHZ, TargetFamily.W):
        click.echo(f"three-body time: {three_body_time(overlap):.6f}")
    return EXIT_OK


@typechecked
def companion_states(entry: ReferenceEntry) -> Dict[str, Any]:
    n_sites = entry.n_sites
    states = {entry.target.label: entry.target.build(n_sites)}
    for k in range(n_sites + 1):
        states[f"dicke{k}"] = dicke(n_sites, k)
    return states


@main_command.command("components")
@click.argument("family", type=CATALOG_FAMILY_CHOICE)
@click.argument("n_sites", type=int)
@click.option("--graph", "graph", type=GRAPH_CHOICE, default="complete")
@click.option("--start", type=float, default=0.0)
@click.option("--end", type=float, required=True)
@click.option("--step", type=float, default=settings.MAX_STEP)
@click.option("--out", "-o", "out_dir", type=Path, required=True)
def components_command(
    family: str,
    n_sites: int,
    graph: str,
    start: float,
    end: float,
    step: float,
    out_dir: Path,
) -> int:
    started_at = now()
    entry = reference_hamiltonian(
        TargetFamily(family.lower()), n_sites, GraphKind(graph.lower())
    )
    times = TimeSegment(start, end, step).times()
    rows = component_rows(entry, times)
    states = companion_states(entry)
    process_item(
        TableItem(
            out_dir,
            "components",
            started_at,
            now(),
            file_name=settings.COMPONENTS_FILE_NAME,
            header=["t", *states.keys()],
            rows=rows,
        )
    )
    return EXIT_OK


@typechecked
def component_rows(entry: ReferenceEntry, times: np.ndarray) -> List[List[float]]:
    spectrum = normalize_spectrum(eigendecompose(entry.matrix))
    initial = zero_state(entry.n_sites)
    columns = [
        fidelity_series(spectrum, initial, state, times).values
        for state in companion_states(entry).values()
    ]
    return [
        [float(t), *(float(column[row]) for column in columns)]
        for row, t in enumerate(times)
    ]


@main_command.command("tradeoff")
@click.argument("family", type=FAMILY_CHOICE)
@click.argument("n_sites", type=int)
@click.option("--k", "k", type=int, default=None)
@click.option("--start", type=float, required=True)
@click.option("--end", type=float, required=True)
@click.option("--step", type=float, default=settings.MAX_STEP)
@click.option("--t-min", "t_min", type=float, default=None)
@click.option("--summary", "summary_path", type=Path, default=None)
@click.option("--out", "-o", "out_dir", type=Path, required=True)
def tradeoff_command(
    family: str,
    n_sites: int,
    k: Optional[int],
    start: float,
    end: float,
    step: float,
    t_min: Optional[float],
    summary_path: Optional[Path],
    out_dir: Path,
) -> int:
    started_at = now()
    target = TargetSpec(TargetFamily(family.lower()), k)
    unit_time = resolve_unit_time(target, n_sites, t_min, summary_path)
    times = [t for t in TimeSegment(start, end, step).times() if t > 0]
    rows = [[float(t), energy_for_deadline(unit_time, float(t))] for t in times]
    process_item(
        TableItem(
            out_dir,
            "tradeoff",
            started_at,
            now(),
            file_name=settings.TRADEOFF_FILE_NAME,
            header=["t", "energy_range"],
            rows=rows,
        )
    )
    click.echo(f"minimal time at unit bandwidth: {unit_time:.6f}")
    return EXIT_OK


@typechecked
def resolve_unit_time(
    target: TargetSpec,
    n_sites: int,
    t_min: Optional[float],
    summary_path: Optional[Path],
) -> float:
    if t_min is not None:
        return t_min
    if summary_path is not None:
        with open(summary_path) as f:
            summary = json.load(f)
        if summary.get("minimal_time") is None:
            raise ConfigError(f"Summary has no minimal time: {summary_path}")
        return float(summary["minimal_time"])
    if target.family in (TargetFamily.GHZ, TargetFamily.W):
        try:
            return reference_hamiltonian(target.family, n_sites).claimed_time
        except CombinationNotInCatalogError:
            pass
    if target.family is TargetFamily.GHZ and n_sites >= 3:
        return ghz_two_body_time(n_sites)
    raise click.UsageError(
        f"No minimal time known for {target.label} on {n_sites} sites, "
        "pass --t-min or --summary"
    )


@main_command.command("catalog-dump")
@click.option("--out", "-o", "out_dir", type=Path, required=True)
def catalog_dump_command(out_dir: Path) -> int:
    started_at = now()
    content = [catalog_record(entry) for entry in catalog()]
    process_item(
        DocumentItem(
            out_dir,
            "catalog-dump",
            started_at,
            now(),
            file_name=settings.CATALOG_FILE_NAME,
            content=content,
        )
    )
    click.echo(f"{len(content)} reference hamiltonians written")
    return EXIT_OK


@typechecked
def catalog_record(entry: ReferenceEntry) -> Dict[str, Any]:
    return {
        "label": entry.label,
        "family": entry.family.value,
        "n_sites": entry.n_sites,
        "graph": entry.graph_kind.value,
        "coupling": entry.coupling.tolist(),
        "field": entry.field_vector.tolist(),
        "prefactor": entry.prefactor,
        "shift": entry.shift,
        "claimed_time": entry.claimed_time,
        "precision": entry.precision.value,
        "expressions": dict(entry.expressions),
    }


@typechecked
def run_command(args: Sequence[str]) -> int:
    try:
        result = main_command.main(list(args), standalone_mode=False)
    except TwoBodyQslError as err:
        click.echo(f"error: {err}", err=True)
        return EXIT_USAGE
    except click.ClickException as err:
        err.show()
        return EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL
    return result if isinstance(result, int) else EXIT_OK


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
