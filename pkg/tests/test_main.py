import csv
import json
from math import pi
from os import path
from pathlib import Path
from typing import Any, List, cast
from unittest.mock import Mock

import pytest
from pytest_mock.plugin import MockerFixture

from two_body_qsl import settings
from two_body_qsl.__main__ import main_command, run_command
from two_body_qsl.errors import NonHermitianError, SymmetryError, ZeroBandwidthError
from two_body_qsl.reference import ClaimPrecision, VerifyReport

from .utils import fake_curve

run_config_dir = path.join(path.dirname(__file__), "run_configs")


def read_rows(file_path: Path) -> List[List[str]]:
    with open(file_path, newline="") as f:
        return list(csv.reader(f))


def test_bound_command(capsys: Any) -> None:
    assert main_command(["bound", "ghz", "3"], standalone_mode=False) == 0
    out = capsys.readouterr().out
    assert "MT bound: 1.570796" in out
    assert "two-body time: 6.283185" in out
    assert "sequential circuit: 28.274334" in out
    assert "three-body time: 1.570796" in out

    assert main_command(["bound", "w", "5"], standalone_mode=False) == 0
    out = capsys.readouterr().out
    assert "MT bound: 3.141593" in out
    assert "two-body time" not in out

    assert main_command(["bound", "ame52", "5"], standalone_mode=False) == 0
    assert "MT bound: 2.41" in capsys.readouterr().out

    assert main_command(["bound", "dicke", "4", "--k", "2"], standalone_mode=False) == 0
    assert "MT bound: 3.141593" in capsys.readouterr().out

    assert run_command(["bound", "ame52", "4"]) == 1
    assert run_command(["bound", "cluster", "4"]) == 1


def test_verify_command(tmpdir: Any, capsys: Any) -> None:
    out_dir = Path(tmpdir).joinpath("verify")
    assert run_command(["verify", "w", "3", "complete", "-o", str(out_dir)]) == 0
    assert "w3-complete: PASS" in capsys.readouterr().out

    report = json.loads(out_dir.joinpath(settings.VERIFY_FILE_NAME).read_text())
    assert report["passed"]
    assert report["precision"] == "exact"
    assert report["populated_levels"] == 2
    manifest = json.loads(out_dir.joinpath(settings.MANIFEST_FILE_NAME).read_text())
    assert manifest["output_files"] == [settings.VERIFY_FILE_NAME]

    assert run_command(["verify", "ghz", "3", "chain"]) == 0
    assert "ghz3-chain: PASS" in capsys.readouterr().out

    # a reported discrepancy does not fail an attained claim
    assert run_command(["verify", "ghz", "3"]) == 0
    assert "discrepancy: energy spread" in capsys.readouterr().out


def test_verify_command_errors(mocker: MockerFixture, capsys: Any) -> None:
    assert run_command(["verify", "w", "4", "chain"]) == 1
    assert "not in catalog" in capsys.readouterr().err

    failing = VerifyReport(
        "w3-complete",
        pi,
        ClaimPrecision.EXACT,
        (0.0, 1.0),
        True,
        0.5,
        pi,
        0.5,
        0.5,
        2,
        3,
        1e-6,
    )
    mocker.patch("two_body_qsl.__main__.verify_entry", return_value=failing)
    assert run_command(["verify", "w", "3"]) == 2
    assert "w3-complete: FAIL" in capsys.readouterr().out


def test_sweep_command(mocker: MockerFixture, tmpdir: Any) -> None:
    mocker.patch("two_body_qsl.__main__.sweep", return_value=fake_curve())
    from two_body_qsl.__main__ import sweep

    out_dir = Path(tmpdir).joinpath("sweep")
    config_path = path.join(run_config_dir, "run_config_000.py")
    args = ["sweep", "-c", config_path, "-o", str(out_dir), "--seed", "11", "--threads", "2"]
    assert run_command(args) == 0

    mock = cast(Mock, sweep)
    mock.assert_called_once()
    cfg, threads = mock.call_args.args
    assert cfg.seed == 11
    assert cfg.restarts == 4
    assert threads == 2

    manifest = json.loads(out_dir.joinpath(settings.MANIFEST_FILE_NAME).read_text())
    assert manifest["seed"] == 11
    assert manifest["threads"] == 2
    assert manifest["config"]["seed"] == 11
    assert manifest["output_files"] == [
        settings.CURVE_FILE_NAME,
        settings.SUMMARY_FILE_NAME,
        settings.CONFIG_SNAPSHOT_FILE_NAME,
    ]
    snapshot = json.loads(out_dir.joinpath(settings.CONFIG_SNAPSHOT_FILE_NAME).read_text())
    assert snapshot == manifest["config"]
    summary = json.loads(out_dir.joinpath(settings.SUMMARY_FILE_NAME).read_text())
    assert summary["minimal_time"] == 1.6


def test_sweep_command_overrides(mocker: MockerFixture, tmpdir: Any) -> None:
    mocker.patch("two_body_qsl.__main__.sweep", return_value=fake_curve())
    from two_body_qsl.__main__ import sweep

    out_dir = Path(tmpdir).joinpath("sweep")
    config_path = path.join(run_config_dir, "run_config_ame_pair_swap.json")
    args = ["sweep", "-c", config_path, "-o", str(out_dir), "--restarts", "3", "--tolerance", "0.001"]
    assert run_command(args) == 0

    cfg, threads = cast(Mock, sweep).call_args.args
    assert cfg.restarts == 3
    assert cfg.epsilon == 0.001
    assert threads >= 1


def test_sweep_command_errors(mocker: MockerFixture, tmpdir: Any) -> None:
    out_dir = str(Path(tmpdir).joinpath("sweep"))
    config_path = path.join(run_config_dir, "run_config_duplicated.py")
    assert run_command(["sweep", "-c", config_path, "-o", out_dir]) == 1
    assert run_command(["sweep", "-o", out_dir]) == 1

    mocker.patch("two_body_qsl.__main__.sweep", side_effect=RuntimeError("boom"))
    config_path = path.join(run_config_dir, "run_config_000.py")
    assert run_command(["sweep", "-c", config_path, "-o", out_dir]) == 3


def test_run_command_maps_input_errors(mocker: MockerFixture, capsys: Any) -> None:
    for error in [
        SymmetryError("edge outside the graph"),
        NonHermitianError("not hermitian"),
        ZeroBandwidthError("zero bandwidth"),
    ]:
        mocker.patch("two_body_qsl.__main__.verify_entry", side_effect=error)
        assert run_command(["verify", "w", "3"]) == 1
        assert f"error: {error}" in capsys.readouterr().err


def test_components_command(tmpdir: Any) -> None:
    out_dir = Path(tmpdir).joinpath("components")
    args = ["components", "ghz", "3", "--end", "0.2", "--step", "0.1", "-o", str(out_dir)]
    assert run_command(args) == 0

    rows = read_rows(out_dir.joinpath(settings.COMPONENTS_FILE_NAME))
    assert rows[0] == ["t", "ghz", "dicke0", "dicke1", "dicke2", "dicke3"]
    assert len(rows) == 4
    first = [float(value) for value in rows[1]]
    assert first == pytest.approx([0.0, 0.5, 1.0, 0.0, 0.0, 0.0])
    # the evolution stays in the symmetric subspace
    for row in rows[1:]:
        assert sum(float(value) for value in row[2:]) == pytest.approx(1.0)

    out_dir = Path(tmpdir).joinpath("components_w")
    args = ["components", "w", "3", "--start", "3.1", "--end", "3.2", "--step", "0.1", "-o", str(out_dir)]
    assert run_command(args) == 0
    rows = read_rows(out_dir.joinpath(settings.COMPONENTS_FILE_NAME))
    for row in rows[1:]:
        # only the initial and the W components take part
        assert float(row[2]) + float(row[3]) == pytest.approx(1.0)

    args = ["components", "ghz", "3", "--end", "1.0", "--step", "0.5", "-o", str(out_dir)]
    assert run_command(args) == 1


def test_tradeoff_command(tmpdir: Any) -> None:
    out_dir = Path(tmpdir).joinpath("tradeoff")
    args = ["tradeoff", "ghz", "3", "--start", "3.1", "--end", "3.3", "--step", "0.1", "-o", str(out_dir)]
    assert run_command(args) == 0
    rows = read_rows(out_dir.joinpath(settings.TRADEOFF_FILE_NAME))
    assert rows[0] == ["t", "energy_range"]
    assert len(rows) == 4
    assert float(rows[1][1]) == pytest.approx(2 * pi / 3.1)

    args = ["tradeoff", "ghz", "8", "--start", "0", "--end", "0.2", "--step", "0.1", "-o", str(out_dir)]
    assert run_command(args) == 0
    rows = read_rows(out_dir.joinpath(settings.TRADEOFF_FILE_NAME))
    # t = 0 has no finite energy and is skipped
    assert len(rows) == 3
    assert float(rows[1][1]) == pytest.approx(8 * pi / 0.1)

    args = ["tradeoff", "dicke", "4", "--k", "2", "--start", "1", "--end", "1.2", "--step", "0.1", "-o", str(out_dir)]
    assert run_command(args) == 1
    assert run_command(args + ["--t-min", "23.5"]) == 0
    rows = read_rows(out_dir.joinpath(settings.TRADEOFF_FILE_NAME))
    assert float(rows[1][1]) == pytest.approx(23.5)

    summary_path = Path(tmpdir).joinpath("summary.json")
    summary_path.write_text(json.dumps({"minimal_time": 2.0}))
    assert run_command(args + ["--summary", str(summary_path)]) == 0
    rows = read_rows(out_dir.joinpath(settings.TRADEOFF_FILE_NAME))
    assert float(rows[1][1]) == pytest.approx(2.0)

    summary_path.write_text(json.dumps({"minimal_time": None}))
    assert run_command(args + ["--summary", str(summary_path)]) == 1


def test_catalog_dump_command(tmpdir: Any, capsys: Any) -> None:
    out_dir = Path(tmpdir).joinpath("catalog")
    assert run_command(["catalog-dump", "-o", str(out_dir)]) == 0
    assert "11 reference hamiltonians written" in capsys.readouterr().out

    records = json.loads(out_dir.joinpath(settings.CATALOG_FILE_NAME).read_text())
    assert len(records) == 11
    w3 = records[0]
    assert w3["label"] == "w3-complete"
    assert w3["expressions"]["prefactor"] == "1/(4*sqrt(3))"
    assert w3["coupling"][0][2] == 1.0
