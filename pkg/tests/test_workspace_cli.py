from pathlib import Path

import pytest
from click.testing import CliRunner

from toricsec.cli import main
from toricsec.files import (
    ParseError,
    parse_collection_file,
    parse_fan_file,
    write_collection_file,
    write_fan_file,
)
from toricsec.workspace import WorkspaceError, load_workspace


def test_bundled_workspace_loads_expected_labels():
    ws = load_workspace()
    expected = {"P1", "P2", "P3", "P4", "P1xP1", "S1", "S2", "S3",
                "B1", "E1", "I1", "J1", "M1", "R3", "V4", "B1_3", "D1_3"}
    assert expected <= set(ws.fans)


def test_empty_directory_warns(tmp_path):
    ws = load_workspace(tmp_path)
    assert ws.warnings


def test_non_primitive_ray_rejected(tmp_path):
    bad = tmp_path / "bad.fan"
    bad.write_text("label bad\ndim 2\nrays\n2 0\n0 1\n-1 -1\nmax_cones\n0 1\n1 2\n2 0\n")
    with pytest.raises((ParseError, WorkspaceError)):
        load_workspace(tmp_path)


def test_invalid_fan_aborts_with_label(tmp_path):
    bad = tmp_path / "bad.fan"
    bad.write_text("label brokenfan\ndim 2\nrays\n1 0\n0 1\n-1 -1\nmax_cones\n0 1\n1 2\n")
    with pytest.raises(WorkspaceError) as err:
        load_workspace(tmp_path)
    assert "brokenfan" in str(err.value)


def test_fan_file_roundtrip(tmp_path):
    ws = load_workspace()
    fan = ws.fan("E1")
    out = tmp_path / "e1_copy.fan"
    write_fan_file(out, fan, (4, 5, 6))
    parsed = parse_fan_file(out)
    assert parsed.fan == fan
    assert parsed.pic_basis == (4, 5, 6)


def test_collection_file_roundtrip(tmp_path):
    ws = load_workspace()
    col = ws.collections["j1"]
    out = tmp_path / "j1_copy.col"
    write_collection_file(out, col)
    parsed = parse_collection_file(out)
    assert parsed.bundles == col.bundles
    assert parsed.theta == col.theta


def test_cli_validate_pass():
    runner = CliRunner()
    result = runner.invoke(main, ["validate", "E1"])
    assert result.exit_code == 0
    assert "status=pass" in result.output


def test_cli_forbidden_sets_e1_tables():
    runner = CliRunner()
    result = runner.invoke(main, ["forbidden-sets", "E1"])
    assert result.exit_code == 0
    assert "h1=0,4" in result.output
    assert "h4=0,1,2,3,4,5,6" in result.output
    assert "count=11" in result.output


def test_cli_cohomology():
    runner = CliRunner()
    result = runner.invoke(main, ["cohomology", "P2", "--", "-3"])
    assert result.exit_code == 0
    assert "higher_cohomology=True" in result.output
    assert "dims=0,0,1" in result.output


def test_cli_frobenius_sizes():
    runner = CliRunner()
    result = runner.invoke(main, ["frobenius", "I1", "--m", "10", "--gen"])
    assert result.exit_code == 0
    assert "size_twist_0=18" in result.output
    assert "size_gen=46" in result.output


def test_cli_strong_exceptional():
    runner = CliRunner()
    result = runner.invoke(main, ["strong-exceptional", "E1"])
    assert result.exit_code == 0


def test_cli_unknown_command_usage_error():
    runner = CliRunner()
    result = runner.invoke(main, ["no-such-command"])
    assert result.exit_code != 0


def test_cli_reports_are_idempotent(tmp_path):
    runner = CliRunner()
    args = ["--seed", "7", "method2", "S3"]
    out1 = runner.invoke(main, ["--out", str(tmp_path / "a.txt")] + args)
    out2 = runner.invoke(main, ["--out", str(tmp_path / "b.txt")] + args)
    assert out1.exit_code == 0 and out2.exit_code == 0
    assert (tmp_path / "a.txt").read_text() == (tmp_path / "b.txt").read_text()


def test_cli_exit_status_tracks_report():
    runner = CliRunner()
    ok = runner.invoke(main, ["recipe", "P2"])
    assert ok.exit_code == 0 and "status=pass" in ok.output
    bad = runner.invoke(main, ["recipe", "K3"])
    assert bad.exit_code == 1
