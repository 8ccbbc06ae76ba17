import csv
import io
import json

import pytest

from nicehfk import cli, serialize
from nicehfk.fixtures import fixture_path, load_fixture


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_fixture_and_path(capsys):
    code, out, _ = run(capsys, "validate", "TREF")
    assert code == 0 and out.startswith("valid: genus 1, 3 vertices")
    with fixture_path("F8") as path:
        code, out, _ = run(capsys, "validate", str(path))
    assert code == 0


def test_validate_rejects_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.hd"
    bad.write_text("heegaard v1\nalpha 0: 0\nbeta 0: zz\n")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 1 and "line 3" in err


def test_missing_file_and_usage_errors(capsys):
    assert run(capsys, "validate", "/nonexistent.hd")[0] == 1
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "hfk", "TREF", "--assume-nice", "--auto-nicefy")[0] == 1


def test_stats_json_schema(capsys):
    code, out, _ = run(capsys, "stats", "T2", "--format", "json", "--regions")
    data = json.loads(out)
    assert code == 0
    assert {"genus", "vertices", "regions", "bigons", "badness", "badness_z",
            "badness_by_distance", "distance", "ugliness", "all_disk", "nice",
            "euler_identity", "region_list"} <= set(data)
    assert data["euler_identity"] == {"lhs": 2, "rhs": 2, "status": "PASS"}
    assert len(data["region_list"]) == data["regions"]


def test_stats_table_prints_identity(capsys):
    code, out, _ = run(capsys, "stats", "U1")
    assert code == 0 and "b+b_z = 4(g-1)+B: 0 = 0: PASS" in out


def test_nicefy_writes_output_report_and_trace(tmp_path, capsys):
    out_file = tmp_path / "nice.hd"
    report = tmp_path / "report.json"
    trace = tmp_path / "trace"
    code, out, _ = run(capsys, "nicefy", "TREF", "-o", str(out_file), "--report", str(report),
                       "--trace-dir", str(trace))
    assert code == 0
    assert "g4 <= 5g0-2: PASS" in out
    data = json.loads(report.read_text())
    assert data["passed"] is True and data["mode"] == "modified"
    assert all({"name", "lhs", "rhs", "pass"} <= set(c) for c in data["bound_checks"])
    assert any(trace.iterdir())
    code, out, _ = run(capsys, "stats", str(out_file), "--format", "json")
    assert json.loads(out)["nice"] is True


def test_nicefy_to_stdout_is_parseable(capsys):
    code, out, err = run(capsys, "nicefy", "F8", "--mode", "original")
    assert code == 0 and out.startswith("heegaard v1")
    assert "PASS" in err


def test_hfk_requires_nice_or_flag(capsys):
    code, _, err = run(capsys, "hfk", "TREF")
    assert code == 1 and "--auto-nicefy" in err


def test_hfk_json_schema(capsys):
    code, out, _ = run(capsys, "hfk", "TREF", "--auto-nicefy", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert set(data) == {"generators", "ranks", "euler", "normalization", "nicefy"}
    assert sorted((r["a"], r["m"], r["rank"]) for r in data["ranks"]) == [
        (0, 0, 1), (1, 1, 1), (2, 2, 1)]
    assert data["nicefy"]["passed"] is True


def test_hfk_table_on_nice_input(tmp_path, capsys):
    path = tmp_path / "u.hd"
    path.write_text(serialize(load_fixture("U1")))
    code, out, _ = run(capsys, "hfk", str(path))
    assert code == 0 and "total rank 1" in out


def test_hfk_on_non_sphere_is_invalid(tmp_path, capsys):
    nice = tmp_path / "a1.hd"
    assert run(capsys, "nicefy", "A1", "-o", str(nice))[0] == 0
    code, _, err = run(capsys, "hfk", str(nice))
    assert code == 1 and "S^3" in err


def test_laurent_formatting():
    assert cli.laurent({-1: 1, 0: -3, 1: 1}) == "t - 3 + t^-1"
    assert cli.laurent({0: -1, 2: 2}) == "2t^2 - 1"
    assert cli.laurent({}) == "0"


def test_bench_csv(tmp_path, capsys):
    out_file = tmp_path / "bench.csv"
    code, _, _ = run(capsys, "bench", "--random", "1", "--seed", "3", "-o", str(out_file))
    rows = list(csv.DictReader(io.StringIO(out_file.read_text())))
    assert code == 0
    assert list(rows[0]) == cli.BENCH_COLUMNS
    assert {r["mode"] for r in rows} == {"modified", "original"}
    assert all(r["pass"] == "True" for r in rows)


def test_bench_directory(tmp_path, capsys):
    (tmp_path / "t.hd").write_text(serialize(load_fixture("TREF")))
    code, out, _ = run(capsys, "bench", str(tmp_path), "--mode", "modified")
    assert code == 0
    assert out.splitlines()[0] == ",".join(cli.BENCH_COLUMNS)
    assert len(out.splitlines()) == 2


@pytest.mark.parametrize("argv", [["--help"], ["hfk", "--help"]])
def test_help_exits_cleanly(argv, capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == 0
