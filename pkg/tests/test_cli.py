import csv
import io
import json
import subprocess
import sys

import pytest

from qso3.cli import main, parse_int_range, parse_tau_grid


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_qnum_zero(capsys):
    code, out, _ = run(capsys, "qnum", "--x", "0", "--tau", "0.3")
    assert code == 0
    assert list(csv.DictReader(io.StringIO(out)))[0]["value"] == "0"


def test_qnum_kinds(capsys):
    _, out, _ = run(capsys, "qnum", "--x", "4", "--tau", "0.2", "--kind", "double-factorial", "--format", "json")
    assert json.loads(out)[0]["value"] == pytest.approx(8.99915937996, rel=1e-11)
    _, out, _ = run(capsys, "qnum", "--x", "2", "--tau", "0.1", "--scale", "2")
    assert out.splitlines()[1].endswith(",2.04013351124")


def test_be2_table_example(capsys):
    code, out, _ = run(capsys, "be2-table", "--lambda", "4", "--tau", "0", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "lambda,L,tau,rme_raising,rme_diagonal,be2"
    first = dict(zip(lines[0].split(","), lines[1].split(",")))
    assert (first["lambda"], first["L"], float(first["tau"]), float(first["be2"])) == ("4", "0", 0.0, 22.4)
    assert lines[-1].startswith("4,4,0,,")
    assert lines[-1].endswith(",")


def test_be2_table_json_mirrors_fields(capsys):
    _, out, _ = run(capsys, "be2-table", "--lambda", "2:3", "--tau", "0:0.2:3", "--format", "json")
    data = json.loads(out)
    assert list(data[0]) == ["lambda", "L", "tau", "rme_raising", "rme_diagonal", "be2"]
    assert len(data) == (2 + 2) * 3
    assert [d["tau"] for d in data[:3]] == [0.0, 0.1, 0.2]


def test_output_file(tmp_path, capsys):
    target = tmp_path / "t.csv"
    code, out, _ = run(capsys, "taylor-check", "--lambda", "4", "--tau", "0.01", "--output", str(target))
    assert code == 0 and out == ""
    rows = list(csv.DictReader(target.open()))
    assert {r["Lp"] for r in rows} == {"2", "4", "0"}
    assert all(float(r["residual"]) < 1e-3 for r in rows)


def test_basis_csv(capsys):
    _, out, _ = run(capsys, "basis", "--lambda", "2", "--L", "0", "--M", "0", "--tau", "0")
    assert out.splitlines() == ["nplus,nzero,nminus,coeff", "0,2,0,0.57735026919", "1,0,1,-0.816496580928"]
    _, low, _ = run(capsys, "basis", "--lambda", "2", "--L", "0", "--M", "0", "--tau", "0", "--route", "lowering")
    assert low == out


def test_rme_and_cg(capsys):
    _, out, _ = run(capsys, "rme", "--lambda", "2", "--Lp", "2", "--L", "0", "--tau", "0", "--oracle")
    row = out.splitlines()[1].split(",")
    assert float(row[4]) == pytest.approx(6.32455532034) and row[5] == "oracle"
    _, out, _ = run(capsys, "cg", "--j1", "1/2", "--m1", "1/2", "--j2", "1/2", "--m2", "-1/2",
                    "--J", "0", "--M", "0", "--tau", "0")
    assert float(out.splitlines()[1].split(",")[2]) == pytest.approx(2 ** -0.5)


@pytest.mark.parametrize(
    "argv",
    [
        ["qnum", "--x", "1", "--tau", "nan"],
        ["qnum", "--x", "1", "--tau", "0:1:x"],
        ["be2-table", "--lambda", "-1", "--tau", "0"],
        ["basis", "--lambda", "6", "--L", "2", "--M", "0", "--tau", "0.1", "--route", "lowering", "--nmax", "4"],
        ["basis", "--lambda", "2", "--L", "0", "--M", "0", "--tau", "0,0.1"],
        ["verify", "--tol", "-1"],
        ["verify", "--nmax", "2"],
        ["rme", "--lambda", "4", "--Lp", "4", "--L", "0", "--tau", "0.1"],
        ["nope"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 2


def test_verify_failure_exits_1(capsys):
    code, out, err = run(capsys, "verify", "--group", "qcg", "--tau", "0.2", "--tol", "1e-30")
    assert code == 1
    assert "FAIL" in out and "checks passed" in err


def test_verify_report_columns(capsys):
    code, out, _ = run(capsys, "verify", "--group", "algebra", "--tau", "0.1", "--nmax", "10", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert list(rows[0]) == ["check", "tag", "group", "tau", "residual", "tol", "status"]
    assert all(r["tag"].startswith("Eq.") and r["status"] == "pass" for r in rows)
    assert "Eq. (v16)+(v18)" in {r["tag"] for r in rows}


def test_grids():
    assert parse_tau_grid("0:1:3") == [0.0, 0.5, 1.0]
    assert parse_tau_grid("-0.3,0") == [-0.3, 0.0]
    assert parse_int_range("2:4") == [2, 3, 4]
    assert parse_int_range("5") == [5]


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "qso3", "qnum", "--x", "2", "--tau", "0"],
        capture_output=True, text=True, check=True,
    )
    assert out.stdout.splitlines()[1] == "number,2,1,0,2"
