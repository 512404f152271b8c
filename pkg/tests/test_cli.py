import json
import subprocess
import sys

import numpy as np
import pytest

from rydent import cli
from rydent import workflows as wf


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "text,kind,value",
    [
        ("8.375um", "length", 8.375),
        ("8.375 μm", "length", 8.375),
        ("4", "length", 4.0),
        ("5pi rad/us", "frequency", 5 * np.pi),
        ("17.5*pi rad/μs", "frequency", 17.5 * np.pi),
        ("pi", "frequency", np.pi),
        ("4us", "time", 4.0),
        ("1e-3 μs", "time", 1e-3),
    ],
)
def test_parse_quantity(text, kind, value):
    assert cli.parse_quantity(text, kind) == pytest.approx(value)


@pytest.mark.parametrize("text,kind", [("8km", "length"), ("5pi MHz", "frequency"), ("abc", "time"), ("4um", "time")])
def test_parse_quantity_rejects(text, kind):
    with pytest.raises(Exception):
        cli.parse_quantity(text, kind)


def test_ratio_list():
    assert cli.parse_ratio_list("0.5:3.0:0.1") == pytest.approx(np.round(np.arange(5, 31) / 10, 12))
    assert len(cli.parse_ratio_list("0.5:3.0:0.1")) == 26
    assert cli.parse_ratio_list("1,1.5") == [1.0, 1.5]


def test_sweep_chain_csv(capsys):
    code, out, err = run(["sweep-chain", "--n-atoms", "6", "--rb-over-ax", "0.8,1.4", "--check-invariants"], capsys)
    assert code == 0 and err == ""
    lines = out.splitlines()
    assert lines[0] == ",".join(wf.CSV_FIELDS) and len(lines) == 3
    assert len(wf.rows_from_csv(out)) == 2


def test_sweep_outputs_byte_identical(capsys):
    args = ["sweep-ladder", "--n-rungs", "3", "--ay-over-ax", "2", "--rb-over-ax", "1.0:1.4:0.2", "--format", "json"]
    first = run(args, capsys)[1]
    again = run(args + ["--jobs", "2"], capsys)[1]
    assert first == again
    assert len(json.loads(first)) == 3


def test_sweep_drive_flags(capsys):
    a = run(["sweep-chain", "--n-atoms", "4", "--rb-over-ax", "1", "--delta", "17.5pi rad/us"], capsys)[1]
    b = run(["sweep-chain", "--n-atoms", "4", "--rb-over-ax", "1", "--omega", "5pi", "--rb", "8.375um"], capsys)[1]
    assert a == b
    c = run(["sweep-chain", "--n-atoms", "4", "--rb-over-ax", "1", "--delta-over-omega", "1"], capsys)[1]
    assert c != a


def test_analyze_json_and_csv(capsys, data_dir, tmp_path):
    f = str(data_dir / "counts_aquila2.json")
    code, out, _ = run(["analyze", f], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["min_count"] == 11 and d["files"][0]["kept_shots"] == 802
    code, out, _ = run(["analyze", f, "--format", "csv", "--min-count", "20"], capsys)
    assert code == 0 and out.splitlines()[0].startswith("name,data,shots")
    part = tmp_path / "part.json"
    part.write_text('{"a": [0, 1, 2, 3, 4]}')
    assert run(["analyze", f, "--partition-file", str(part)], capsys)[1] == run(["analyze", f], capsys)[1]
    assert run(["analyze", f, "--a", "0,1,2,3,4"], capsys)[1] == run(["analyze", f], capsys)[1]


def test_analyze_parse_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n "grg": 1,\n "gr": 2\n}')
    code, _, err = run(["analyze", str(bad)], capsys)
    assert code == cli.EXIT_PARSE and "bad.json" in err and "line 3" in err
    code, _, err = run(["analyze", str(tmp_path / "missing.json")], capsys)
    assert code == cli.EXIT_PARSE


def test_validate_geometry(capsys, tmp_path):
    code, out, _ = run(["validate-geometry", "--chain", "10", "--rb-over-ax", "0.9"], capsys)
    assert code == 0 and json.loads(out)["valid"]
    code, out, _ = run(["validate-geometry", "--chain", "10", "--spacing", "3.9um"], capsys)
    assert code == cli.EXIT_VALIDATION and len(json.loads(out)["violations"]) == 9
    geo = tmp_path / "g.json"
    geo.write_text('{"positions": [[0, 0], [120, 0]]}')
    code, out, _ = run(["validate-geometry", "--geometry", str(geo)], capsys)
    assert code == cli.EXIT_VALIDATION and "extent" in out
    code, out, _ = run(["validate-geometry", "--geometry", str(geo), "--max-extent", "150um"], capsys)
    assert code == 0
    geo.write_text("{not json")
    assert run(["validate-geometry", "--geometry", str(geo)], capsys)[0] == cli.EXIT_PARSE
    assert run(["validate-geometry", "--chain", "4"], capsys)[0] == cli.EXIT_VALIDATION


def test_sample_and_reanalyze(capsys, tmp_path):
    args = ["sample", "--chain", "4", "--rb-over-ax", "1.5", "--shots", "200", "--seed", "3"]
    code, out, _ = run(args, capsys)
    assert code == 0 and out == run(args, capsys)[1]
    data = json.loads(out)
    assert data["shots"] == 200
    f = tmp_path / "c.json"
    f.write_text(out)
    assert run(["analyze", str(f)], capsys)[0] == 0
    code, out, _ = run(args + ["--repeats", "3"], capsys)
    assert len(json.loads(out)) == 3


def test_prepare(capsys, tmp_path):
    base = ["prepare", "--chain", "4", "--rb-over-ax", "1.5", "--duration", "1.5us", "--shots", "20", "--repeats", "2"]
    code, out, _ = run(base + ["--counts-dir", str(tmp_path / "runs")], capsys)
    assert code == 0
    s = json.loads(out)
    assert s["n_runs"] == 2 and "runs" not in s
    files = sorted((tmp_path / "runs").iterdir())
    assert [p.name for p in files] == ["run000.json", "run001.json"]
    code, out2, _ = run(base, capsys)
    assert len(json.loads(out2)["runs"]) == 2
    assert out2 == run(base, capsys)[1]

    sched = tmp_path / "s.json"
    sched.write_text(json.dumps({"duration": 1.0, "omega": [[0, 0], [0.5, 15.7], [1.0, 15.7]], "delta": [[0, -50], [1.0, 50]]}))
    assert run(base + ["--schedule", str(sched)], capsys)[0] == 0

    tight = ["prepare", "--chain", "4", "--spacing", "3um", "--duration", "1.5", "--shots", "5", "--repeats", "1"]
    code, _, err = run(tight, capsys)
    assert code == cli.EXIT_VALIDATION and "spacing" in err
    assert run(tight + ["--force"], capsys)[0] == 0


def test_prepare_integration_failure_exit_code(capsys):
    code, _, err = run(["prepare", "--chain", "3", "--spacing", "6um", "--duration", "1.5", "--dt", "0.3", "--repeats", "1"], capsys)
    assert code == cli.EXIT_NUMERICS and "step-doubling" in err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "rydent", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for sub in ("sweep-chain", "sweep-ladder", "prepare", "sample", "analyze", "validate-geometry"):
        assert sub in out.stdout
