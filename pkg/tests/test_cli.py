import csv
import io
import json
import subprocess
import sys

import pytest

from steane_cec.cli import CSV_HEADER, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_simulate_csv(capsys):
    code, out = run(capsys, "simulate", "--circuit", "fig2", "--p", "3e-4,1e-3",
                    "--shots", "20000", "--seed", "7")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == CSV_HEADER
    assert [float(r["p"]) for r in rows] == [3e-4, 1e-3]
    for r in rows:
        assert r["circuit"] == "fig2" and r["seed"] == "7" and r["shots"] == "20000"
        assert float(r["ci_low"]) <= float(r["p_log"]) <= float(r["ci_high"])


def test_simulate_p_zero(capsys):
    code, out = run(capsys, "simulate", "--p", "0", "--shots", "5000")
    assert code == 0
    (row,) = csv.DictReader(io.StringIO(out))
    assert row["failures"] == "0"


def test_simulate_json(capsys):
    code, out = run(capsys, "simulate", "--p", "1e-3", "--shots", "1000", "--format", "json")
    assert code == 0
    (row,) = json.loads(out)
    assert set(row) == set(CSV_HEADER)


def test_output_byte_identical_across_workers_and_repeats(tmp_path):
    paths = []
    for i, workers in enumerate(("1", "1", "3")):
        path = tmp_path / f"out{i}.csv"
        assert main(["simulate", "--circuit", "fig1", "--model", "bitflip-ancilla",
                     "--p", "5e-4,1e-3", "--shots", "150000", "--seed", "11",
                     "--workers", workers, "-o", str(path)]) == 0
        paths.append(path.read_bytes())
    assert paths[0] == paths[1] == paths[2]


@pytest.mark.parametrize("argv", [
    ["simulate", "--p", "2e-4,1e-4"],
    ["simulate", "--p", "abc"],
    ["simulate", "--p", "-1e-3"],
    ["simulate", "--shots", "0"],
    ["simulate", "--circuit", "fig9"],
    ["threshold", "--grid", "1e-4,2e-4"],
    ["trace", "--fault", "99999:X1"],
    ["trace", "--fault", "3"],
    ["trace", "--fault", "0:Q1"],
    ["trace", "--fault", "0:X14"],
    ["trace", "--inject", "X9"],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_unknown_location_lists_valid_ids(capsys):
    with pytest.raises(SystemExit):
        main(["trace", "--fault", "99999:X1"])
    assert "circuit locations" in capsys.readouterr().err


def test_unwritable_output_exits_1(tmp_path, capsys):
    target = tmp_path / "missing" / "out.csv"
    code = main(["simulate", "--p", "1e-3", "--shots", "100", "-o", str(target)])
    assert code == 1


def test_degenerate_fit_exits_1(capsys):
    code = main(["threshold", "--grid", "0,1e-9,2e-9", "--shots", "100"])
    assert code == 1
    assert "fit failed" in capsys.readouterr().err


def test_threshold_report(capsys):
    code, out = run(capsys, "threshold", "--circuit", "fig2", "--shots", "20000")
    assert code == 0
    assert out.startswith("# A=")
    assert "threshold=" in out.splitlines()[0]
    assert len(out.splitlines()) == 2 + 6


def test_census_reports(capsys):
    code, out = run(capsys, "census", "--circuit", "fig1", "--model", "full")
    report = json.loads(out)
    assert code == 0
    assert 8 <= report["A"] <= 16
    assert report["malignant"]
    assert any(f["pauli"].startswith("Z") or ".Z" in f["pauli"] for f in report["malignant"])
    for circuit, model in (("fig2", "full"), ("fig1", "bitflip-ancilla")):
        _, out = run(capsys, "census", "--circuit", circuit, "--model", model)
        report = json.loads(out)
        assert report["A"] == 0 and report["malignant"] == []


def test_location_ids_match_census(capsys):
    _, listing = run(capsys, "circuit", "locations", "--circuit", "fig1")
    rows = list(csv.DictReader(io.StringIO(listing)))
    assert [int(r["id"]) for r in rows] == list(range(len(rows)))
    _, out = run(capsys, "census", "--circuit", "fig1")
    for entry in json.loads(out)["per_location"]:
        row = rows[entry["id"]]
        assert row["kind"] == entry["kind"]
        assert [int(q) for q in row["qubits"].split()] == entry["qubits"]


def _ancilla8_phase_fault(capsys):
    """Location id of the second bit-flip-half CNOT into ancilla 8 of fig1."""
    _, listing = run(capsys, "circuit", "locations", "--circuit", "fig1")
    cnots = [r for r in csv.DictReader(io.StringIO(listing))
             if r["gate"] == "CNOT" and r["qubits"].split()[1] == "8"]
    return cnots[1]["id"]


def test_trace_fatal_fault(capsys):
    lid = _ancilla8_phase_fault(capsys)
    code, out = run(capsys, "trace", "--circuit", "fig1", "--fault", f"{lid}:Z8")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "t=-1 frame=I"
    assert lines[-1] == "class=Z"


def test_trace_noiseless_and_fig2(capsys):
    code, out = run(capsys, "trace", "--circuit", "fig2")
    assert code == 0 and out.splitlines()[-1] == "class=I"
    _, listing = run(capsys, "circuit", "locations", "--circuit", "fig2")
    kick = next(r for r in csv.DictReader(io.StringIO(listing))
                if r["gate"] == "CPSTRING" and r["qubits"].split()[0] == "8")
    _, out = run(capsys, "trace", "--circuit", "fig2", "--fault", f"{kick['id']}:Z8")
    assert out.splitlines()[-1] == "class=I"


def test_trace_inject(capsys):
    _, out = run(capsys, "trace", "--inject", "Y5")
    assert out.splitlines()[0] == "t=-1 frame=Y5"
    assert out.splitlines()[-1] == "class=I"


def test_circuit_export_and_stats(capsys):
    _, text = run(capsys, "circuit", "export", "--circuit", "fig2")
    assert text.startswith("# circuit FIG2 depth=37\n")
    _, stats = run(capsys, "circuit", "stats", "--circuit", "fig1")
    kv = dict(line.split("=") for line in stats.splitlines())
    assert kv["depth"] == "28" and kv["CNOT"] == "56"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "steane_cec", "circuit", "stats"],
                         capture_output=True, text=True, check=True)
    assert "depth=28" in res.stdout
    res = subprocess.run([sys.executable, "-m", "steane_cec", "simulate", "--p", "x"],
                         capture_output=True, text=True)
    assert res.returncode == 2
