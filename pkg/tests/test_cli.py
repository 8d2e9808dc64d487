import json

import pytest

from liewave.cli import main

WAVE_FAMILY = {"family": "wave", "P": "x", "R": "0", "q": 1.0, "v": 0.0,
               "F": "1", "a": 1.0, "b": 0.0,
               "domain": {"x": [0, 1], "t": [0, 1]}}
OSC_FAMILY = {"family": "oscillator", "P": "x", "R": "x", "q": 1.0, "v": 1.0,
              "a": 1.0, "b": 0.0, "k": 2.0,
              "domain": {"x": [0, 1], "t": [0, 1]}}
ROSSBY_PRINTED = {"family": "rossby", "F": "w", "G": "w", "H": "w",
                  "c": 1.0, "c1": 0.0, "c2": 0.0, "mode": "AS_PRINTED",
                  "domain": {"x": [1, 2], "t": [1, 2]}}
HEAT = {"A": "1", "B": "0", "C": "0", "domain": {"x": [0, 1], "t": [0, 1]}}
PLAIN_ANSATZ = {"phi": "1", "P": "x", "R": "0", "q": 1.0, "v": 0.0}


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def read_report(out_dir):
    return json.loads((out_dir / "report.json").read_text())


def test_synth_wave_writes_artifacts(tmp_path, capsys):
    family = write(tmp_path, "wave.json", WAVE_FAMILY)
    out = tmp_path / "out"
    assert main(["--out", str(out), "synth", family]) == 0
    pde = json.loads((out / "pde.json").read_text())
    assert (pde["A"], pde["B"], pde["C"]) == ("1", "-2", "0")
    gen = json.loads((out / "gen.json").read_text())
    assert gen == {"phi": "1", "xi": "1", "M": "0"}
    assert (out / "solution.txt").read_text().strip() == "exp(-t + x)"
    report = read_report(out)
    assert all(c["status"] == "PASS" for c in report["checks"])
    assert "wall_time" not in json.dumps(report)
    assert "[PASS] solution_residual" in capsys.readouterr().out


def test_synth_oscillator_all_pass(tmp_path):
    family = write(tmp_path, "osc.json", OSC_FAMILY)
    out = tmp_path / "out"
    assert main(["--out", str(out), "synth", family]) == 0
    names = {c["name"] for c in read_report(out)["checks"]}
    assert {"defining_A", "defining_B", "defining_C",
            "solution_residual"} <= names


def test_synth_rossby_printed_fails_with_witness(tmp_path):
    family = write(tmp_path, "rossby.json", ROSSBY_PRINTED)
    out = tmp_path / "out"
    assert main(["--out", str(out), "synth", family]) == 1
    report = read_report(out)
    failures = [c for c in report["checks"] if c["status"] == "FAIL"]
    assert failures
    assert all(c["name"].startswith("rossby_as_printed") for c in failures)
    assert all("witness" in c for c in failures)
    passes = [c for c in report["checks"] if c["name"].startswith("rossby_derived")]
    assert all(c["status"] == "PASS" for c in passes)


def test_check_heat_galilean_boost(tmp_path):
    pde = write(tmp_path, "pde.json", HEAT)
    gen = write(tmp_path, "gen.json", {"phi": "0", "xi": "2*t", "M": "-x"})
    out = tmp_path / "out"
    assert main(["--out", str(out), "check", pde, "--gen", gen]) == 0


def test_check_wrong_generator_fails(tmp_path):
    pde = write(tmp_path, "pde.json", HEAT)
    gen = write(tmp_path, "gen.json", {"phi": "t", "xi": "0", "M": "0"})
    out = tmp_path / "out"
    assert main(["--out", str(out), "check", pde, "--gen", gen]) == 1
    report = read_report(out)
    assert report["checks"][0]["status"] == "FAIL"


def test_check_zero_generator_trivially_passes(tmp_path):
    pde = write(tmp_path, "pde.json", HEAT)
    gen = write(tmp_path, "gen.json", {"phi": "0", "xi": "0", "M": "0"})
    assert main(["--out", str(tmp_path / "out"), "check", pde,
                 "--gen", gen]) == 0


def test_check_solution_flag(tmp_path):
    pde = write(tmp_path, "pde.json",
                {"A": "1", "B": "-2", "C": "0",
                 "domain": {"x": [0, 1], "t": [0, 1]}})
    out = tmp_path / "out"
    assert main(["--out", str(out), "check", pde,
                 "--solution", "exp(x - t)"]) == 0
    assert main(["--out", str(out), "check", pde,
                 "--solution", "exp(x + t)"]) == 1


def test_check_requires_something(tmp_path):
    pde = write(tmp_path, "pde.json", HEAT)
    assert main(["--out", str(tmp_path / "out"), "check", pde]) == 2


def test_reduce_wave_family(tmp_path):
    pde = write(tmp_path, "pde.json",
                {"A": "1", "B": "-(1 + q)", "C": "0",
                 "domain": {"x": [0, 1], "t": [0, 1]}, "params": {"q": 1.0}})
    ansatz = write(tmp_path, "ansatz.json", PLAIN_ANSATZ)
    out = tmp_path / "out"
    assert main(["--out", str(out), "reduce", pde, ansatz]) == 0
    result = json.loads((out / "reduction.json").read_text())
    assert result["classification"] == "WAVE"
    assert set(result) >= {"z", "c2", "c1", "c0"}


def test_reduce_oscillator_family_is_identity(tmp_path):
    pde = write(tmp_path, "pde.json",
                {"A": "0", "B": "-1", "C": "1",
                 "domain": {"x": [0, 1], "t": [0, 1]}})
    ansatz = write(tmp_path, "ansatz.json",
                   {"phi": "1", "P": "x", "R": "x", "q": 1.0, "v": 1.0})
    out = tmp_path / "out"
    assert main(["--out", str(out), "reduce", pde, ansatz]) == 0
    result = json.loads((out / "reduction.json").read_text())
    assert result["classification"] == "IDENTITY"


def test_reduce_heat_is_other(tmp_path):
    pde = write(tmp_path, "pde.json", HEAT)
    ansatz = write(tmp_path, "ansatz.json", PLAIN_ANSATZ)
    out = tmp_path / "out"
    assert main(["--out", str(out), "reduce", pde, ansatz]) == 0
    result = json.loads((out / "reduction.json").read_text())
    assert result["classification"] == "OTHER"


def test_solve_writes_csv_and_convergence(tmp_path):
    pde = write(tmp_path, "pde.json",
                {"A": "1", "B": "-2", "C": "0",
                 "domain": {"x": [0, 1], "t": [0, 0.1]}})
    out = tmp_path / "out"
    assert main(["--out", str(out), "solve", pde, "--ic", "exp(x - t)",
                 "--nx", "21", "--levels", "3"]) == 0
    lines = (out / "solution.csv").read_text().splitlines()
    assert lines[0] == "x,t,u_numeric,u_closed,abs_err"
    assert len(lines) > 21
    report = read_report(out)
    orders = [lv["order"] for lv in report["convergence"][1:]]
    assert all(1.7 <= o <= 2.3 for o in orders)
    assert report["final_time_error"] <= 1e-3


def test_solve_rejects_unstable_grid(tmp_path):
    pde = write(tmp_path, "pde.json",
                {"A": "1", "B": "-2", "C": "0",
                 "domain": {"x": [0, 1], "t": [0, 0.1]}})
    assert main(["--out", str(tmp_path / "out"), "solve", pde,
                 "--ic", "exp(x - t)", "--nx", "41", "--nt", "10"]) == 2


def test_modes_csv_schema(tmp_path):
    profile = write(tmp_path, "profile.json", {"H": 300.0, "N": "0.0002"})
    out = tmp_path / "out"
    assert main(["--out", str(out), "modes", profile, "--modes", "3"]) == 0
    lines = (out / "modes.csv").read_text().splitlines()
    assert lines[0] == "m,C_m,k_m"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert first[0] == "1"
    assert float(first[1]) == pytest.approx(0.06 / 3.141592653589793, rel=1e-8)


def test_modes_failure_path(tmp_path):
    profile = write(tmp_path, "profile.json", {"H": 100.0, "N": "0"})
    assert main(["--out", str(tmp_path / "out"), "modes", profile]) == 1


def test_malformed_json_is_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["--out", str(tmp_path / "out"), "synth", str(bad)]) == 2


def test_missing_file_is_exit_2(tmp_path):
    assert main(["--out", str(tmp_path / "out"), "synth",
                 str(tmp_path / "nope.json")]) == 2


def test_bad_expression_is_exit_2(tmp_path):
    pde = write(tmp_path, "pde.json",
                {"A": "1 + + x", "B": "0", "C": "0",
                 "domain": {"x": [0, 1], "t": [0, 1]}})
    gen = write(tmp_path, "gen.json", {"phi": "0", "xi": "0", "M": "0"})
    assert main(["--out", str(tmp_path / "out"), "check", pde,
                 "--gen", gen]) == 2


def test_csv_report_format(tmp_path):
    pde = write(tmp_path, "pde.json", HEAT)
    gen = write(tmp_path, "gen.json", {"phi": "0", "xi": "2*t", "M": "-x"})
    out = tmp_path / "out"
    assert main(["--out", str(out), "--format", "csv", "check", pde,
                 "--gen", gen]) == 0
    lines = (out / "report.csv").read_text().splitlines()
    assert lines[0] == "name,status,max_residual"
    assert all(line.split(",")[1] == "PASS" for line in lines[1:])


def test_reports_are_seed_deterministic(tmp_path):
    family = write(tmp_path, "rossby.json", ROSSBY_PRINTED)
    out = tmp_path / "out"
    main(["--seed", "7", "--out", str(out), "synth", family])
    first = (out / "report.json").read_bytes()
    main(["--seed", "7", "--out", str(out), "synth", family])
    assert (out / "report.json").read_bytes() == first
