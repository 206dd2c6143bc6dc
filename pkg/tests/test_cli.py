import csv
import io
import json
import math

import pytest

from atomphase.cli import main
from atomphase.atomlattice import named_state
from atomphase.qstate import StateVector


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_witness_ghz3(capsys):
    code, out, _ = run(capsys, "witness", "--state", "ghz3+")
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "passes-criterion"
    assert rep["max_abs"] < 1e-10
    assert rep["entropies"] == pytest.approx([math.log(2)] * 3)


def test_chsh_chi10(capsys):
    code, out, _ = run(capsys, "chsh", "--state", "chi10", "--theta-b=-0.7853981633974483")
    assert code == 0
    assert json.loads(out)["S_max"] == pytest.approx(2 * math.sqrt(2), abs=1e-9)


def test_evolve_photon_trace(capsys):
    code, out, _ = run(capsys, "evolve", "--n", "1", "--delta", "0", "--gamma", "1", "--initial", "photon", "--t-max", "10")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1001
    best = max(rows, key=lambda r: float(r["P_plus"]))
    assert float(best["P_plus"]) == pytest.approx(1.0, abs=1e-4)
    assert float(best["t"]) == pytest.approx(math.pi / (2 * math.sqrt(2)), abs=0.01)


def test_phase_states_command(capsys):
    code, out, _ = run(capsys, "phase-states", "--n", "2", "--psi", "0.4")
    rep = json.loads(out)
    assert code == 0 and rep["N"] == 6 and rep["j"] == "5/2"
    assert rep["configurations"][0] == "e1e2g3g4"
    assert rep["eigen_residual"] < 1e-12


def test_ghz_command(capsys):
    code, out, _ = run(capsys, "ghz", "--state", "chi20")
    rep = json.loads(out)
    assert code == 0 and rep["classical"] == "UNSAT" and rep["assignment"] is None


def test_scenario_file_and_flag_override(tmp_path, capsys):
    sc = tmp_path / "s.json"
    sc.write_text(json.dumps({
        "version": 1, "command": "evolve",
        "parameters": {"n": 1, "gamma": 0.5, "t_max": 2.0, "steps": 5},
        "output": {"format": "json"},
    }))
    code, out, _ = run(capsys, "run", str(sc))
    assert code == 0
    rep = json.loads(out)
    assert rep["config"]["gamma"] == 0.5 and len(rep["records"]) == 5
    code, out, _ = run(capsys, "evolve", "--scenario", str(sc), "--gamma", "2", "--format", "csv")
    assert code == 0
    assert out.startswith("t,P_plus") and len(out.splitlines()) == 6


def test_output_path(tmp_path, capsys):
    dest = tmp_path / "w.json"
    code, out, _ = run(capsys, "witness", "--state", "bell-", "--out", str(dest))
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["verdict"] == "passes-criterion"


@pytest.mark.parametrize("argv", [
    ["witness", "--state", "nonsense"],
    ["witness"],
    ["chsh", "--state", "ghz3+"],
    ["evolve", "--steps", "0"],
    ["evolve", "--n", "2", "--fock-cutoff", "1"],
    ["ghz", "--state", "chi10", "--format", "csv"],
    ["witness", "--state-file", "/nonexistent.json"],
])
def test_invalid_input_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_bad_scenarios_exit_2(tmp_path, capsys):
    bad = {
        "version.json": {"version": 7, "command": "witness"},
        "cmd.json": {"version": 1, "command": "plot"},
        "key.json": {"version": 1, "command": "witness", "parameters": {"stat": "bell+"}},
        "bool.json": {"version": 1, "command": "evolve", "parameters": {"sector": "yes"}},
    }
    for name, body in bad.items():
        p = tmp_path / name
        p.write_text(json.dumps(body))
        assert run(capsys, "run", str(p))[0] == 2, name
    p = tmp_path / "broken.json"
    p.write_text("{")
    assert run(capsys, "run", str(p))[0] == 2


def test_state_file_round_trip(tmp_path, capsys):
    s = named_state("chi21", 0.3)
    f = tmp_path / "state.json"
    f.write_text(json.dumps(s.to_json()))
    back = StateVector.from_json(json.loads(f.read_text()))
    assert abs(s.overlap(back)) > 1 - 1e-12
    code, out, _ = run(capsys, "witness", "--state-file", str(f))
    assert code == 0
    assert json.loads(out)["verdict"] == "passes-criterion"


def test_non_atomic_witness(capsys):
    code, out, _ = run(capsys, "witness", "--state", "biphoton-qutrit-1")
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "passes-criterion"
    assert rep["entropies"] == pytest.approx([math.log(3)] * 2)


def test_determinism(capsys):
    argv = ["chsh", "--state", "chi10", "--grid", "6"]
    first = run(capsys, *argv)[1]
    assert first == run(capsys, *argv)[1]
    ev = ["evolve", "--n", "2", "--t-max", "3", "--steps", "31", "--delta", "0.3"]
    assert run(capsys, *ev)[1] == run(capsys, *ev)[1]


def test_verify_negative_control(capsys):
    code, out, err = run(capsys, "verify", "--perturb-corner", "1e-6")
    assert code == 3
    status = {int(l[7:9]): l[1:5] for l in err.splitlines() if l.startswith("[")}
    assert status[3] == "FAIL"
    rep = json.loads(out)
    by_id = {c["id"]: c for c in rep["criteria"]}
    assert not by_id[3]["passed"] and by_id[1]["passed"]
