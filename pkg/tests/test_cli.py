import json

import numpy as np
import pytest

from cnotm.cli import main
from cnotm.documents import dumps, state_to_document
from cnotm.state import basis_state, ghz_state, haar_sample, w_state


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write_state(path, psi):
    path.write_text(dumps(state_to_document(psi)), encoding="utf-8")
    return path


@pytest.fixture
def files(tmp_path):
    bell = (basis_state("00") + basis_state("11")) / np.sqrt(2)
    return {
        "ghz": write_state(tmp_path / "ghz.json", ghz_state()),
        "w": write_state(tmp_path / "w.json", w_state()),
        "bell": write_state(tmp_path / "bell.json", bell),
        "haar": write_state(tmp_path / "haar.json", haar_sample(3, 2)),
        "dir": tmp_path,
    }


def test_classify(capsys, files):
    code, out, _ = run(capsys, "classify", files["ghz"], "--json")
    assert code == 0 and json.loads(out)["class_index"] == 2
    code, out, _ = run(capsys, "classify", files["ghz"], "--ref", "ghz", "--json")
    assert code == 0 and json.loads(out)["class_index"] == 0
    code, _, err = run(capsys, "classify", files["bell"], "--ref", "ghz")
    assert code == 3 and "qubits" in err
    code, out, _ = run(capsys, "classify", "w")
    assert code == 0 and out.startswith("class 3")


def test_parse_errors(capsys, files):
    bad = files["dir"] / "bad.json"
    bad.write_text("{oops", encoding="utf-8")
    assert run(capsys, "classify", bad)[0] == 2
    assert run(capsys, "classify", files["dir"] / "missing.json")[0] == 2
    short = files["dir"] / "short.json"
    short.write_text('{"qubits": 3, "amps": [[1, 0]]}', encoding="utf-8")
    assert run(capsys, "classify", short)[0] == 3
    with pytest.raises(SystemExit) as exc:
        main(["classify"])
    assert exc.value.code == 2


def test_tolerance_env(capsys, files, monkeypatch):
    monkeypatch.setenv("CNOTM_TOLERANCE", "abc")
    assert run(capsys, "classify", files["ghz"])[0] == 2
    # the flag wins over the environment
    assert run(capsys, "classify", files["ghz"], "--tolerance", "1e-8")[0] == 0
    monkeypatch.setenv("CNOTM_TOLERANCE", "1e-6")
    code, out, _ = run(capsys, "classify", files["ghz"], "--json")
    assert code == 0 and json.loads(out)["class_index"] == 2


def test_synth_and_verify(capsys, files):
    circ = files["dir"] / "c.json"
    code, out, _ = run(capsys, "synth", files["ghz"], "--output", circ)
    assert code == 0 and "cnot_count 2" in out
    fid_line = [line for line in out.splitlines() if line.startswith("fidelity")][0]
    assert len(fid_line.split()[1].split(".")[1]) == 12
    code, out, _ = run(capsys, "verify", "zero", circ, files["ghz"])
    assert code == 0 and out.strip().endswith("pass")
    code, out, _ = run(capsys, "verify", "w", circ, files["ghz"], "--json")
    rep = json.loads(out)
    assert code == 0 and rep["pass"] is False and rep["fidelity"] < 1 - 1e-8
    code, out, _ = run(capsys, "synth", files["w"], "--json")
    assert json.loads(out)["cnot_count"] == 3


def test_synth_sources(capsys, files):
    code, out, _ = run(capsys, "synth", files["haar"], "--from", files["haar"], "--json")
    assert code == 0 and json.loads(out)["circuit"]["gates"] == []
    code, out, _ = run(capsys, "synth", files["haar"], "--from", "ghz", "--json")
    assert json.loads(out)["cnot_count"] == 2
    code, out, _ = run(capsys, "synth", files["haar"], "--from", files["w"], "--nearest-neighbor", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["cnot_count"] <= 4
    assert all([g["c"], g["t"]] in ([1, 2], [2, 1], [2, 3], [3, 2]) for g in rep["circuit"]["gates"]
               if g["g"] == "cnot")
    code, out, _ = run(capsys, "synth", files["bell"], "--json")
    assert code == 0 and json.loads(out)["cnot_count"] == 1
    assert run(capsys, "synth", files["bell"], "--from", "ghz")[0] == 3
    assert run(capsys, "synth", files["bell"], "--from", files["ghz"])[0] == 3


def test_verify_empty_circuit(capsys, files):
    empty = files["dir"] / "empty.json"
    empty.write_text('{"gates": [], "cnot_count": 0}', encoding="utf-8")
    code, out, _ = run(capsys, "verify", files["haar"], empty, files["haar"])
    assert code == 0 and "pass" in out
    wide = files["dir"] / "wide.json"
    wide.write_text('{"gates": [{"g": "cnot", "c": 1, "t": 3}]}', encoding="utf-8")
    assert run(capsys, "verify", files["bell"], wide, files["bell"])[0] == 3


def test_invariants(capsys, files):
    code, out, _ = run(capsys, "invariants", files["ghz"], "--json")
    rep = json.loads(out)
    assert np.allclose(rep["purities"], 0.5, atol=1e-12) and rep["tangle"] == pytest.approx(1)
    code, out, _ = run(capsys, "invariants", files["bell"], "--json")
    assert json.loads(out)["schmidt_angle"] == pytest.approx(np.pi / 4)


def test_sample(capsys):
    a = run(capsys, "sample", "--count", 3, "--seed", 7, "--json")[1]
    b = run(capsys, "sample", "--count", 3, "--seed", 7, "--json")[1]
    assert a == b and len(json.loads(a)["states"]) == 3
    assert run(capsys, "sample", "--qubits", 4)[0] == 3


def test_oracle(capsys, files):
    code, out, _ = run(capsys, "oracle", "zero", files["ghz"], "--kmax", 3, "--json")
    assert code == 0 and json.loads(out)["verdict"] == 2
    code, out, _ = run(capsys, "oracle", "zero", "w", "--kmax", 1, "--escalated-restarts", 20)
    assert code == 5 and "verdict None" in out
    assert run(capsys, "oracle", "zero", "ghz", "--kmax", 6)[0] == 2


def test_probe(capsys):
    code, out, _ = run(capsys, "probe-max-distance", "--samples", 1, "--kmax", 2, "--json")
    rep = json.loads(out)
    assert code == 0 and "not certify" in rep["note"] and len(rep["entries"]) == 1
