import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from maslov_morse import specfile
from maslov_morse.cli import main


def write(tmp_path, doc, name="spec.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


OSC = {"type": "jacobi", "name": "oscillator", "params": {"t1": 1.5 * np.pi}, "partition": {"N": 64}, "oracle": True}


def test_index_oscillator(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["index", write(tmp_path, OSC), "--out-dir", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["piecewise_index"] == 1 and rep["oracle_index"] == 1
    rows = read_csv(out / "curve.csv")
    assert rows[0] == ["time", "dim_intersection_with_vertical", "cumulative_pair_index"]
    assert len(rows) == 66
    assert "piecewise_index=1" in capsys.readouterr().out


def test_index_is_bit_identical(tmp_path):
    spec = write(tmp_path, OSC)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["index", spec, "--out-dir", str(a)]) == 0
    assert main(["index", spec, "--out-dir", str(b)]) == 0
    for name in ("report.json", "curve.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_index_zero_problem(tmp_path):
    out = tmp_path / "out"
    assert main(["index", write(tmp_path, {"type": "jacobi", "name": "zero", "params": {"n": 2}}), "--N", "8",
                 "--out-dir", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["piecewise_index"] == 0
    rows = read_csv(out / "curve.csv")[1:]
    assert {(r[1], r[2]) for r in rows} == {("2", "0")}


def test_index_piecewise_constant_file(tmp_path):
    doc = {
        "type": "jacobi",
        "problem": {
            "n": 1, "k": 1, "t1": 2.0,
            "X": {"kind": "piecewise-constant", "times": [0, 1, 2], "values": [[[0.0], [1.0]], [[-1.0], [1.0]]]},
            "b": {"kind": "piecewise-constant", "times": [0, 1, 2], "values": [[[1.0]], [[-0.5]]]},
        },
        "partition": {"points": [0, 0.5, 1, 1.5, 2]},
        "oracle": True,
    }
    assert main(["index", write(tmp_path, doc), "--out-dir", str(tmp_path)]) == 0


def test_index_sampled_file(tmp_path):
    doc = {
        "type": "jacobi",
        "problem": {
            "n": 1, "k": 1, "t1": 1.0,
            "X": {"kind": "sampled", "times": [0, 1], "values": [[[0.0], [1.0]], [[-1.0], [1.0]]]},
            "b": {"kind": "sampled", "times": [0, 1], "values": [[[1.0]], [[2.0]]]},
        },
        "oracle": True,
    }
    assert main(["index", write(tmp_path, doc), "--N", "16", "--out-dir", str(tmp_path)]) == 0


@pytest.mark.parametrize("doc, fragment", [
    ("{not json", "malformed JSON"),
    ({"type": "jacobi", "name": "oscillator", "bogus": 1}, "bogus"),
    ({"type": "jacobi", "name": "pendulum"}, "name"),
    ({"type": "jacobi"}, "problem"),
    ({"type": "jacobi", "name": "lq", "params": {"t1": 1.0}}, "params/A"),
    ({"type": "jacobi", "name": "oscillator", "partition": {"N": 0}}, "partition/N"),
    ({"type": "jacobi", "problem": {"n": 1, "k": 1, "t1": 1.0,
                                    "X": {"kind": "sampled", "times": [0], "values": [[[1.0], [0.0]]]},
                                    "b": {"kind": "sampled", "times": [0, 1], "values": [[[1.0]], [[1.0]]]}}},
     "problem/X/times"),
    ({"type": "finite", "problem": {"m": 2, "phi": [], "Phi": []}, "point": {"u": [0, 0], "p": []}}, "problem/Phi"),
])
def test_validation_errors_exit_2(tmp_path, capsys, doc, fragment):
    assert main(["index", write(tmp_path, doc), "--out-dir", str(tmp_path)]) == 2
    assert fragment in capsys.readouterr().err


def test_oracle_mismatch_exit_4(tmp_path):
    # a file whose zero threshold cannot resolve the oracle produces a disagreement
    doc = dict(OSC, tolerances={"eig": 10.0})
    assert main(["index", write(tmp_path, doc), "--out-dir", str(tmp_path)]) == 4


def test_finite_index(tmp_path):
    doc = {
        "type": "finite",
        "problem": {
            "m": 2,
            "phi": [{"coef": 0.5, "powers": [2, 0]}, {"coef": -0.5, "powers": [0, 2]}],
            "Phi": [[{"coef": 1.0, "powers": [1, 1]}]],
        },
        "point": {"u": [0.0, 0.0], "p": [0.0]},
    }
    assert main(["index", write(tmp_path, doc), "--out-dir", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert (rep["index"], rep["nullity"], rep["vertical_intersection"]) == (1, 0, 1)


def test_lderivative(tmp_path):
    doc = {"type": "jacobi", "name": "oscillator", "params": {"t1": np.pi / 2}}
    assert main(["lderivative", write(tmp_path, doc), "--refine-tol", "1e-6", "--out-dir", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["converged"] and rep["vertical_intersection"] == 0


def test_lderivative_non_convergence_exit_3(tmp_path):
    doc = {"type": "jacobi", "name": "oscillator", "params": {"t1": 2.0}}
    argv = ["lderivative", write(tmp_path, doc), "--refine-tol", "1e-15", "--max-depth", "1", "--out-dir", str(tmp_path)]
    assert main(argv) == 3


def test_check_smoke(capsys):
    assert main(["check", "--trials", "5"]) == 0
    assert main(["check", "--trials", "5", "--seed", "7"]) == 0
    assert "oracle" in capsys.readouterr().out


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "maslov_morse.cli", "index", write(tmp_path, "[]")],
                         capture_output=True, text=True)
    assert res.returncode == 2 and "<root>" in res.stderr


def test_spec_round_trip():
    docs = [
        OSC,
        {"type": "finite", "problem": {"m": 1, "phi": [{"coef": 1.0, "powers": [2]}],
                                       "Phi": [[{"coef": 1.0, "powers": [1]}]]}, "point": {"u": [0.0], "p": [0.0]}},
    ]
    for doc in docs:
        again = specfile.validate(json.loads(specfile.dumps(doc)))
        assert again == doc
        assert specfile.dumps(again) == specfile.dumps(doc)
