import json
import math

import numpy as np
import pytest

from diagsynth import cli, mlpipe
from diagsynth.circuit import diag_phases, wrap
from diagsynth.diagonal import tbar_squared_phases

from conftest import parse_qasm


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_decompose_identity(tmp_path, capsys):
    f = tmp_path / "id.json"
    f.write_text(json.dumps({"n": 3, "lambda": [0.0] * 8}))
    code, out, _ = run(capsys, "decompose", f)
    assert code == 0
    doc = json.loads(out)
    assert np.allclose(doc["angles"], 0.0, atol=1e-15)
    assert doc["gate_counts"] == {"RZ": 7, "CNOT": 6}
    assert doc["config"]["seq"] == "tree"


def test_decompose_tbar_squared_writes_files(tmp_path, capsys):
    lam = tbar_squared_phases(4, 0.1)
    f = tmp_path / "t.txt"
    f.write_text("\n".join(format(v, ".17g") for v in lam) + "\n")
    code, _, _ = run(capsys, "decompose", f, "--seq", "fractal", "--out", tmp_path / "t")
    assert code == 0
    qasm = (tmp_path / "t.qasm").read_text()
    assert "// config:" in qasm
    circ = parse_qasm(qasm)
    assert np.max(np.abs(wrap(diag_phases(circ).phases - lam))) < 1e-12
    doc = json.loads((tmp_path / "t.json").read_text())
    assert doc["roundtrip_error"] < 1e-12


@pytest.mark.parametrize("content", ['{"n": 2, "lambda": [0.1, 0.2', '{"n": 2, "lambda": [1, 2, 3]}',
                                     "0.1\n0.2\n0.3\n", "0.1\nabc\n", "1\nnan\n"])
def test_decompose_bad_input_exits_2(tmp_path, capsys, content):
    f = tmp_path / "bad.txt"
    f.write_text(content)
    code, out, err = run(capsys, "decompose", f)
    assert code == 2 and "error" in err and out == ""


def test_decompose_missing_file(tmp_path, capsys):
    assert run(capsys, "decompose", tmp_path / "nope.txt")[0] == 2


def test_bench(capsys):
    code, out, _ = run(capsys, "bench", "--n-min", 2, "--n-max", 6)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# config:")
    assert lines[1] == "n,rz,cnot,total,expected,match"
    rows = [l.split(",") for l in lines[2:]]
    assert [int(r[3]) for r in rows] == [5, 13, 29, 61, 125]
    assert all(r[-1] == "true" for r in rows)


def test_bench_bad_range(capsys):
    assert run(capsys, "bench", "--n-min", 5, "--n-max", 3)[0] == 2


@pytest.mark.parametrize("argv,expected", [
    (["--n", 4, "--kind", "fractal"], "1,2,3,2,1,2,3,2"),
    (["--n", 3, "--kind", "tree"], None),
])
def test_sequence(capsys, argv, expected):
    code, out, _ = run(capsys, "sequence", *argv)
    assert code == 0
    if expected:
        assert out.strip() == expected
    assert len(out.strip().split(",")) == 1 << (argv[1] - 1)


def test_sequence_invalid(capsys):
    assert run(capsys, "sequence", "--n", 0)[0] == 2


def test_dataset_train_analyze(tmp_path, capsys):
    data = tmp_path / "d.csv"
    assert run(capsys, "dataset", "--stage", "pretty", "--n", 2, "--samples", 300, "--out", data)[0] == 0
    assert data.read_text().startswith("# config:")
    model = tmp_path / "m.json"
    code, out, _ = run(capsys, "train", "--data", data, "--epochs", 100000, "--tol", 1e-11,
                       "--init-lr", 0.9, "--out", model, "--loss-trace", tmp_path / "loss.csv")
    assert code == 0
    report = json.loads(out)
    assert report["final_loss"] < 1e-6 and report["test"]["R2"] > 0.999
    assert (tmp_path / "loss.csv").read_text().startswith("epoch,loss\n")
    code, out, _ = run(capsys, "analyze", "--model", model, "--data", data)
    assert code == 0
    doc = json.loads(out)
    assert doc["snap"]["max_deviation"] < 1e-2
    assert doc["reference"] == "pretty"


def test_dataset_stdout_is_loadable(tmp_path, capsys):
    code, out, _ = run(capsys, "dataset", "--stage", "raw", "--n", 2, "--samples", 10, "--seed", 3)
    assert code == 0
    f = tmp_path / "r.csv"
    f.write_text(out)
    ds = mlpipe.load_dataset(f)
    assert len(ds) == 10 and ds.meta["config"]["seed"] == 3


def test_train_bad_schedule(tmp_path, capsys):
    data = tmp_path / "d.json"
    run(capsys, "dataset", "--n", 2, "--samples", 50, "--out", data)
    assert run(capsys, "train", "--data", data, "--alpha", 0.2, "--beta", 0.9, "--init-lr", 0.1)[0] == 2


def test_train_divergence_exits_3(tmp_path, capsys):
    data = tmp_path / "d.json"
    run(capsys, "dataset", "--n", 2, "--samples", 50, "--out", data)
    assert run(capsys, "train", "--data", data, "--init-lr", 1e6, "--epochs", 200)[0] == 3


def test_cluster_and_share(tmp_path, capsys):
    data = tmp_path / "raw.json"
    run(capsys, "dataset", "--stage", "raw", "--n", 2, "--samples", 100, "--mutation-prob", 0.3, "--out", data)
    code, out, _ = run(capsys, "cluster", "--data", data, "--out-prefix", tmp_path / "c",
                       "--filtered", tmp_path / "f.json")
    assert code == 0
    doc = json.loads(out)
    assert sum(doc["sizes"]) == 100 and doc["clusters"] >= 2
    sizes = (tmp_path / "c_sizes.csv").read_text().splitlines()
    assert sizes[1] == "cluster_id,size"
    kept = mlpipe.load_dataset(tmp_path / "f.json")
    assert len(kept) == max(doc["sizes"])
    code, out, _ = run(capsys, "share", "--n", 2, "--samples", 60, "--mutation-prob", 0)
    assert code == 0 and out.splitlines()[-1] == "2,60,1,60,1"


@pytest.mark.parametrize("suite", ["rn", "weyl", "roundtrip"])
def test_verify(capsys, suite):
    code, out, _ = run(capsys, "verify", "--suite", suite, "--n-max", 5, "--samples", 10)
    assert code == 0
    assert "FAIL" not in out and out.strip().endswith("ok")


def test_module_entry_point():
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "diagsynth", "sequence", "--n", "3", "--kind", "fractal"],
                       capture_output=True, text=True, check=True)
    assert r.stdout.strip() == "1,2,1,2"
