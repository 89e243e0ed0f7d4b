import json
import math

import numpy as np
import pytest
import yaml

from fraccos import cli


def write_spec(tmp_path, data, name="spec.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(data))
    return str(p)


def read_csv(path):
    lines = open(path).read().splitlines()
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


def test_solve_cosine(tmp_path):
    spec = write_spec(tmp_path, {"alpha": 2, "A": [[-1.0]],
                                 "t_grid": {"start": 0, "stop": 3, "steps": 6}})
    out = tmp_path / "traj.csv"
    assert cli.main(["solve", "--spec", spec, "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["t", "v0", "anchor"]
    for t, v, anchor in rows:
        assert float(v) == pytest.approx(math.cos(float(t)), abs=1e-10)
        assert anchor == "mild-solution"


def test_solve_zero_trajectory(tmp_path):
    spec = write_spec(tmp_path, {"alpha": 1.5, "A": [[-1.0, 0.0], [0.0, -2.0]],
                                 "B": [[0.0, 0.1], [0.1, 0.0]], "v0": [0, 0], "v1": [0, 0]})
    out = tmp_path / "traj.csv"
    assert cli.main(["solve", "--spec", spec, "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert all(float(r[1]) == 0.0 and float(r[2]) == 0.0 for r in rows)


@pytest.mark.parametrize("data", [
    {"alpha": 1.5, "A": [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]},
    {"alpha": 2.5, "A": [[1.0]]},
    {"A": [[1.0]]},
    {"alpha": 1.5, "A": [[1.0]], "B": [[1.0, 0.0], [0.0, 1.0]]},
    {"alpha": 1.5, "A": {"builder": "nope", "size": 2}},
    {"alpha": 1.5, "A": [[1.0]], "tol": -1.0},
    {"alpha": 1.5, "A": [[1.0]], "t_grid": [1.0, 0.5]},
])
def test_spec_errors_exit_2(tmp_path, data, capsys):
    spec = write_spec(tmp_path, data)
    assert cli.main(["solve", "--spec", spec]) == 2
    diag = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert diag["error"] == "SpecError"


def test_malformed_yaml(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("alpha: [1.5\n")
    assert cli.main(["verify", "--spec", str(p)]) == 2


def test_numerical_failure_exit_3(tmp_path, monkeypatch, capsys):
    spec = write_spec(tmp_path, {"alpha": 1.5, "A": [[-1.0]], "B": [[0.5]]})
    monkeypatch.setenv("FRACCOS_TERM_CAP", "2")
    assert cli.main(["solve", "--spec", spec]) == 3
    assert json.loads(capsys.readouterr().err)["error"] == "ConvergenceError"


def test_builders():
    rng = np.random.default_rng(0)
    L = cli._build_matrix({"builder": "laplacian", "size": 3, "scale": 0.5}, rng, "A")
    np.testing.assert_array_equal(L, 0.5 * np.array([[-2, 1, 0], [1, -2, 1], [0, 1, -2]]))
    D = cli._build_matrix({"builder": "diagonal", "values": [1, 2]}, rng, "A")
    np.testing.assert_array_equal(D, np.diag([1.0, 2.0]))
    S = cli._build_matrix({"builder": "random_symmetric", "size": 3, "spectral_radius": 2}, rng, "A")
    assert np.max(np.abs(np.linalg.eigvalsh(S))) == pytest.approx(2.0)


def test_fmt_17_digits():
    assert cli.fmt(0.1) == "0.10000000000000001"
    assert cli.fmt(3) == "3"
    assert cli.json_record({"x": 1.0 / 3, "s": "a"}) == '{"x": 0.33333333333333331, "s": "a"}'


def _records(path):
    return [json.loads(line) for line in open(path)]


def test_verify_zero_perturbation_all_pass(tmp_path):
    spec = write_spec(tmp_path, {"alpha": 1.5, "A": [[-0.2, 0.05], [0.05, -0.1]],
                                 "t_grid": {"start": 0.1, "stop": 1.5, "steps": 7},
                                 "lambda_list": [2.0]})
    out = tmp_path / "v.jsonl"
    assert cli.main(["verify", "--spec", spec, "--out", str(out)]) == 0
    recs = _records(out)
    assert all(r["status"] in ("pass", "info") for r in recs)
    assert all(r["anchor"] for r in recs)


def test_verify_hypothesis_not_met(tmp_path):
    spec = write_spec(tmp_path, {"alpha": 1.5, "A": [[-0.1]], "B": [[0.9]],
                                 "t_grid": {"start": 0.1, "stop": 1.0, "steps": 3},
                                 "lambda_list": [0.5]})
    out = tmp_path / "v.jsonl"
    assert cli.main(["verify", "--spec", spec, "--out", str(out)]) == 0
    lemma = [r for r in _records(out) if r["check"] == "lemma"]
    assert lemma and lemma[0]["status"] == "hypothesis not met"


def test_verify_failure_exit_4(tmp_path, monkeypatch):
    spec = write_spec(tmp_path, {"alpha": 1.5, "A": [[-0.5]], "B": [[0.3]],
                                 "t_grid": {"start": 0.1, "stop": 1.0, "steps": 3}})
    monkeypatch.setattr(cli, "ORACLE_FACTOR", 0.0)
    assert cli.main(["verify", "--spec", spec, "--out", str(tmp_path / "v.jsonl")]) == 4


def test_convergence_zero_perturbation(tmp_path):
    spec = write_spec(tmp_path, {"alpha": 1.5, "A": [[-1.0]],
                                 "t_grid": {"start": 0.1, "stop": 2.0, "steps": 5}})
    out = tmp_path / "c.csv"
    assert cli.main(["convergence", "--spec", spec, "--out", str(out)]) == 0
    header, rows = read_csv(out)
    trunc = [r for r in rows if r[0] == "truncation"]
    assert len(trunc) == 2          # one cosine row, one sine row
    assert all(float(r[header.index("error")]) <= 1e-14 for r in trunc)


def test_convergence_errors_decrease(tmp_path):
    spec = write_spec(tmp_path, {"alpha": 1.5, "A": {"builder": "random_symmetric", "size": 2,
                                                     "spectral_radius": 1.0},
                                 "B": {"builder": "random", "size": 2, "norm": 0.3},
                                 "t_grid": {"start": 0.0, "stop": 2.0, "steps": 8}, "seed": 3})
    out = tmp_path / "c.csv"
    assert cli.main(["convergence", "--spec", spec, "--out", str(out)]) == 0
    header, rows = read_csv(out)
    for fam in ("cosine", "sine"):
        errs = [float(r[5]) for r in rows if r[0] == "truncation" and r[1] == fam]
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert errs[-1] <= 1e-8
    quad = [float(r[5]) for r in rows if r[0] == "quadrature"]
    assert quad[-1] < quad[0]


def test_seed_and_tol_flags(tmp_path):
    data = {"alpha": 1.5, "A": {"builder": "random_symmetric", "size": 2},
            "t_grid": {"start": 0.0, "stop": 1.0, "steps": 2}}
    spec = write_spec(tmp_path, data)
    a = cli.load_spec(spec, seed=1)
    b = cli.load_spec(spec, seed=2, tol=1e-6)
    assert not np.array_equal(a.A, b.A) and b.tol == 1e-6


def test_default_spec_loads():
    spec = cli.load_spec(None)
    assert spec.A.shape == (2, 2) and spec.lambda_list
