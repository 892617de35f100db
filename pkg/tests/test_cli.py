import json
from pathlib import Path

import jsonschema
import pytest

from gkzlab.cli import load_schema, main, run

JOBS = Path(__file__).resolve().parent.parent / "jobs"


def write(tmp_path, spec, name="spec.json"):
    p = tmp_path / name
    p.write_text(json.dumps(spec))
    return str(p)


def report(argv):
    code, out, err = run(argv)
    assert code == 0, err
    rep = json.loads(out)
    jsonschema.validate(rep, load_schema("report.schema.json"))
    return rep


def test_analyze_conifold(tmp_path):
    rep = report(["analyze", "--spec", write(tmp_path, {"B": [[-1, -1, 1, 1]]}), "--box=-5/2,5/2"])
    res = rep["result"]
    assert res["delta"]["bounding_box"] == [["-1", "1"]]
    assert [h["offset"] for h in res["arrangement"]["active"]] == ["-2", "-1", "0", "1", "2"]
    assert res["unimodular"] is True and res["quasi_symmetric"] is True
    assert set(rep) == {"command", "version", "spec_sha256", "tolerances", "result"}


def test_analyze_nonunimodular_still_succeeds(tmp_path):
    assert report(["analyze", "--spec", write(tmp_path, {"B": [[1]]})])["result"]["unimodular"] is False


def test_exit_codes(tmp_path):
    code, _, err = run(["analyze", "--spec", write(tmp_path, {"B": [[2]]})])
    assert code == 3 and "NotSurjective" in err
    code, _, err = run(["analyze", "--spec", write(tmp_path, {"B": [[1]], "bogus": 1})])
    assert code == 2
    code, _, _ = run(["analyze", "--spec", str(tmp_path / "missing.json")])
    assert code == 2
    code, _, err = run(["windows", "--spec", write(tmp_path, {"B": [[-1, -1, 1, 1]], "nu": ["1"]})])
    assert code == 3 and "NonGenericNu" in err


def test_windows(tmp_path):
    res = report(["windows", "--spec", str(JOBS / "conifold_windows.json")])["result"]
    assert res["window"]["characters"] == [[0], [1]] and res["count"] == 2


def test_gkz_constant_solution(tmp_path):
    spec = {"B": [[-1, -1, 1, 1]], "alpha": [0, 0, 0], "gamma": [0, 0, 0, 0]}
    res = report(["gkz", "--spec", write(tmp_path, spec), "--truncation", "3"])["result"]
    assert res["interior_all_zero"] is True
    assert all(r["boundary_max"] == 0 for r in res["residuals"])


def test_gkz_rejects_a_matrix_outside_the_kernel(tmp_path):
    spec = {"B": [[-1, -1, 1, 1]], "A": [[1, 0, 0, 0], [0, 1, 0, 1], [0, 0, 1, -1]], "alpha": [0, 0, 0]}
    assert run(["gkz", "--spec", write(tmp_path, spec)])[0] == 3


def test_monodromy_zero_parameters_verbatim(tmp_path):
    res = report(["monodromy", "--spec", write(tmp_path, {"gauss": {"a": 0, "b": 0, "c": 0}})])["result"]
    assert res["integer_matrices"] == {"1": [[1, 0], [0, 1]], "0": [[2, 1], [-1, 0]],
                                                      "inf": [[0, -1], [1, 2]]}
    assert res["warnings"]


def test_monodromy_gauss_comparison():
    res = report(["monodromy", "--spec", str(JOBS / "gauss_monodromy.json")])["result"]
    assert res["comparison"]["pass"] is True
    assert res["k0_specialization_defect"] <= 1e-10


def test_monodromy_euler_windings():
    res = report(["monodromy", "--spec", str(JOBS / "euler_monodromy.json")])["result"]
    assert [w["winding"] for w in res["windings"]] == [-2, -1, 0, 1, 2]
    assert max(w["error"] for w in res["windings"]) <= 1e-10


def test_verify_perverse_fixtures(tmp_path):
    assert report(["verify-perverse"])["result"]["pass"] is True
    bad = report(["verify-perverse", "--spec", write(tmp_path, {"perverse": {"fixture": "rank1", "a": 0, "b": 1}})])
    assert bad["result"]["pass"] is False
    fuzz = report(["verify-perverse", "--spec", write(tmp_path, {"perverse": {"fixture": "fuzz", "trials": 10}}),
                   "--seed", "4"])
    assert fuzz["result"]["pass"] is True and fuzz["result"]["seed"] == 4


def test_reports_are_byte_identical(tmp_path):
    for argv in (["analyze", "--spec", str(JOBS / "conifold_analyze.json")],
                 ["gkz", "--spec", str(JOBS / "conifold_gkz.json")],
                 ["verify-perverse", "--spec", str(JOBS / "perverse_fuzz.json")]):
        assert run(argv)[1] == run(argv)[1]


def test_out_flag_and_main(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["windows", "--spec", str(JOBS / "conifold_windows.json"), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["command"] == "windows"
    assert main(["analyze", "--spec", write(tmp_path, {"B": [[2]]})]) == 3
    assert "NotSurjective" in capsys.readouterr().err


@pytest.mark.parametrize("path", sorted(JOBS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_job_specs_validate(path):
    jsonschema.validate(json.loads(path.read_text()), load_schema("jobspec.schema.json"))
