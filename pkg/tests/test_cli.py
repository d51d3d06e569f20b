import json

import pytest

from jschanuel.cli import EXIT_FAIL, EXIT_OK, EXIT_UNVERIFIED, EXIT_USAGE, main
from jschanuel.derivations import Orbit, Presentation, generic_jpoint_presentation
from jschanuel.jfield import corrupt_fragment, fragment_from_evaluator


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_verify_ode(capsys):
    code, out = run(capsys, "verify-ode", "--precision", "50")
    assert code == EXIT_OK and out["result"] == "PASS"


def test_modpoly_one(capsys):
    code, out = run(capsys, "modpoly", "1")
    assert code == EXIT_OK and out["polynomial"] == "X - Y"


def test_modpoly_verify(capsys):
    code, out = run(capsys, "modpoly", "2", "--verify")
    assert code == EXIT_OK and out["verify"]["result"] == "PASS" and out["psi"] == 3


def test_eval_at_i(capsys):
    code, out = run(capsys, "eval", "0,1", "--derivs", "1")
    assert code == EXIT_OK
    assert abs(out["values"]["j0"]["re"] - 1728) < 1e-9
    assert abs(out["values"]["j1"]["re"]) < 1e-9 and "j2" not in out["values"]


def test_eval_env_precision_echoed(capsys, monkeypatch):
    monkeypatch.setenv("JSCHANUEL_DPS", "30")
    _, out = run(capsys, "eval", "0.1,1.2")
    assert out["env_precision"]["value"] == "30"
    assert out["daleth_residual"] < 1e-20


def test_reduce(capsys):
    code, out = run(capsys, "reduce", "0.3,0.2")
    assert code == EXIT_OK and out["tau0"]["im"] > 1


def test_orbit_exit_codes(capsys):
    code, out = run(capsys, "orbit", "0.2,1.3", "0.4,2.6")
    assert code == EXIT_OK and out["witness"] == ["2", "0", "0", "1"]
    code, out = run(capsys, "orbit", "0.2,1.3", "0.1,1.7", "--height", "2")
    assert code == EXIT_UNVERIFIED and out["result"] == "IndependentUpTo"
    code, out = run(capsys, "orbit", "t", "t^2", "--vars", "t")
    assert code == EXIT_OK and out["result"] == "Independent"


def test_usage_errors(capsys):
    assert main([]) == EXIT_USAGE
    assert main(["bogus"]) == EXIT_USAGE
    assert main(["orbit", "0.2,1.3", "t", "--vars", "t"]) == EXIT_USAGE
    assert main(["xi-dim", "--presentation", "/nonexistent.json"]) == EXIT_USAGE


def _write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def test_presentation_commands(capsys, tmp_path):
    p1 = _write(tmp_path, "p1.json", generic_jpoint_presentation(1).to_json())
    code, out = run(capsys, "--seed", "7", "xi-dim", "--presentation", p1)
    assert code == EXIT_OK and out["xi_dimension"] == 1 and out["seed"] == 7
    code, out = run(capsys, "jcl-member", "--presentation", p1, "j0", "--constants", "z")
    assert out["member"] is True
    code, out = run(capsys, "schanuel-report", "--presentation", p1, "--z", "z")
    assert code == EXIT_OK and out["equality"]
    code, out = run(capsys, "delta", "--presentation", p1, "--z", "z")
    assert out["delta"] == 1
    code, out = run(capsys, "essential-check", "--presentation", p1, "--z", "z")
    assert code == EXIT_FAIL and out["result"] == "PreconditionFailed"


def test_main_report_command(capsys, tmp_path):
    P = generic_jpoint_presentation(2)
    P = Presentation(("t",) + P.generators, (), (), P.jpoints, (Orbit(("t", "0", "0", "1"), "z1", "z2"),))
    path = _write(tmp_path, "pm.json", P.to_json())
    code, out = run(capsys, "main-report", "--presentation", path, "--tau", "t", "--z", "z1", "--g", "t,0,0,1")
    assert code == EXIT_OK and out["lhs"] == 6 and out["hypothesis"] == "a"


def test_pregeom_commands(capsys, tmp_path):
    code, out = run(capsys, "pregeom", "dim", "--points", "t;2*t+1;t^2", "--vars", "t")
    assert code == EXIT_OK and out["dim"] == 2
    code, out = run(capsys, "pregeom", "props", "--points", "t;1/t;t^2;s", "--vars", "s,t")
    assert code == EXIT_OK and all(out["passed"].values())


def test_axioms_command(capsys, tmp_path):
    f = fragment_from_evaluator(["0.2,1.3", complex(-0.31, 0.9)], [[[2, 0], [0, 1]]], apply_to=[0])
    good = tmp_path / "good.json"
    good.write_text(f.dumps())
    bad = tmp_path / "bad.json"
    bad.write_text(corrupt_fragment(f, 3).dumps())
    code, out = run(capsys, "axioms", "check", str(good))
    assert code == EXIT_OK and set(out["statuses"].values()) == {"PASS"}
    code, out = run(capsys, "axioms", "check", str(bad))
    assert code == EXIT_FAIL and out["statuses"]["3"] == "FAIL"


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    assert main(["--output", str(target), "modpoly", "1"]) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text())["N"] == 1
