import runpy
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


@pytest.mark.parametrize("argv", [
    ["verify_ode.py", "--precisions", "10", "20"],
    ["build_modpolys.py", "--levels", "1", "2", "3"],
    ["predimension_demo.py"],
])
def test_script_runs(argv, monkeypatch, capsys):
    monkeypatch.setattr(sys, "argv", argv)
    with pytest.raises(SystemExit) as exc:
        runpy.run_path(str(SCRIPTS / argv[0]), run_name="__main__")
        raise SystemExit(0)
    assert exc.value.code in (0, None)
    assert capsys.readouterr().out
