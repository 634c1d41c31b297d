"""Every demo script runs cleanly."""

import os
import runpy

import pytest

HERE = os.path.dirname(__file__)
DEMOS = os.path.abspath(os.path.join(HERE, "..", "demos"))
SCRIPTS = sorted(f for f in os.listdir(DEMOS) if f.endswith(".py"))


@pytest.mark.parametrize("script", SCRIPTS)
def test_demo_runs(script, capsys):
    runpy.run_path(os.path.join(DEMOS, script), run_name="__main__")
    out = capsys.readouterr().out
    assert out.strip()
