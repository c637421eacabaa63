import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).parents[1] / "scripts"


@pytest.mark.parametrize("argv", [
    ["adiabatic_drift.py", "--times", "20", "40"],
    ["identification_table.py"],
    ["quartic_compare.py", "--lam", "0", "0.01"],
])
def test_runs(argv):
    res = subprocess.run([sys.executable, str(SCRIPTS / argv[0])] + argv[1:], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert len(res.stdout.splitlines()) >= 3


def test_render_golden_matches_checked_in(tmp_path):
    subprocess.run([sys.executable, str(SCRIPTS / "render_golden.py"), str(tmp_path)], check=True,
                   capture_output=True)
    golden = Path(__file__).parent / "golden"
    for name in ("W.json", "G.json", "metric.json"):
        assert (tmp_path / name).read_bytes() == (golden / name).read_bytes()
