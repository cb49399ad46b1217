import json
import os
import subprocess
import sys

import pytest

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path.insert(0, REPO_ROOT)

CONFIG = {
    "grid": {"n_boundary": 60, "n_fan": 1024},
    "march": {"z_cut": 0.1, "n_cross": 24, "n_shock": 80, "n_principal": 60,
              "nodes_per_efold": 3.0},
    "dgp": {"n_arc": 12},
}


@pytest.fixture(scope="session")
def run_dir(tmp_path_factory):
    """Reference run generated through the solver's external CLI."""
    out = tmp_path_factory.mktemp("figrun")
    cfg_path = out / "config.json"
    cfg_path.write_text(json.dumps(CONFIG))
    proc = subprocess.run(
        [sys.executable, "-m", "vdwwedge.cli", "wedge",
         "--config", str(cfg_path), "--out", str(out)],
        capture_output=True, text=True, cwd=REPO_ROOT,
    )
    assert proc.returncode == 0, proc.stderr + proc.stdout
    return str(out)
