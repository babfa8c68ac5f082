import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from evsite.config import default_config_dict, load_config
from evsite.synth import ScenarioSpec, generate


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance criteria pass lines after the test run."""
    try:
        from test_acceptance import PASS_LINES
    except ImportError:
        return
    if PASS_LINES:
        terminalreporter.section("acceptance criteria")
        for line in PASS_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def scenario(tmp_path):
    """Small standard scenario plus a ready config; returns (manifest, cfg, dirs)."""
    scen_dir = tmp_path / "scen"
    manifest = generate(ScenarioSpec(seed=42), scen_dir)
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(default_config_dict(str(scen_dir))))
    return manifest, load_config(cfg_path), {"scenario": scen_dir,
                                             "config": cfg_path,
                                             "tmp": tmp_path}
