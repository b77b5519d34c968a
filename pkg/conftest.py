import json

import numpy as np
import pandas as pd
import pytest

from qo_physics.source import EmissionModel
from qo_simulation.config import DetectorModel, RunConfig
from qo_simulation.engine import FORMAT_VERSION, RECORD_COLUMNS, EventLog


@pytest.fixture
def rng():
    return np.random.default_rng(20070216)


@pytest.fixture
def ideal_detector():
    return DetectorModel(efficiency=1.0, dark_rate=0.0)


@pytest.fixture
def small_config(ideal_detector):
    """Bright source, no dark counts: a few thousand triggers give usable counts."""
    return RunConfig(
        n_triggers=5000,
        seed=11,
        emission=EmissionModel(p1=0.5),
        detector=ideal_detector,
    )


@pytest.fixture
def make_log():
    """EventLog from (choice_bit, phase, blocked_path, click_p1, click_p2) tuples."""

    def _make(rows):
        df = pd.DataFrame({
            "trigger_index": np.arange(len(rows), dtype=np.int64),
            "choice_bit": [r[0] for r in rows],
            "applied_v_eom": [150.0 if r[0] else 0.0 for r in rows],
            "phase": [r[1] for r in rows],
            "blocked_path": [r[2] for r in rows],
            "click_p1": [bool(r[3]) for r in rows],
            "click_p2": [bool(r[4]) for r in rows],
            "photon_count_emitted": [int(r[3]) + int(r[4]) for r in rows],
        }, columns=RECORD_COLUMNS)
        return EventLog(format_version=FORMAT_VERSION, config_digest="0" * 16, records=df)

    return _make


@pytest.fixture
def write_scenario(tmp_path):
    def _write(data: dict, name: str = "scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return _write
