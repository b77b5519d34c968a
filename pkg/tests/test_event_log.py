import numpy as np
import pytest

from qo_analysis.load_log import read_event_log
from qo_physics.errors import LogParseError
from qo_physics.optics import InterferometerConfig
from qo_simulation.engine import run_experiment
from qo_simulation.event_log import HEADER_TAG, format_header, write_event_log

HEADER = f"{HEADER_TAG},version=1,digest=0123456789abcdef"
GOOD_ROWS = [
    "0,1,150.000,0.000000,0,1,0,1",
    "1,0,0.000,0.000000,0,0,1,1",
    "2,1,150.000,1.570796,0,0,0,0",
]


def _write(tmp_path, lines):
    path = tmp_path / "events.log"
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


def test_header_carries_version_and_digest(small_config):
    log = run_experiment(small_config.replace(n_triggers=10))
    assert format_header(log) == f"{HEADER_TAG},version=1,digest={log.config_digest}"
    assert len(log.config_digest) == 16


def test_written_log_reads_back(tmp_path, small_config):
    cfg = small_config.replace(optics=InterferometerConfig(v_eom=150.0, phase=0.123456789))
    log = run_experiment(cfg)
    path = write_event_log(log, tmp_path / "events.log")

    loaded = read_event_log(path)
    assert loaded.config_digest == log.config_digest
    assert loaded.format_version == log.format_version
    assert len(loaded) == len(log)

    for col in ("trigger_index", "choice_bit", "blocked_path", "click_p1", "click_p2",
                "photon_count_emitted"):
        assert np.array_equal(loaded.records[col], log.records[col])
    assert np.allclose(loaded.records["phase"], 0.123457, atol=1e-9)


def test_record_line_format(tmp_path, small_config):
    cfg = small_config.replace(n_triggers=3, choice_mode="fixed",
                               optics=InterferometerConfig(v_eom=150.0))
    path = write_event_log(run_experiment(cfg), tmp_path / "events.log")

    lines = path.read_bytes().split(b"\n")
    assert lines[0].startswith(HEADER_TAG.encode())
    assert lines[1].startswith(b"0,1,150.000,0.000000,0,")
    assert b"\r" not in path.read_bytes()


def test_same_seed_same_bytes(tmp_path, small_config):
    a = write_event_log(run_experiment(small_config), tmp_path / "a.log")
    b = write_event_log(run_experiment(small_config), tmp_path / "b.log")
    assert a.read_bytes() == b.read_bytes()


def test_valid_file_parses(tmp_path):
    log = read_event_log(_write(tmp_path, [HEADER, *GOOD_ROWS]))
    assert len(log) == 3
    assert log.config_digest == "0123456789abcdef"
    assert log.records["click_p1"].tolist() == [True, False, False]


def test_missing_header(tmp_path):
    with pytest.raises(LogParseError) as exc:
        read_event_log(_write(tmp_path, GOOD_ROWS))
    assert exc.value.line_number == 1


def test_coded_value_out_of_range(tmp_path):
    rows = [*GOOD_ROWS[:2], "2,1,150.000,1.570796,0,0,3,0"]
    with pytest.raises(LogParseError, match="click_p2") as exc:
        read_event_log(_write(tmp_path, [HEADER, *rows]))
    assert exc.value.line_number == 4


def test_non_numeric_field(tmp_path):
    rows = [GOOD_ROWS[0], "1,0,abc,0.000000,0,0,1,1", GOOD_ROWS[2]]
    with pytest.raises(LogParseError, match="applied_v_eom") as exc:
        read_event_log(_write(tmp_path, [HEADER, *rows]))
    assert exc.value.line_number == 3


def test_short_record(tmp_path):
    rows = [GOOD_ROWS[0], "1,0,0.000,0.000000,0,0,1", GOOD_ROWS[2]]
    with pytest.raises(LogParseError) as exc:
        read_event_log(_write(tmp_path, [HEADER, *rows]))
    assert exc.value.line_number == 3


def test_long_record(tmp_path):
    rows = [GOOD_ROWS[0], "1,0,0.000,0.000000,0,0,1,1,9", GOOD_ROWS[2]]
    with pytest.raises(LogParseError) as exc:
        read_event_log(_write(tmp_path, [HEADER, *rows]))
    assert exc.value.line_number == 3


def test_out_of_order_trigger_index(tmp_path):
    rows = [GOOD_ROWS[0], GOOD_ROWS[2], GOOD_ROWS[1]]
    with pytest.raises(LogParseError, match="trigger_index") as exc:
        read_event_log(_write(tmp_path, [HEADER, *rows]))
    assert exc.value.line_number == 3


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_event_log(tmp_path / "absent.log")


def test_non_ascii_byte_reports_line(tmp_path):
    path = _write(tmp_path, [HEADER, *GOOD_ROWS])
    lines = path.read_bytes().split(b"\n")
    lines[2] = lines[2].replace(b"0.000", b"0.\xff00", 1)
    path.write_bytes(b"\n".join(lines))

    with pytest.raises(LogParseError, match="non-ASCII") as exc:
        read_event_log(path)
    assert exc.value.line_number == 3
