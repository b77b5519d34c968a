"""
Event-log persistence.

Layout: one header line, then one record per line in TriggerRecord order,
comma-separated, booleans as 0/1, volts with 3 decimals, radians with 6.
"""

import logging
from pathlib import Path

import numpy as np

from qo_simulation.engine import RECORD_COLUMNS, EventLog

logger = logging.getLogger(__name__)


# -----------------------------
# File format (LOCKED)
# -----------------------------
HEADER_TAG = "#qo-event-log"
RECORD_FORMAT = "%d,%d,%.3f,%.6f,%d,%d,%d,%d"
WRITE_BLOCK = 1 << 18


def format_header(log: EventLog) -> str:
    return f"{HEADER_TAG},version={log.format_version},digest={log.config_digest}"


def write_event_log(log: EventLog, path: Path) -> Path:
    """
    Persist the log; output is bit-exact for a given seed on any platform.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    values = log.records[RECORD_COLUMNS].to_numpy(dtype=float)

    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write(format_header(log) + "\n")
        for start in range(0, len(values), WRITE_BLOCK):
            np.savetxt(fh, values[start:start + WRITE_BLOCK],
                       fmt=RECORD_FORMAT, newline="\n")

    logger.info("Event log written: %s (%d records)", path.as_posix(), len(log))
    return path
