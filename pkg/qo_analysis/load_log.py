import logging
import re
from pathlib import Path

import pandas as pd

from qo_physics.errors import LogParseError
from qo_simulation.event_log import HEADER_TAG
from qo_simulation.engine import RECORD_COLUMNS, EventLog

logger = logging.getLogger(__name__)


# -----------------------------
# Allowed values per column
# -----------------------------
CODED_COLUMNS = {
    "choice_bit": {0, 1},
    "blocked_path": {0, 1, 2},
    "click_p1": {0, 1},
    "click_p2": {0, 1},
    "photon_count_emitted": {0, 1, 2},
}

# First record sits on line 2 of the file
_FIRST_RECORD_LINE = 2


# -----------------------------
# Internal helpers
# -----------------------------
def _check_file_exists(path: Path):
    if not path.exists():
        raise FileNotFoundError(
            f"Required file not found: {path.as_posix()}"
        )


def _check_ascii(path: Path):
    with open(path, "rb") as fh:
        for line_number, raw in enumerate(fh, start=1):
            try:
                raw.decode("ascii")
            except UnicodeDecodeError as exc:
                raise LogParseError(
                    f"non-ASCII byte 0x{raw[exc.start]:02x} at column {exc.start + 1}",
                    line_number=line_number,
                ) from exc


def _parse_header(line: str) -> tuple[int, str]:
    fields = line.strip().split(",")
    if not fields or fields[0] != HEADER_TAG:
        raise LogParseError(f"missing {HEADER_TAG} header", line_number=1)

    try:
        meta = dict(field.split("=", 1) for field in fields[1:])
        return int(meta["version"]), meta["digest"]
    except (KeyError, ValueError) as exc:
        raise LogParseError(f"malformed header {line.strip()!r}", line_number=1) from exc


def _first_bad_row(mask: pd.Series) -> int:
    return int(mask.to_numpy().nonzero()[0][0]) + _FIRST_RECORD_LINE


def _check_records(df: pd.DataFrame) -> pd.DataFrame:
    # Non-numeric fields become NaN and are reported below
    for col in RECORD_COLUMNS:
        df[col] = pd.to_numeric(df[col], errors="coerce")
        bad = df[col].isna()
        if bad.any():
            raise LogParseError(f"missing or non-numeric {col}",
                                line_number=_first_bad_row(bad))

    for col, allowed in CODED_COLUMNS.items():
        bad = ~df[col].isin(allowed)
        if bad.any():
            raise LogParseError(f"{col} not in {sorted(allowed)}",
                                line_number=_first_bad_row(bad))

    expected = pd.RangeIndex(len(df))
    bad = pd.Series(df["trigger_index"].to_numpy() != expected.to_numpy())
    if bad.any():
        raise LogParseError("trigger_index out of order",
                            line_number=_first_bad_row(bad))

    return df.astype({
        "trigger_index": "int64",
        "choice_bit": "int8",
        "blocked_path": "int8",
        "click_p1": "bool",
        "click_p2": "bool",
        "photon_count_emitted": "int8",
    })


# -----------------------------
# Public API
# -----------------------------
def read_event_log(path: Path) -> EventLog:
    """
    Loads and validates an event-log file.

    Returns
    -------
    EventLog
        Records in file order.

    Raises
    ------
    LogParseError
        With the 1-based line number of the first malformed line.
    """
    path = Path(path)
    _check_file_exists(path)
    _check_ascii(path)

    with open(path, encoding="ascii") as fh:
        version, digest = _parse_header(fh.readline())

    try:
        df = pd.read_csv(path, skiprows=1, header=None)
    except pd.errors.EmptyDataError:
        df = pd.DataFrame(columns=RECORD_COLUMNS)
    except pd.errors.ParserError as exc:
        # The C parser reports file line numbers, skipped header included
        match = re.search(r"line (\d+)", str(exc))
        line_number = int(match.group(1)) if match else None
        raise LogParseError(f"wrong field count ({exc})", line_number=line_number) from exc

    if df.shape[1] != len(RECORD_COLUMNS):
        raise LogParseError(
            f"expected {len(RECORD_COLUMNS)} fields per record, got {df.shape[1]}",
            line_number=_FIRST_RECORD_LINE,
        )
    df.columns = RECORD_COLUMNS

    records = _check_records(df)
    logger.info("Loaded %d records from %s", len(records), path.as_posix())
    return EventLog(format_version=version, config_digest=digest, records=records)
