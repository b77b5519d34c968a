import logging
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from qo_physics.errors import LogParseError
from qo_simulation.config import BLOCKED_NAMES, DEFAULT_GATE
from qo_simulation.engine import RECORD_COLUMNS, EventLog

logger = logging.getLogger(__name__)


# -----------------------------
# Sorting keys
# -----------------------------
PHASE_DECIMALS = 6  # matches the event-log file precision

ConfigurationKey = tuple[int, float, str]  # (choice_bit, phase, blocked_path)


@dataclass(frozen=True)
class CountSummary:
    """
    Detector counts for one configuration.

    Errors default to Poisson sqrt(n). After dark subtraction the counts
    may be non-integer and `clamped` records any count pinned at zero.
    """

    n1: float
    n2: float
    n_coinc: float
    n_triggers: int
    duration: float
    n1_err: float = field(default=None)
    n2_err: float = field(default=None)
    n_coinc_err: float = field(default=None)
    clamped: bool = False

    def __post_init__(self):
        for name in ("n1", "n2", "n_coinc", "n_triggers", "duration"):
            if getattr(self, name) < 0:
                raise ValueError(f"CountSummary.{name} must be >= 0")
        if self.n_coinc > min(self.n1, self.n2):
            raise ValueError(
                f"n_coinc={self.n_coinc} exceeds min(n1, n2)={min(self.n1, self.n2)}"
            )
        # Poisson defaults
        for name in ("n1", "n2", "n_coinc"):
            if getattr(self, f"{name}_err") is None:
                object.__setattr__(self, f"{name}_err", float(np.sqrt(getattr(self, name))))

    def merged(self, other: "CountSummary") -> "CountSummary":
        """Associative merge of two disjoint sets of triggers."""
        return CountSummary(
            n1=self.n1 + other.n1,
            n2=self.n2 + other.n2,
            n_coinc=self.n_coinc + other.n_coinc,
            n_triggers=self.n_triggers + other.n_triggers,
            duration=self.duration + other.duration,
            n1_err=float(np.hypot(self.n1_err, other.n1_err)),
            n2_err=float(np.hypot(self.n2_err, other.n2_err)),
            n_coinc_err=float(np.hypot(self.n_coinc_err, other.n_coinc_err)),
            clamped=self.clamped or other.clamped,
        )

    def with_counts(self, **changes) -> "CountSummary":
        return replace(self, **changes)


def summarize_records(records: pd.DataFrame, gate: float = DEFAULT_GATE) -> CountSummary:
    """Counts over a set of records; duration is live time n_triggers * gate."""
    n_triggers = len(records)
    click_p1 = records["click_p1"].to_numpy(dtype=bool)
    click_p2 = records["click_p2"].to_numpy(dtype=bool)
    return CountSummary(
        n1=int(click_p1.sum()),
        n2=int(click_p2.sum()),
        n_coinc=int((click_p1 & click_p2).sum()),
        n_triggers=n_triggers,
        duration=n_triggers * gate,
    )


def sort_by_configuration(log: EventLog,
                          gate: float = DEFAULT_GATE) -> dict[ConfigurationKey, CountSummary]:
    """
    Sorts the events by interferometer configuration.

    Parameters
    ----------
    log : EventLog
        Well-formed log (simulated or loaded from file).
    gate : float
        Seconds of live time per trigger.

    Returns
    -------
    dict
        CountSummary per (choice_bit, phase, blocked_path) key. The keys
        partition the log: trigger totals add up to len(log).
    """

    # -----------------------------
    # Required columns check
    # -----------------------------
    missing = set(RECORD_COLUMNS) - set(log.records.columns)
    if missing:
        raise LogParseError(f"Event log missing columns: {sorted(missing)}")

    df = log.records
    work = pd.DataFrame({
        "choice_bit": df["choice_bit"].astype(int),
        "phase": df["phase"].astype(float).round(PHASE_DECIMALS),
        "blocked_path": df["blocked_path"].astype(int),
        "click_p1": df["click_p1"].astype(bool),
        "click_p2": df["click_p2"].astype(bool),
    })
    unknown = ~work["blocked_path"].isin(list(BLOCKED_NAMES))
    if unknown.any():
        first = int(unknown.to_numpy().nonzero()[0][0])
        raise LogParseError(
            f"blocked_path code {int(work['blocked_path'].iloc[first])} at record {first} "
            f"not in {sorted(BLOCKED_NAMES)}"
        )
    work["coinc"] = work["click_p1"] & work["click_p2"]

    # -----------------------------
    # Perform aggregation
    # -----------------------------
    agg_df = (
        work.groupby(["choice_bit", "phase", "blocked_path"], as_index=False, sort=True)
        .agg(
            n1=("click_p1", "sum"),
            n2=("click_p2", "sum"),
            n_coinc=("coinc", "sum"),
            n_triggers=("click_p1", "size"),
        )
    )

    summaries = {}
    for row in agg_df.itertuples(index=False):
        key = (int(row.choice_bit), float(row.phase), BLOCKED_NAMES[int(row.blocked_path)])
        summaries[key] = CountSummary(
            n1=int(row.n1),
            n2=int(row.n2),
            n_coinc=int(row.n_coinc),
            n_triggers=int(row.n_triggers),
            duration=int(row.n_triggers) * gate,
        )

    logger.debug("Sorted %d records into %d configurations", len(df), len(summaries))
    return summaries


def select(summaries: dict[ConfigurationKey, CountSummary], choice_bit: int | None = None,
           blocked_path: str | None = None) -> dict[ConfigurationKey, CountSummary]:
    """Subset of sorted summaries matching the given key parts."""
    return {
        key: s for key, s in summaries.items()
        if (choice_bit is None or key[0] == choice_bit)
        and (blocked_path is None or key[2] == blocked_path)
    }


def pool(summaries) -> CountSummary:
    """Merge summaries (e.g. all phases of a blocked-path run)."""
    summaries = list(summaries)
    if not summaries:
        raise ValueError("Nothing to pool")

    total = summaries[0]
    for s in summaries[1:]:
        total = total.merged(s)
    return total
