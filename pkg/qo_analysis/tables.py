"""
Result tables: fringe CSV, summary report, duality-sweep CSV.

Tables carry no timestamps; replays with the same seed are byte-identical.
"""

import json
from pathlib import Path

import pandas as pd

from qo_analysis.complementarity import ComplementarityResult
from qo_analysis.run_analysis import FringeAnalysis
from qo_physics.optics import (
    has_distinguishability,
    theoretical_distinguishability,
    theoretical_visibility,
)


# -----------------------------
# Output names (LOCKED)
# -----------------------------
FRINGE_CSV = "fringe_table.csv"
SUMMARY_JSON = "summary.json"
SWEEP_CSV = "duality_sweep.csv"

FLOAT_FORMAT = "%.6f"

FRINGE_COLUMNS = [
    "choice_bit", "v_eom", "r_nominal", "phase", "n_triggers",
    "n1", "n1_err", "n2", "n2_err", "clamped",
]

SWEEP_COLUMNS = [
    "v_eom", "r_nominal", "v", "v_err", "d", "d_err",
    "v2", "d2", "s", "s_err", "v2_theory", "d2_theory", "passed",
]


def fringe_table(analyses: dict[int, FringeAnalysis], v_eom_by_bit: dict[int, float],
                 r_by_bit: dict[int, float]) -> pd.DataFrame:
    """One row per (choice bit, phase) with dark-subtracted counts."""
    rows = []
    for bit, analysis in sorted(analyses.items()):
        for phase, s in analysis.points:
            rows.append({
                "choice_bit": bit,
                "v_eom": v_eom_by_bit[bit],
                "r_nominal": r_by_bit[bit],
                "phase": phase,
                "n_triggers": s.n_triggers,
                "n1": s.n1,
                "n1_err": s.n1_err,
                "n2": s.n2,
                "n2_err": s.n2_err,
                "clamped": int(s.clamped),
            })
    return pd.DataFrame(rows, columns=FRINGE_COLUMNS)


def _d2_theory(r: float) -> float:
    if not has_distinguishability(r):
        return float("nan")
    return theoretical_distinguishability(r) ** 2


def sweep_table(points: list[tuple[float, ComplementarityResult]], xi: float = 1.0) -> pd.DataFrame:
    """Rows of V^2, D^2 and their sum against V_EOM, with theory curves."""
    rows = []
    for v_eom, result in points:
        r = result.r_nominal
        rows.append({
            "v_eom": v_eom,
            "r_nominal": r,
            "v": result.v.value,
            "v_err": result.v.error,
            "d": result.d.value,
            "d_err": result.d.error,
            "v2": result.v.value ** 2,
            "d2": result.d.value ** 2,
            "s": result.s.value,
            "s_err": result.s.error,
            "v2_theory": theoretical_visibility(r, xi) ** 2,
            "d2_theory": _d2_theory(r),
            "passed": int(result.passed),
        })
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def write_table(df: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_summary(summary: dict, path: Path) -> Path:
    """Sorted-key JSON report of estimates and pass flags."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
