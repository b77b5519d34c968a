"""
Post-run analysis of event logs: the steps applied after a run completes,
once the events have been sorted by configuration.
"""

import logging
from dataclasses import dataclass

from qo_analysis.aggregation import CountSummary, pool, select, sort_by_configuration
from qo_analysis.dark_counts import subtract_dark_counts
from qo_analysis.estimators import (
    DistinguishabilityEstimate,
    Estimate,
    estimate_alpha,
    estimate_distinguishability,
)
from qo_analysis.fringe_fit import FringeFit, fit_fringe_visibility
from qo_simulation.config import DetectorModel
from qo_simulation.engine import EventLog

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FringeAnalysis:
    choice_bit: int
    points: list[tuple[float, CountSummary]]
    fit: FringeFit


def _choice_bits(summaries) -> list[int]:
    return sorted({key[0] for key in summaries})


def analyze_fringe_scan(log: EventLog, detector: DetectorModel) -> dict[int, FringeAnalysis]:
    """
    Dark-subtracted P1 fringe and fitted visibility per choice bit.

    Returns
    -------
    dict
        FringeAnalysis keyed by choice bit (0: EOM off, 1: EOM on).
    """
    logger.info("Sorting %d events by configuration...", len(log))
    summaries = sort_by_configuration(log, gate=detector.gate)

    results = {}
    for bit in _choice_bits(summaries):
        subset = select(summaries, choice_bit=bit, blocked_path="none")
        points = [
            (key[1], subtract_dark_counts(s, detector))
            for key, s in sorted(subset.items())
        ]
        fit = fit_fringe_visibility(points)
        logger.info("Choice bit %d: V = %.4f ± %.4f over %d phases",
                    bit, fit.visibility, fit.visibility_error, len(points))
        results[bit] = FringeAnalysis(choice_bit=bit, points=points, fit=fit)

    return results


def analyze_blocked_paths(log_path2_blocked: EventLog, log_path1_blocked: EventLog,
                          detector: DetectorModel) -> dict[int, DistinguishabilityEstimate]:
    """Distinguishability per choice bit from the two blocked-path runs."""
    sorted2 = sort_by_configuration(log_path2_blocked, gate=detector.gate)
    sorted1 = sort_by_configuration(log_path1_blocked, gate=detector.gate)

    results = {}
    for bit in sorted(set(_choice_bits(sorted2)) & set(_choice_bits(sorted1))):
        blocked2 = subtract_dark_counts(
            pool(select(sorted2, choice_bit=bit, blocked_path="path2").values()), detector
        )
        blocked1 = subtract_dark_counts(
            pool(select(sorted1, choice_bit=bit, blocked_path="path1").values()), detector
        )
        results[bit] = estimate_distinguishability(blocked2, blocked1)
        logger.info("Choice bit %d: D = %s (D1 = %s, D2 = %s)",
                    bit, results[bit].d, results[bit].d1, results[bit].d2)

    return results


def analyze_alpha(log: EventLog, detector: DetectorModel) -> tuple[CountSummary, Estimate]:
    """Pooled, dark-subtracted singles and coincidences, and alpha."""
    counts = subtract_dark_counts(
        pool(sort_by_configuration(log, gate=detector.gate).values()), detector
    )
    alpha = estimate_alpha(counts)
    logger.info("alpha = %s (n1=%.0f, n2=%.0f, coincidences=%.0f)",
                alpha, counts.n1, counts.n2, counts.n_coinc)
    return counts, alpha
