"""
Least-squares fit of the P1 fringe, n1(Phi) = A (1 + V cos(Phi + phi0)).

The model is fitted in its linear form a + b cos(Phi) + c sin(Phi) with
Poisson weights; V = sqrt(b^2 + c^2) / a and phi0 = atan2(-c, b).
"""

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from qo_analysis.aggregation import CountSummary
from qo_physics.errors import FitDegenerateError

logger = logging.getLogger(__name__)


# -----------------------------
# Fit acceptance
# -----------------------------
MIN_PHASES = 4
MAX_VISIBILITY = 1.05
PHYSICAL_VISIBILITY = 1.0
UNIDENTIFIABLE_VISIBILITY = 1e-9


@dataclass(frozen=True)
class FringeFit:
    visibility: float
    visibility_error: float
    phase_offset: float
    mean_level: float
    mean_level_error: float
    n_points: int
    identifiable: bool = True
    overshoot: bool = False


def _linear_fringe(phase, a, b, c):
    return a + b * np.cos(phase) + c * np.sin(phase)


def fringe_model(phase, mean_level: float, visibility: float, phase_offset: float = 0.0):
    """Forward model A (1 + V cos(Phi + phi0))."""
    return mean_level * (1.0 + visibility * np.cos(np.asarray(phase) + phase_offset))


def phase_coverage(phases) -> float:
    """Arc of the circle covered by the phases: 2 pi minus the largest gap."""
    wrapped = np.unique(np.mod(np.asarray(phases, dtype=float), 2.0 * np.pi))
    if wrapped.size < 2:
        return 0.0
    gaps = np.diff(np.append(wrapped, wrapped[0] + 2.0 * np.pi))
    return float(2.0 * np.pi - gaps.max())


def fit_fringe_visibility(points: list[tuple[float, CountSummary]]) -> FringeFit:
    """
    Fits the P1 counts of a phase scan.

    Parameters
    ----------
    points : list of (phase, CountSummary)
        One summary per phase setting, raw or dark-subtracted.

    Returns
    -------
    FringeFit
        Visibility with its standard error from the fit covariance.
    """
    phases = np.array([p for p, _ in points], dtype=float)
    counts = np.array([s.n1 for _, s in points], dtype=float)
    sigma = np.array([max(s.n1_err, 1.0) for _, s in points], dtype=float)

    # -----------------------------
    # Coverage checks
    # -----------------------------
    distinct = np.unique(np.round(np.mod(phases, 2.0 * np.pi), 12)).size
    if distinct < MIN_PHASES:
        raise FitDegenerateError(
            f"Fringe fit needs at least {MIN_PHASES} distinct phases, got {distinct}"
        )
    coverage = phase_coverage(phases)
    if coverage <= np.pi:
        raise FitDegenerateError(
            f"Phases cover {coverage:.3f} rad; the fit needs more than pi"
        )

    # -----------------------------
    # Weighted linear solution as the starting point
    # -----------------------------
    weighted = np.column_stack([np.ones_like(phases), np.cos(phases), np.sin(phases)]) / sigma[:, None]
    start, *_ = np.linalg.lstsq(weighted, counts / sigma, rcond=None)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OptimizeWarning)
        params, pcov = curve_fit(
            _linear_fringe, phases, counts, p0=start, sigma=sigma, absolute_sigma=True,
        )
    if not np.all(np.isfinite(pcov)):
        # Linear model, absolute weights: covariance is (X^T W X)^-1
        logger.debug("curve_fit covariance not finite; using the linear-model covariance")
        pcov = np.linalg.inv(weighted.T @ weighted)

    a, b, c = params
    if a <= 0:
        raise FitDegenerateError(f"Negative fitted mean level A={a:.3g}")

    # -----------------------------
    # Visibility and delta-method error
    # -----------------------------
    amplitude = float(np.hypot(b, c))
    visibility = amplitude / a
    identifiable = bool(visibility > UNIDENTIFIABLE_VISIBILITY)

    if identifiable:
        grad = np.array([-amplitude / a ** 2, b / (a * amplitude), c / (a * amplitude)])
        variance = float(grad @ pcov @ grad)
        phase_offset = float(np.arctan2(-c, b))
    else:
        # Direction of (b, c) is undefined at zero amplitude
        variance = float(0.5 * (pcov[1, 1] + pcov[2, 2])) / a ** 2
        phase_offset = 0.0
        logger.debug("Fringe amplitude is zero; phase offset unidentifiable")

    if visibility > MAX_VISIBILITY:
        raise FitDegenerateError(
            f"Fitted visibility {visibility:.3f} exceeds {MAX_VISIBILITY:.2f}"
        )
    overshoot = bool(visibility > PHYSICAL_VISIBILITY)
    if overshoot:
        logger.warning("Fitted visibility %.4f exceeds 1 (noise overshoot)", visibility)

    return FringeFit(
        visibility=float(visibility),
        visibility_error=float(np.sqrt(max(variance, 0.0))),
        phase_offset=phase_offset,
        mean_level=float(a),
        mean_level_error=float(np.sqrt(pcov[0, 0])),
        n_points=len(points),
        identifiable=identifiable,
        overshoot=overshoot,
    )
