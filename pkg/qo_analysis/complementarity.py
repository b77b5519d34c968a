import logging
from dataclasses import dataclass

import numpy as np

from qo_analysis.estimators import Estimate

logger = logging.getLogger(__name__)


# -----------------------------
# Bound thresholds
# -----------------------------
PASS_SIGMA = 2.0   # per-result pass flag
BOUND_SIGMA = 3.0  # duality bound check across a sweep


@dataclass(frozen=True)
class ComplementarityResult:
    v: Estimate
    d: Estimate
    s: Estimate
    r_nominal: float | None
    passed: bool

    def within_bound(self, n_sigma: float = BOUND_SIGMA) -> bool:
        return self.s.value <= 1.0 + n_sigma * self.s.error


def complementarity_statistic(v: Estimate, d: Estimate,
                              r_nominal: float | None = None) -> ComplementarityResult:
    """
    s = V^2 + D^2 with error sqrt((2 V sV)^2 + (2 D sD)^2).

    The point estimate is reported even above 1; the result passes iff
    s <= 1 + 2 sigma.
    """
    if v.value < 0 or d.value < 0:
        raise ValueError(f"V and D must be >= 0, got V={v.value}, D={d.value}")

    s = v.value ** 2 + d.value ** 2
    error = float(np.hypot(2.0 * v.value * v.error, 2.0 * d.value * d.error))
    passed = s <= 1.0 + PASS_SIGMA * error

    if not passed:
        logger.warning("V^2 + D^2 = %.4f ± %.4f exceeds the duality bound", s, error)

    return ComplementarityResult(
        v=v, d=d, s=Estimate(float(s), error), r_nominal=r_nominal, passed=bool(passed),
    )


def mean_statistic(results: list[ComplementarityResult]) -> Estimate:
    """Inverse-variance mean of V^2 + D^2 over a sweep (plain mean if errors vanish)."""
    if not results:
        raise ValueError("No sweep points to average")

    values = np.array([r.s.value for r in results])
    errors = np.array([r.s.error for r in results])
    if np.all(errors > 0):
        weights = 1.0 / errors ** 2
        return Estimate(float(np.sum(weights * values) / weights.sum()),
                        float(1.0 / np.sqrt(weights.sum())))

    return Estimate(float(values.mean()), float(values.std(ddof=1) / np.sqrt(len(values)))
                    if len(values) > 1 else 0.0)
