"""
Distinguishability and anticorrelation estimators from sorted counts.
"""

from dataclasses import dataclass

import numpy as np

from qo_analysis.aggregation import CountSummary
from qo_physics.errors import InsufficientDataError, UndefinedStatisticError


@dataclass(frozen=True)
class Estimate:
    value: float
    error: float

    def __str__(self):
        return f"{self.value:.4f} ± {self.error:.4f}"


@dataclass(frozen=True)
class DistinguishabilityEstimate:
    d: Estimate
    # D1: path 2 blocked, D2: path 1 blocked
    d1: Estimate
    d2: Estimate


def blocked_path_contrast(summary: CountSummary) -> Estimate:
    """
    |n1 - n2| / (n1 + n2) for one blocked-path run.

    Errors of n1 and n2 are propagated; for raw Poisson counts this is the
    binomial error sqrt((1 - r^2) / (n1 + n2)).
    """
    n1, n2 = summary.n1, summary.n2
    total = n1 + n2
    if total <= 0:
        raise InsufficientDataError("Blocked-path run has no counts")

    r = (n1 - n2) / total
    error = 2.0 * np.hypot(n2 * summary.n1_err, n1 * summary.n2_err) / total ** 2
    return Estimate(value=float(abs(r)), error=float(error))


def estimate_distinguishability(blocked2: CountSummary,
                                blocked1: CountSummary) -> DistinguishabilityEstimate:
    """
    D = (contrast | path 2 blocked) / 2 + (contrast | path 1 blocked) / 2.

    Each blocked run only sees the half of the photons sent into the open
    arm, so its contrast is halved to recover the joint probabilities
    p(P_i, path j); D then estimates 1 - 2R.
    """
    c2 = blocked_path_contrast(blocked2)
    c1 = blocked_path_contrast(blocked1)

    d1 = Estimate(0.5 * c2.value, 0.5 * c2.error)
    d2 = Estimate(0.5 * c1.value, 0.5 * c1.error)
    d = Estimate(d1.value + d2.value, float(np.hypot(d1.error, d2.error)))
    return DistinguishabilityEstimate(d=d, d1=d1, d2=d2)


def estimate_alpha(s: CountSummary) -> Estimate:
    """
    alpha = n_coinc * n_triggers / (n1 * n2), Poisson errors in quadrature.

    A zero coincidence count is given a one-count uncertainty.
    """
    if s.n_triggers <= 0:
        raise InsufficientDataError("alpha needs n_triggers > 0")
    if s.n1 <= 0 or s.n2 <= 0:
        raise UndefinedStatisticError("alpha undefined with zero singles")

    scale = s.n_triggers / (s.n1 * s.n2)
    alpha = s.n_coinc * scale

    coinc_err = max(s.n_coinc_err, 1.0) if s.n_coinc == 0 else s.n_coinc_err
    error = scale * np.sqrt(
        coinc_err ** 2
        + (s.n_coinc * s.n1_err / s.n1) ** 2
        + (s.n_coinc * s.n2_err / s.n2) ** 2
    )
    return Estimate(value=float(alpha), error=float(error))
