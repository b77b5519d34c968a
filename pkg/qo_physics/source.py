"""
Clock-triggered imperfect single-photon source.

Each trigger emits 0, 1 or 2 photons. The two-photon probability p2 sets
the anticorrelation parameter alpha (equivalent to g2(0)).
"""

import logging
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from qo_physics.errors import ConfigurationError, UndefinedStatisticError

logger = logging.getLogger(__name__)


# -----------------------------
# Defaults
# -----------------------------
DEFAULT_P1 = 0.02


class EmissionModel(BaseModel):
    """Per-trigger photon-number distribution truncated at two photons."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    p1: float = Field(DEFAULT_P1, ge=0.0, le=1.0)
    p2: float = Field(0.0, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_total(self):
        if self.p1 + self.p2 > 1.0:
            raise ValueError(f"p1 + p2 = {self.p1 + self.p2} exceeds 1")
        if self.p2 > self.p1:
            logger.warning(
                "Emission model p2=%g > p1=%g is outside the sub-Poissonian regime",
                self.p2, self.p1,
            )
        return self

    @property
    def p0(self) -> float:
        return 1.0 - self.p1 - self.p2


@dataclass(frozen=True)
class EmissionOutcome:
    photon_count: int


def _check_model(model: EmissionModel):
    if model.p1 < 0.0 or model.p2 < 0.0 or model.p1 + model.p2 > 1.0:
        raise ConfigurationError(
            f"Invalid emission model: p1={model.p1}, p2={model.p2}"
        )


def sample_photon_counts(model: EmissionModel, rng: np.random.Generator,
                         n: int) -> np.ndarray:
    """
    Draw n emission outcomes, one uniform sample per trigger.

    Returns an int8 array with values in {0, 1, 2}.
    """
    _check_model(model)

    u = rng.random(n)
    counts = (u >= model.p0).astype(np.int8)
    counts += (u >= model.p0 + model.p1).astype(np.int8)
    return counts


def sample_emission(model: EmissionModel, rng: np.random.Generator) -> EmissionOutcome:
    """Single-trigger form of sample_photon_counts."""
    return EmissionOutcome(photon_count=int(sample_photon_counts(model, rng, 1)[0]))


def theoretical_alpha(model: EmissionModel) -> float:
    """
    alpha = <n(n-1)> / <n>^2 = 2 p2 / (p1 + 2 p2)^2.
    """
    _check_model(model)

    mean_n = model.p1 + 2.0 * model.p2
    if mean_n <= 0.0:
        raise UndefinedStatisticError("alpha undefined for zero mean photon number")

    return 2.0 * model.p2 / mean_n ** 2


def two_photon_probability_for_alpha(p1: float, alpha: float) -> float:
    """
    p2 giving theoretical_alpha == alpha at fixed p1.

    Smaller root of 4 a p2^2 + (4 a p1 - 2) p2 + a p1^2 = 0, the branch
    continuous with p2 = 0 at alpha = 0.
    """
    if p1 <= 0.0:
        raise ConfigurationError(f"p1={p1} must be > 0 to calibrate alpha")
    if alpha < 0.0:
        raise ConfigurationError(f"alpha={alpha} must be >= 0")
    if alpha == 0.0:
        return 0.0

    b = 2.0 - 4.0 * alpha * p1
    discriminant = b * b - 16.0 * alpha * alpha * p1 * p1
    if discriminant < 0.0:
        raise ConfigurationError(f"alpha={alpha} unreachable with p1={p1}")

    # Rationalized root, stable for small alpha * p1
    p2 = 2.0 * alpha * p1 * p1 / (b + np.sqrt(discriminant))
    if p1 + p2 > 1.0:
        raise ConfigurationError(f"alpha={alpha} needs p1 + p2 > 1 at p1={p1}")
    return float(p2)


def gated_alpha(model: EmissionModel, efficiency: float = 1.0) -> float:
    """
    alpha read by two non-number-resolving detectors behind a 50/50 split.

    Photons are lost independently with probability 1 - efficiency, then
    routed independently; two photons on the same detector give one click.
    Agrees with theoretical_alpha to first order in p2 / p1.
    """
    if not 0.0 < efficiency <= 1.0:
        raise ConfigurationError(f"efficiency={efficiency} outside (0, 1]")
    _check_model(model)

    eta = efficiency
    p1 = eta * model.p1 + 2.0 * eta * (1.0 - eta) * model.p2
    p2 = eta * eta * model.p2

    singles = p1 + 1.5 * p2
    if singles <= 0.0:
        raise UndefinedStatisticError("alpha undefined for zero detection probability")

    return 2.0 * p2 / singles ** 2
