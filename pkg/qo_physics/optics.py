"""
Closed-form physics of the Mach-Zehnder interferometer with a variable
output beamsplitter (VBS).

The VBS reflectivity R is set by the voltage applied to an electro-optic
modulator. R fixes the fringe visibility and the which-path
distinguishability; the phase Phi between the two arms fixes where on the
fringe a photon lands.
"""

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from qo_physics.errors import ConfigurationError, OutOfRangeError


# -----------------------------
# Reference calibration (defaults)
# -----------------------------
DEFAULT_BETA_DEG = 24.0
DEFAULT_V_PI = 217.0

# Experimental VBS range; D = 1 - 2R is only defined up to here
MAX_DISTINGUISHABLE_R = 0.5
# Round-off from inverting the calibration, e.g. R = 0.5 -> 0.5000000000000001
R_TOLERANCE = 1e-12


class InterferometerConfig(BaseModel):
    """EOM orientation, drive voltage, arm phase and contrast factor."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    beta: float = Field(DEFAULT_BETA_DEG, ge=0.0, le=45.0)
    v_pi: float = Field(DEFAULT_V_PI, gt=0.0)
    v_eom: float = Field(0.0, ge=0.0)
    phase: float = 0.0
    xi: float = Field(1.0, ge=0.0, le=1.0)


@dataclass(frozen=True)
class DetectionProbabilities:
    p_d1: float
    p_d2: float


@dataclass(frozen=True)
class JointPathDetectorTable:
    """
    Joint probabilities p(P_i, path j), indexed p[i-1][j-1].

    Incoherent which-path accounting only: the interference cross-term
    is not represented here.
    """

    p: tuple[tuple[float, float], tuple[float, float]]

    def entry(self, detector: int, path: int) -> float:
        return self.p[detector - 1][path - 1]


# -----------------------------
# Internal helpers
# -----------------------------
def _check_config(cfg: InterferometerConfig):
    problems = []
    if not 0.0 <= cfg.beta <= 45.0:
        problems.append(f"beta={cfg.beta} outside [0, 45] degrees")
    if not cfg.v_pi > 0.0:
        problems.append(f"v_pi={cfg.v_pi} must be > 0")
    if not cfg.v_eom >= 0.0:
        problems.append(f"v_eom={cfg.v_eom} must be >= 0")
    if not 0.0 <= cfg.xi <= 1.0:
        problems.append(f"xi={cfg.xi} outside [0, 1]")

    if problems:
        raise ConfigurationError(
            f"Invalid interferometer configuration: {sorted(problems)}"
        )


def _check_probability(name: str, value: float, upper: float = 1.0):
    if not 0.0 <= value <= upper:
        raise OutOfRangeError(f"{name}={value} outside [0, {upper}]")


# -----------------------------
# Public API
# -----------------------------
def reflectivity_from_voltage(cfg: InterferometerConfig) -> float:
    """
    VBS reflectivity for the voltage applied to the EOM.

    R = sin^2(2 beta) * sin^2((pi/2) * V_EOM / V_pi)

    Parameters
    ----------
    cfg : InterferometerConfig
        beta in degrees, voltages in volts.

    Returns
    -------
    float
        Reflectivity R in [0, sin^2(2 beta)].
    """
    _check_config(cfg)

    mixing = np.sin(2.0 * np.deg2rad(cfg.beta)) ** 2
    drive = np.sin(0.5 * np.pi * cfg.v_eom / cfg.v_pi) ** 2
    return float(mixing * drive)


def voltage_for_reflectivity(r: float, beta: float = DEFAULT_BETA_DEG,
                             v_pi: float = DEFAULT_V_PI) -> float:
    """Inverse of reflectivity_from_voltage on the branch V_EOM in [0, V_pi]."""
    if v_pi <= 0.0:
        raise ConfigurationError(f"v_pi={v_pi} must be > 0")

    mixing = np.sin(2.0 * np.deg2rad(beta)) ** 2
    _check_probability("R", r, upper=float(mixing))
    if mixing == 0.0:
        return 0.0

    return float(2.0 * v_pi / np.pi * np.arcsin(np.sqrt(r / mixing)))


def theoretical_visibility(r: float, xi: float = 1.0) -> float:
    """V = xi * 2 sqrt(R (1 - R))."""
    _check_probability("R", r)
    if not 0.0 <= xi <= 1.0:
        raise ConfigurationError(f"xi={xi} outside [0, 1]")

    return float(xi * 2.0 * np.sqrt(r * (1.0 - r)))


def has_distinguishability(r: float) -> bool:
    """True when D = 1 - 2R is defined for r, up to round-off."""
    return 0.0 <= r <= MAX_DISTINGUISHABLE_R + R_TOLERANCE


def theoretical_distinguishability(r: float) -> float:
    """D = 1 - 2R, defined for R in [0, 0.5]."""
    if has_distinguishability(r):
        r = min(r, MAX_DISTINGUISHABLE_R)
    _check_probability("R", r, upper=MAX_DISTINGUISHABLE_R)
    return 1.0 - 2.0 * r


def fringe_probability(r, phase, xi=1.0):
    """
    Probability that a photon exits towards P1, vectorized.

    p_d1 = (1 + V cos(Phi)) / 2 with V = xi * 2 sqrt(R (1 - R)); Phi = 0
    puts the bright fringe on P1. Accepts scalars or numpy arrays.
    """
    r = np.asarray(r, dtype=float)
    visibility = xi * 2.0 * np.sqrt(r * (1.0 - r))
    return 0.5 * (1.0 + visibility * np.cos(phase))


def detection_probabilities(cfg: InterferometerConfig) -> DetectionProbabilities:
    """Exit probabilities towards P1 and P2 for one photon at the VBS."""
    r = reflectivity_from_voltage(cfg)
    # Validates xi / R domain the same way the scalar formula does
    theoretical_visibility(r, cfg.xi)

    p_d1 = float(fringe_probability(r, cfg.phase, cfg.xi))
    return DetectionProbabilities(p_d1=p_d1, p_d2=1.0 - p_d1)


def joint_path_detector_table(r: float) -> JointPathDetectorTable:
    """
    Incoherent accounting of p(P_i, path j) for a balanced input splitter.

    Path j leaves on its "aligned" detector P_j with probability 1 - R.
    """
    if has_distinguishability(r):
        r = min(r, MAX_DISTINGUISHABLE_R)
    _check_probability("R", r, upper=MAX_DISTINGUISHABLE_R)

    aligned = 0.5 * (1.0 - r)
    crossed = 0.5 * r
    return JointPathDetectorTable(p=((aligned, crossed), (crossed, aligned)))


def path_distinguishabilities(table: JointPathDetectorTable) -> tuple[float, float]:
    """Return (D1, D2); their sum is the distinguishability D."""
    d1 = abs(table.entry(1, 1) - table.entry(2, 1))
    d2 = abs(table.entry(1, 2) - table.entry(2, 2))
    return d1, d2
