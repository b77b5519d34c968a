"""
Non-photon-number-resolving detector model.
"""

import numpy as np

from qo_simulation.config import DetectorModel


def thin_photons(present: np.ndarray, detector: DetectorModel,
                 rng: np.random.Generator) -> np.ndarray:
    """Bernoulli efficiency applied per photon, before routing."""
    return present & (rng.random(present.size) < detector.efficiency)


def apply_dark_counts(hits_p1: np.ndarray, hits_p2: np.ndarray,
                      detector: DetectorModel, rng: np.random.Generator):
    """
    Merge Poisson(dark_rate * gate) dark counts into the photon clicks.

    Detectors are independent; a dark count on a detector that already
    clicked does not add a second click.
    """
    mean_dark = detector.dark_per_gate
    if mean_dark == 0.0:
        return hits_p1, hits_p2

    n = hits_p1.size
    dark_p1 = rng.poisson(mean_dark, n) > 0
    dark_p2 = rng.poisson(mean_dark, n) > 0
    return hits_p1 | dark_p1, hits_p2 | dark_p2
