import logging

import numpy as np

from qo_analysis.aggregation import CountSummary
from qo_simulation.config import DetectorModel

logger = logging.getLogger(__name__)

# Residuals below this fraction of the dark expectation count as zero
ROUNDING = 1e-9


def subtract_dark_counts(raw: CountSummary, model: DetectorModel) -> CountSummary:
    """
    Removes the expected dark counts from a count summary.

    Parameters
    ----------
    raw : CountSummary
        Counts as sorted from the log.
    model : DetectorModel
        Dark rate per detector; the gate gives the per-trigger dark
        probability used for accidental coincidences.

    Returns
    -------
    CountSummary
        n_i' = max(0, n_i - dark_rate * duration), errors in quadrature with
        the Poisson spread of the subtracted dark expectation. Counts pinned
        at zero set the `clamped` flag.
    """
    if raw.duration <= 0:
        raise ValueError("Dark subtraction needs duration > 0")

    # -----------------------------
    # Identity for dark-free detectors
    # -----------------------------
    if model.dark_rate == 0.0:
        return raw

    dark = model.dark_rate * raw.duration
    clamped = raw.clamped

    # -----------------------------
    # Singles
    # -----------------------------
    singles = {}
    for name in ("n1", "n2"):
        value = getattr(raw, name) - dark
        if value <= ROUNDING * max(dark, 1.0):
            clamped = True
            value = 0.0
        singles[name] = value
        singles[f"{name}_err"] = float(np.sqrt(getattr(raw, f"{name}_err") ** 2 + dark))

    # -----------------------------
    # Accidental coincidences: dark x dark and dark x photon
    # -----------------------------
    q = model.dark_per_gate
    accidental = raw.n_triggers * q * q + (singles["n1"] + singles["n2"]) * q
    n_coinc = raw.n_coinc - accidental
    if n_coinc < 0:
        clamped = clamped or raw.n_coinc > 0
        n_coinc = 0.0
    n_coinc = min(n_coinc, singles["n1"], singles["n2"])

    if clamped and not raw.clamped:
        logger.warning(
            "Dark subtraction clamped counts at zero (n1=%s, n2=%s, dark=%.1f)",
            raw.n1, raw.n2, dark,
        )

    return raw.with_counts(
        n1=singles["n1"],
        n2=singles["n2"],
        n1_err=singles["n1_err"],
        n2_err=singles["n2_err"],
        n_coinc=n_coinc,
        n_coinc_err=float(np.sqrt(raw.n_coinc_err ** 2 + accidental)),
        clamped=clamped,
    )
