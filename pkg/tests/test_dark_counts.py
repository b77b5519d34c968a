import logging

import pytest

from qo_analysis.aggregation import CountSummary
from qo_analysis.dark_counts import subtract_dark_counts
from qo_simulation.config import DetectorModel

DETECTOR = DetectorModel(dark_rate=60.0)
# 1.9 s of live time at 238 ns per gate
N_TRIGGERS = 7_983_193


def _summary(n1, n2=10_000, n_coinc=0, duration=1.9):
    return CountSummary(n1=n1, n2=n2, n_coinc=n_coinc, n_triggers=N_TRIGGERS, duration=duration)


def test_identity_without_dark_counts():
    raw = _summary(500)
    assert subtract_dark_counts(raw, DetectorModel(dark_rate=0.0)) == raw


def test_subtracts_expected_dark_counts():
    corrected = subtract_dark_counts(_summary(10_000), DETECTOR)
    assert corrected.n1 == pytest.approx(9886.0)
    assert corrected.n1_err == pytest.approx((10_000 + 114) ** 0.5)
    assert not corrected.clamped


def test_dark_only_counts_clamp_to_zero(caplog):
    with caplog.at_level(logging.WARNING, logger="qo_analysis.dark_counts"):
        corrected = subtract_dark_counts(_summary(114), DETECTOR)
    assert corrected.n1 == 0.0
    assert corrected.clamped
    assert "clamped" in caplog.text


def test_never_negative():
    corrected = subtract_dark_counts(_summary(5, n2=3), DETECTOR)
    assert corrected.n1 == 0.0
    assert corrected.n2 == 0.0
    assert corrected.n_coinc == 0.0


def test_accidental_coincidences_removed():
    raw = _summary(20_000, n2=20_000, n_coinc=100)
    corrected = subtract_dark_counts(raw, DETECTOR)

    q = DETECTOR.dark_per_gate
    accidental = N_TRIGGERS * q * q + (corrected.n1 + corrected.n2) * q
    assert corrected.n_coinc == pytest.approx(100 - accidental)
    assert corrected.n_coinc <= min(corrected.n1, corrected.n2)


def test_requires_live_time():
    with pytest.raises(ValueError):
        subtract_dark_counts(_summary(100, duration=0.0), DETECTOR)
