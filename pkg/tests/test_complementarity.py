import logging

import numpy as np
import pytest

from qo_analysis.complementarity import complementarity_statistic, mean_statistic
from qo_analysis.estimators import Estimate


def test_pure_wave_behavior_saturates_bound():
    result = complementarity_statistic(Estimate(1.0, 0.0), Estimate(0.0, 0.0))
    assert result.s.value == 1.0
    assert result.s.error == 0.0
    assert result.passed


def test_error_propagation():
    result = complementarity_statistic(Estimate(0.93, 0.02), Estimate(0.14, 0.01), r_nominal=0.43)
    assert result.s.value == pytest.approx(0.8845, abs=1e-4)
    assert result.s.error == pytest.approx(0.0373, abs=1e-4)
    assert result.r_nominal == 0.43
    assert result.passed


def test_violation_is_reported_not_hidden(caplog):
    with caplog.at_level(logging.WARNING, logger="qo_analysis.complementarity"):
        result = complementarity_statistic(Estimate(1.0, 0.01), Estimate(0.3, 0.01))
    assert result.s.value == pytest.approx(1.09)
    assert not result.passed
    assert not result.within_bound(3.0)
    assert "exceeds" in caplog.text


def test_pass_flag_uses_two_sigma():
    # s = 1.0401, error 0.0201
    result = complementarity_statistic(Estimate(0.9, 0.01), Estimate(0.48, 0.01))
    assert result.passed == (result.s.value <= 1.0 + 2.0 * result.s.error)


def test_negative_estimates_rejected():
    with pytest.raises(ValueError):
        complementarity_statistic(Estimate(-0.1, 0.01), Estimate(0.5, 0.01))


def test_inverse_variance_mean():
    a = complementarity_statistic(Estimate(1.0, 0.05), Estimate(0.0, 0.0))
    b = complementarity_statistic(Estimate(np.sqrt(0.9), 0.05 / np.sqrt(0.9)), Estimate(0.0, 0.0))
    mean = mean_statistic([a, b])
    assert mean.value == pytest.approx(0.95)
    assert mean.error == pytest.approx(0.1 / np.sqrt(2))


def test_mean_needs_points():
    with pytest.raises(ValueError):
        mean_statistic([])
