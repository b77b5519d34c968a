import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from qo_analysis.aggregation import pool, select, sort_by_configuration
from qo_analysis.estimators import blocked_path_contrast, estimate_alpha
from qo_analysis.fringe_fit import fit_fringe_visibility
from qo_physics.errors import ConfigurationError, DelayedChoiceViolationError
from qo_physics.optics import (
    InterferometerConfig,
    detection_probabilities,
    theoretical_visibility,
    voltage_for_reflectivity,
)
from qo_physics.qrng import NoiseModel
from qo_physics.source import EmissionModel, gated_alpha
from qo_physics.timing import GeometryConfig
from qo_simulation.config import RunConfig, config_digest
from qo_simulation.engine import (
    CHUNK_SIZE,
    RECORD_COLUMNS,
    run_alpha_measurement,
    run_blocked_path,
    run_experiment,
    run_phase_scan,
)


def test_replay_is_deterministic(small_config):
    a = run_experiment(small_config)
    b = run_experiment(small_config)
    pd.testing.assert_frame_equal(a.records, b.records)
    assert a.config_digest == b.config_digest == config_digest(small_config)


def test_seed_changes_log(small_config):
    a = run_experiment(small_config)
    b = run_experiment(small_config.replace(seed=12))
    assert not a.records.equals(b.records)


def test_worker_count_does_not_change_log(small_config):
    cfg = small_config.replace(n_triggers=CHUNK_SIZE + 1000)
    single = run_experiment(cfg, workers=1)
    sharded = run_experiment(cfg, workers=2)
    pd.testing.assert_frame_equal(single.records, sharded.records)


def test_records_layout(small_config):
    log = run_experiment(small_config)
    assert list(log.records.columns) == RECORD_COLUMNS
    assert len(log) == small_config.n_triggers
    assert np.array_equal(log.records["trigger_index"], np.arange(small_config.n_triggers))


def test_clicks_never_exceed_photons_without_dark_counts(small_config):
    cfg = small_config.replace(emission=EmissionModel(p1=0.4, p2=0.2))
    df = run_experiment(cfg).records
    clicks = df["click_p1"].astype(int) + df["click_p2"].astype(int)
    assert (clicks <= df["photon_count_emitted"]).all()


def test_choice_bits_are_balanced(small_config):
    cfg = small_config.replace(n_triggers=100_000)
    bits = run_experiment(cfg).records["choice_bit"]
    assert abs(bits.mean() - 0.5) <= 4.0 * np.sqrt(0.25 / len(bits))


def test_choice_bit_sets_voltage(small_config):
    cfg = small_config.replace(optics=InterferometerConfig(v_eom=150.0))
    df = run_experiment(cfg).records
    assert (df.loc[df["choice_bit"] == 1, "applied_v_eom"] == 150.0).all()
    assert (df.loc[df["choice_bit"] == 0, "applied_v_eom"] == 0.0).all()


def test_fixed_choice_mode(small_config):
    cfg = small_config.replace(choice_mode="fixed", fixed_choice_bit=1)
    assert (run_experiment(cfg).records["choice_bit"] == 1).all()


def test_blocked_path_without_reflectivity_hits_aligned_detector(small_config):
    cfg = small_config.replace(choice_mode="fixed", fixed_choice_bit=0)
    df = run_blocked_path(cfg, "path2").records
    assert (df["blocked_path"] == 2).all()
    assert df["click_p1"].sum() > 0
    assert df["click_p2"].sum() == 0


def test_blocking_absorbs_half_the_photons(small_config):
    cfg = small_config.replace(n_triggers=40_000, emission=EmissionModel(p1=1.0))
    df = run_blocked_path(cfg, "path1").records
    detected = (df["click_p1"] | df["click_p2"]).mean()
    assert abs(detected - 0.5) <= 4.0 * np.sqrt(0.25 / len(df))


def test_unknown_blocked_path(small_config):
    with pytest.raises(ConfigurationError):
        run_blocked_path(small_config, "path3")


def test_phase_scan_spans(small_config):
    phases = [0.0, np.pi / 2, np.pi, 3 * np.pi / 2]
    df = run_phase_scan(small_config, phases, 700).records
    assert len(df) == 2800
    assert df.groupby("phase").size().tolist() == [700] * 4


def test_phase_schedule_must_cover_run():
    with pytest.raises(ValidationError):
        RunConfig(n_triggers=100, phase_schedule=((0.0, 60), (1.0, 30)))


def test_alpha_measurement_forces_zero_reflectivity(small_config):
    cfg = small_config.replace(optics=InterferometerConfig(v_eom=150.0))
    df = run_alpha_measurement(cfg).records
    assert (df["choice_bit"] == 0).all()
    assert (df["applied_v_eom"] == 0.0).all()
    assert (df["blocked_path"] == 0).all()


def test_late_choice_refused_in_delayed_mode(small_config):
    late = small_config.replace(geometry=GeometryConfig(choice_delay=200e-9))
    with pytest.raises(DelayedChoiceViolationError):
        run_experiment(late)

    waived = late.replace(delayed_choice=False)
    assert len(run_experiment(waived)) == small_config.n_triggers


def test_invalid_worker_count(small_config):
    with pytest.raises(ConfigurationError):
        run_experiment(small_config, workers=0)


def test_detector_frequencies_match_closed_form(small_config):
    optics = InterferometerConfig(v_eom=120.0, phase=0.8, xi=0.9)
    cfg = small_config.replace(
        n_triggers=200_000,
        emission=EmissionModel(p1=1.0),
        optics=optics,
        choice_mode="fixed",
        fixed_choice_bit=1,
    )
    df = run_experiment(cfg).records
    p = detection_probabilities(optics).p_d1
    freq = df["click_p1"].mean()
    assert abs(freq - p) <= 4.0 * np.sqrt(p * (1.0 - p) / len(df))
    # Exactly one photon per trigger, lossless
    assert (df["click_p1"] ^ df["click_p2"]).all()


def test_two_photon_only_source_matches_gated_alpha(small_config):
    cfg = small_config.replace(n_triggers=200_000, emission=EmissionModel(p1=0.0, p2=0.05))
    log = run_alpha_measurement(cfg)
    alpha = estimate_alpha(pool(sort_by_configuration(log).values()))

    expected = gated_alpha(cfg.emission)
    assert abs(alpha.value - expected) <= 3.0 * alpha.error


def _single_photons(cfg, r, **changes):
    """Lossless one-photon-per-trigger run with the EOM held on at reflectivity r."""
    return cfg.replace(
        emission=EmissionModel(p1=1.0),
        optics=InterferometerConfig(v_eom=voltage_for_reflectivity(r)),
        choice_mode="fixed",
        fixed_choice_bit=1,
        **changes,
    )


def test_balanced_splitter_bright_fringe_on_p1(small_config):
    df = run_experiment(_single_photons(small_config, 0.5, n_triggers=20_000)).records
    assert df["click_p1"].all()
    assert not df["click_p2"].any()


def test_blocked_path_contrast_at_calibrated_reflectivity(small_config):
    cfg = _single_photons(small_config, 0.43, n_triggers=200_000)
    log = run_blocked_path(cfg, "path2")
    contrast = blocked_path_contrast(pool(sort_by_configuration(log).values()))
    assert abs(contrast.value - 0.14) <= 4.0 * contrast.error


def test_low_reflectivity_fringe_trace(small_config):
    cfg = _single_photons(small_config, 0.05)
    phases = np.linspace(0.0, 2.0 * np.pi, 20, endpoint=False)
    per_point = 5000
    df = run_phase_scan(cfg, phases, per_point).records

    visibility = theoretical_visibility(0.05)
    for phase, group in df.groupby("phase"):
        p = 0.5 * (1.0 + visibility * np.cos(phase))
        n1 = group["click_p1"].sum()
        assert len(group) == per_point
        assert abs(n1 - p * per_point) <= 4.0 * np.sqrt(per_point * p * (1.0 - p))


def test_eom_off_subset_shows_no_fringe(small_config):
    cfg = small_config.replace(
        emission=EmissionModel(p1=1.0),
        optics=InterferometerConfig(v_eom=150.0),
    )
    phases = np.linspace(0.0, 2.0 * np.pi, 8, endpoint=False)
    summaries = sort_by_configuration(run_phase_scan(cfg, phases, 5000))

    off = select(summaries, choice_bit=0)
    fit = fit_fringe_visibility([(key[1], s) for key, s in sorted(off.items())])
    assert fit.visibility <= 4.0 * fit.visibility_error

    on = select(summaries, choice_bit=1)
    fit_on = fit_fringe_visibility([(key[1], s) for key, s in sorted(on.items())])
    assert fit_on.visibility > 0.8


def test_noise_seed_does_not_pin_choice_bits_across_runs(small_config):
    cfg = small_config.replace(qrng=NoiseModel(seed=3))
    a = run_experiment(cfg).records["choice_bit"]
    b = run_experiment(cfg.replace(seed=12)).records["choice_bit"]
    assert not a.equals(b)
