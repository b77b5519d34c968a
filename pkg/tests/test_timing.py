import pytest

from qo_physics.errors import GeometryInconsistencyError
from qo_physics.timing import (
    GeometryConfig,
    IntervalClass,
    SpacetimeEvent,
    classify_interval,
    reference_geometry_consistent,
    verify_delayed_choice_geometry,
)

ORIGIN = SpacetimeEvent(t=0.0, x=0.0, label="entry")


def test_simultaneous_distant_events_are_spacelike():
    choice = SpacetimeEvent(t=0.0, x=48.0)
    assert classify_interval(ORIGIN, choice) is IntervalClass.SPACELIKE


def test_colocated_events_are_timelike():
    later = SpacetimeEvent(t=238e-9, x=0.0)
    assert classify_interval(ORIGIN, later) is IntervalClass.TIMELIKE


def test_light_cone_band_is_lightlike():
    edge = SpacetimeEvent(t=160.1e-9, x=48.0)
    assert classify_interval(ORIGIN, edge, tolerance=0.5e-9) is IntervalClass.LIGHTLIKE


def test_interval_is_symmetric():
    b = SpacetimeEvent(t=50e-9, x=30.0)
    assert classify_interval(ORIGIN, b) is classify_interval(b, ORIGIN)


def test_negative_tolerance_rejected():
    with pytest.raises(ValueError):
        classify_interval(ORIGIN, ORIGIN, tolerance=-1.0)


def test_non_finite_event_rejected():
    with pytest.raises(ValueError):
        SpacetimeEvent(t=float("nan"), x=0.0)


def test_default_geometry_is_spacelike_with_flight_time_margin():
    report = verify_delayed_choice_geometry(GeometryConfig())
    assert report.passed
    assert report.separation is IntervalClass.SPACELIKE
    assert report.margin_ns == pytest.approx(160.0, abs=1.0)
    assert report.choice_precedes_arrival


def test_late_choice_is_timelike():
    report = verify_delayed_choice_geometry(GeometryConfig(choice_delay=200e-9))
    assert report.separation is IntervalClass.TIMELIKE
    assert not report.passed
    assert report.margin_ns < 0
    assert not report.choice_precedes_arrival


def test_inconsistent_flight_time():
    with pytest.raises(GeometryInconsistencyError):
        verify_delayed_choice_geometry(GeometryConfig(flight_time=200e-9))


def test_reference_geometry():
    assert reference_geometry_consistent()


@pytest.mark.parametrize("t, x", [(0.0, 48.0), (238e-9, 0.0), (160.1e-9, 48.0), (50e-9, 30.0)])
@pytest.mark.parametrize("scale", [0.5, 3.0, 1e3])
def test_classification_survives_uniform_scaling(t, x, scale):
    tolerance = 0.5e-9
    original = classify_interval(ORIGIN, SpacetimeEvent(t=t, x=x), tolerance)
    scaled = classify_interval(ORIGIN, SpacetimeEvent(t=scale * t, x=scale * x),
                               scale * tolerance)
    assert scaled is original


def test_choice_at_photon_entry_fails():
    report = verify_delayed_choice_geometry(GeometryConfig(choice_position=0.0))
    assert report.separation is IntervalClass.LIGHTLIKE
    assert not report.passed
    assert report.margin_ns == 0.0
