import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from echoagent.errors import DomainError, VolumeError
from echoagent.quant.synth import (
    cylinder_pair,
    cylinder_volume_ml,
    rect_mask,
    rescale_spacing,
    rotate90,
    spheroid_pair,
    spheroid_volume_ml,
    translate,
)
from echoagent.quant.types import ANOMALOUS
from echoagent.quant.volume import biplane_volume, ejection_fraction


def test_cylinder_volume_within_two_percent():
    a2c, a4c = cylinder_pair(width_px=20, height_px=60, spacing_mm=1.0)
    expected = cylinder_volume_ml(20.0, 60.0)  # 18.85 mL
    value = biplane_volume(a2c, a4c, 1, 20).value
    assert value == pytest.approx(expected, rel=0.02)


def test_spheroid_volume_within_two_percent():
    a2c, a4c = spheroid_pair(length_mm=80, radius_mm=25, spacing_mm=0.5, size=256)
    expected = spheroid_volume_ml(80, 25)  # 104.72 mL
    value = biplane_volume(a2c, a4c, 1, 20).value
    assert value == pytest.approx(expected, rel=0.02)


def test_convergence_error_non_increasing_in_disk_count():
    a2c, a4c = spheroid_pair()
    expected = spheroid_volume_ml(80, 25)
    errors = []
    for n in (5, 10, 20, 40):
        value = biplane_volume(a2c, a4c, 1, n).value
        errors.append(abs(value - expected) / expected)
    for previous, current in zip(errors, errors[1:]):
        assert current <= previous + 0.002  # pixelization slack per step
    assert errors[-1] < 0.02


def test_halving_one_view_halves_the_volume():
    full_a2c = rect_mask(128, width_px=20, height_px=60)
    full_a4c = rect_mask(128, width_px=20, height_px=60)
    half_a4c = rect_mask(128, width_px=10, height_px=60)
    symmetric = biplane_volume(full_a2c, full_a4c, 1, 20).value
    halved = biplane_volume(full_a2c, half_a4c, 1, 20).value
    assert halved == pytest.approx(symmetric / 2.0, rel=1e-12)


def test_empty_view_names_the_view():
    a2c, a4c = cylinder_pair()
    empty = rect_mask(128, width_px=0, height_px=0)
    with pytest.raises(VolumeError, match="a4c"):
        biplane_volume(a2c, empty, 1, 20)
    with pytest.raises(VolumeError, match="a2c"):
        biplane_volume(empty, a4c, 1, 20)


def test_translation_changes_volume_by_under_two_percent():
    a2c, a4c = spheroid_pair()
    moved = translate(a2c, 7, -5)
    baseline = biplane_volume(a2c, a4c, 1, 20).value
    shifted = biplane_volume(moved, a4c, 1, 20).value
    assert abs(shifted - baseline) / baseline < 0.02


def test_rotation_by_ninety_degrees_changes_volume_by_under_two_percent():
    a2c, a4c = spheroid_pair()
    baseline = biplane_volume(a2c, a4c, 1, 20).value
    rotated = biplane_volume(rotate90(a2c), a4c, 1, 20).value
    assert abs(rotated - baseline) / baseline < 0.02


def test_doubling_spacing_scales_volume_by_exactly_eight():
    a2c, a4c = spheroid_pair(size=256)
    baseline = biplane_volume(a2c, a4c, 1, 20).value
    doubled = biplane_volume(
        rescale_spacing(a2c, 2.0), rescale_spacing(a4c, 2.0), 1, 20
    ).value
    assert doubled == pytest.approx(8.0 * baseline, rel=1e-9)


def test_ef_definitional_values():
    assert ejection_fraction(100.0, 50.0).value == pytest.approx(50.0)
    assert ejection_fraction(120.0, 120.0).value == pytest.approx(0.0)
    assert ejection_fraction(120.0, 79.8).value == pytest.approx(33.5)


def test_ef_domain_errors():
    with pytest.raises(DomainError):
        ejection_fraction(0.0, 10.0)
    with pytest.raises(DomainError):
        ejection_fraction(-5.0, 1.0)
    with pytest.raises(DomainError):
        ejection_fraction(float("nan"), 1.0)


def test_esv_above_edv_is_flagged_anomalous_not_an_error():
    result = ejection_fraction(80.0, 100.0)
    assert result.value < 0
    assert ANOMALOUS in result.flags
    assert result.anomalous


def test_extreme_anomaly_clamps_at_minus_hundred():
    result = ejection_fraction(10.0, 1000.0)
    assert result.value == -100.0
    assert result.anomalous


@settings(max_examples=300, deadline=None)
@given(
    edv=st.floats(min_value=1e-3, max_value=1e6),
    esv_fraction=st.floats(min_value=0.0, max_value=1.0),
    scale=st.floats(min_value=1e-6, max_value=1e6),
)
def test_ef_is_scale_invariant(edv, esv_fraction, scale):
    esv = edv * esv_fraction
    base = ejection_fraction(edv, esv).value
    scaled = ejection_fraction(edv * scale, esv * scale).value
    assert math.isclose(base, scaled, rel_tol=1e-12, abs_tol=1e-12)
