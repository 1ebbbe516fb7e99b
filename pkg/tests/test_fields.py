import numpy as np
import pytest

import twospeed as ts
from twospeed.errors import DomainError, InvalidCrossSectionError


def test_constant_evaluation():
    assert ts.evaluate(ts.FieldSpec.constant(1.0), 0.3) == 1.0


def test_affine_evaluation():
    assert ts.evaluate(ts.FieldSpec.affine(-1.0, 2.0), 0.5) == 0.0


def test_trigonometric_evaluation():
    spec = ts.FieldSpec.trigonometric(-1.0, 0.5, 0.0)
    assert ts.evaluate(spec, 0.25) == pytest.approx(-0.5, abs=1e-15)


def test_vectorized_evaluation_matches_scalar():
    spec = ts.FieldSpec.trigonometric(0.3, -0.2, 0.7)
    xs = np.linspace(0.0, 1.0, 11)
    vec = ts.evaluate(spec, xs)
    assert vec.shape == xs.shape
    for x, v in zip(xs, vec):
        assert ts.evaluate(spec, float(x)) == v


def test_evaluation_is_deterministic():
    spec = ts.FieldSpec.tabulated([0.0, 0.3, 1.0], [1.0, 2.0, 0.5])
    xs = np.linspace(0.0, 1.0, 101)
    a = ts.evaluate(spec, xs)
    b = ts.evaluate(spec, xs)
    assert np.array_equal(a, b)


def test_domain_error_outside_interval():
    spec = ts.FieldSpec.constant(1.0)
    with pytest.raises(DomainError):
        ts.evaluate(spec, 1.5)
    with pytest.raises(DomainError):
        ts.evaluate(spec, np.array([0.2, -0.1]))


def test_tabulated_reproduces_samples_exactly():
    xs = [0.0, 0.2, 0.55, 0.8, 1.0]
    vs = [1.0, 1.5, 0.7, 0.9, 1.1]
    spec = ts.FieldSpec.tabulated(xs, vs)
    for x, v in zip(xs, vs):
        assert ts.evaluate(spec, x) == pytest.approx(v, abs=1e-15)


def test_tabulated_no_overshoot_on_monotone_data():
    # Shape-preserving cubics must not leave the sample range, so
    # single-signed tables never acquire interpolation zeros.
    spec = ts.FieldSpec.tabulated([0.0, 0.1, 0.5, 1.0], [0.5, 0.6, 3.0, 3.1])
    dense = ts.evaluate(spec, np.linspace(0.0, 1.0, 2001))
    assert dense.min() >= 0.5 - 1e-12
    assert dense.max() <= 3.1 + 1e-12


def test_tabulated_validation():
    with pytest.raises(ValueError):
        ts.FieldSpec.tabulated([0.0, 0.5, 0.5, 1.0], [1, 1, 1, 1])
    with pytest.raises(ValueError):
        ts.FieldSpec.tabulated([0.1, 1.0], [1, 1])


def test_defining_parameters_reproduced():
    assert ts.evaluate(ts.FieldSpec.constant(2.5), 0.77) == 2.5
    aff = ts.FieldSpec.affine(1.0, 3.0)
    assert ts.evaluate(aff, 0.0) == 1.0
    assert ts.evaluate(aff, 1.0) == 4.0
    trig = ts.FieldSpec.trigonometric(2.0, 0.3, -0.4)
    assert ts.evaluate(trig, 0.0) == pytest.approx(1.6, abs=1e-15)


def test_validate_goldstein_taylor_passes(gt_fields):
    b1, b2, _ = gt_fields
    rep = ts.validate_transport_fields(b1, b2)
    assert rep.passed
    assert rep.min_abs_value == pytest.approx(1.0)
    assert abs(ts.evaluate(b1, rep.witness_x) - ts.evaluate(b2, rep.witness_x)) == pytest.approx(2.0)


def test_validate_identical_fields_fails():
    b = ts.FieldSpec.constant(1.0)
    rep = ts.validate_transport_fields(b, b)
    assert not rep.passed
    assert "indistinguishable" in rep.detail


@pytest.mark.parametrize(
    "b",
    [
        ts.FieldSpec.constant(0.7),
        ts.FieldSpec.affine(0.5, 0.25),
        ts.FieldSpec.trigonometric(2.0, 0.3, 0.1),
        ts.FieldSpec.tabulated([0.0, 0.4, 1.0], [1.0, 2.0, 1.5]),
    ],
)
def test_validate_fails_for_any_field_against_itself(b):
    assert not ts.validate_transport_fields(b, b).passed


def test_validate_sign_change_is_degenerate():
    rep = ts.validate_transport_fields(ts.FieldSpec.affine(-0.5, 1.0), ts.FieldSpec.constant(1.0))
    assert not rep.passed
    assert "degenerate" in rep.detail
    assert rep.min_abs_value < 1e-3
    assert rep.sign == 0


def test_failure_persists_under_grid_refinement():
    # The affine field vanishes exactly at x = 0.5, which is a grid
    # point of every refinement that contains the coarse grid.
    b1 = ts.FieldSpec.affine(-0.5, 1.0)
    b2 = ts.FieldSpec.constant(1.0)
    for samples in (9, 17, 33, 4097):
        assert not ts.validate_transport_fields(b1, b2, samples=samples).passed


def test_cross_section_everywhere_simultaneous(gt_fields):
    rep = ts.validate_cross_section_overlap(*gt_fields)
    assert rep.passed


def test_cross_section_zero_fails(gt_fields):
    b1, b2, _ = gt_fields
    rep = ts.validate_cross_section_overlap(b1, b2, ts.FieldSpec.constant(0.0))
    assert not rep.passed
    assert "simultaneously" in rep.detail


def test_cross_section_negative_raises(gt_fields):
    b1, b2, _ = gt_fields
    with pytest.raises(InvalidCrossSectionError):
        ts.validate_cross_section_overlap(b1, b2, ts.FieldSpec.constant(-0.5))


def test_disjoint_witnesses_fail():
    # b1 - b2 is supported on [0, 1/2) while sigma vanishes there and
    # only switches on in (1/2, 1]: each condition holds somewhere, but
    # never at a common point, so the overlap check must fail.
    b1 = ts.FieldSpec.constant(1.0)
    b2 = ts.FieldSpec.tabulated([0.0, 0.2, 0.45, 0.5, 1.0], [1.5, 1.4, 1.05, 1.0, 1.0])
    sigma = ts.FieldSpec.tabulated([0.0, 0.5, 0.55, 1.0], [0.0, 0.0, 1.0, 1.0])
    assert ts.validate_transport_fields(b1, b2).passed
    rep = ts.validate_cross_section_overlap(b1, b2, sigma)
    assert not rep.passed
    assert "simultaneously" in rep.detail
