"""Tests for fields.py: region formulas, jump curve data and descriptors."""

import math

import numpy as np
import numpy.testing as npt
import pytest

from constants import FieldKind
from errors import AmbiguityError, DomainError
from fields import (
    ArcCurve,
    FieldDescriptor,
    GammaCurve,
    SegmentCurve,
    TransformedCurve,
    competitor_field,
    eval_field,
    jump_curves,
    one_d_transition,
    tile_field,
    tiling_field,
    viscosity_field,
)

PI_3 = math.pi / 3
S3 = math.sin(PI_3)
C3 = math.cos(PI_3)


def _interior_samples(field, count, seed):
    rng = np.random.default_rng(seed)
    xmin, xmax, ymin, ymax = field.bounds
    points = np.column_stack([rng.uniform(xmin, xmax, count), rng.uniform(ymin, ymax, count)])
    values, excluded = field.evaluate(points)
    return points[~excluded], values[~excluded]


ALL_FIELDS = [
    viscosity_field(PI_3),
    competitor_field(PI_3),
    one_d_transition(PI_3),
    tile_field(PI_3),
    tiling_field(PI_3, 3),
    competitor_field(0.2),
]


class TestViscosityField:
    def test_disk_sector_is_tangent(self):
        m0 = viscosity_field(PI_3)
        npt.assert_allclose(eval_field(m0, (0.0, 0.5)), (1.0, 0.0), atol=1e-15)
        npt.assert_allclose(eval_field(m0, (0.0, -0.5)), (-1.0, 0.0), atol=1e-15)
        npt.assert_allclose(eval_field(m0, (-0.5, 0.0)), (0.0, 1.0), atol=1e-15)

    def test_wedges_are_constant(self):
        m0 = viscosity_field(PI_3)
        npt.assert_allclose(eval_field(m0, (1.0, 0.2)), (S3, -C3))
        npt.assert_allclose(eval_field(m0, (1.0, -0.2)), (-S3, -C3))

    def test_ridge_is_ambiguous(self):
        with pytest.raises(AmbiguityError) as info:
            eval_field(viscosity_field(PI_3), (1.0, 0.0))
        assert info.value.curve_name == "[O,B]"

    def test_vortex_is_ambiguous(self):
        with pytest.raises(AmbiguityError) as info:
            eval_field(viscosity_field(PI_3), (0.0, 0.0))
        assert info.value.curve_name == "singular point"

    def test_outside(self):
        with pytest.raises(DomainError):
            eval_field(viscosity_field(PI_3), (3.0, 0.0))

    def test_single_jump_curve(self):
        curves = jump_curves(viscosity_field(PI_3))
        assert [curve.name for curve in curves] == ["[O,B]"]
        assert curves[0].constant_jump == pytest.approx(2.0 * S3)
        assert curves[0].length == pytest.approx(2.0)


class TestCompetitorField:
    def test_disk(self):
        m = competitor_field(PI_3)
        r = math.hypot(0.5, 0.1)
        npt.assert_allclose(eval_field(m, (0.5, 0.1)), (0.1 / r, -0.5 / r))

    def test_annulus_is_counter_tangent(self):
        m = competitor_field(PI_3)
        r = math.hypot(1.2, 0.1)
        npt.assert_allclose(eval_field(m, (1.2, 0.1)), (-0.1 / r, 1.2 / r))

    def test_shells(self):
        m = competitor_field(PI_3)
        npt.assert_allclose(eval_field(m, (1.8, 0.05)), (S3, -C3))
        npt.assert_allclose(eval_field(m, (1.8, -0.05)), (-S3, -C3))

    def test_agrees_with_viscosity_off_the_kite(self):
        x = (-0.3, 0.6)
        npt.assert_allclose(eval_field(competitor_field(PI_3), x), eval_field(viscosity_field(PI_3), x))

    def test_curves(self):
        names = [curve.name for curve in jump_curves(competitor_field(PI_3))]
        assert names == ["arc C_theta0", "gamma", "[I,B]"]

    def test_on_arc_is_ambiguous(self):
        with pytest.raises(AmbiguityError) as info:
            eval_field(competitor_field(PI_3), (math.cos(0.3), math.sin(0.3)))
        assert info.value.curve_name == "arc C_theta0"

    def test_on_gamma_is_ambiguous(self):
        point = GammaCurve(PI_3).point(0.4)[0]
        with pytest.raises(AmbiguityError) as info:
            eval_field(competitor_field(PI_3), point)
        assert info.value.curve_name == "gamma"


class TestOneDAndTiling:
    def test_one_d_values(self):
        m = one_d_transition(PI_3)
        npt.assert_allclose(eval_field(m, (0.5, 0.3)), (-S3, C3))
        npt.assert_allclose(eval_field(m, (0.5, -0.3)), (S3, C3))
        with pytest.raises(AmbiguityError):
            eval_field(m, (0.5, 0.0))

    def test_tile_matches_one_d_away_from_kite(self):
        tile = tile_field(PI_3)
        reference = one_d_transition(PI_3)
        for x in [(0.5, 0.9), (0.5, -0.9), (0.1, 0.5), (0.95, -0.2)]:
            npt.assert_allclose(eval_field(tile, x), eval_field(reference, x))

    def test_tile_core_is_negated_disk(self):
        x = np.array([0.2, 0.05])
        local = x / C3
        npt.assert_allclose(eval_field(tile_field(PI_3), x), -eval_field(competitor_field(PI_3), local))

    def test_tiling_curve_count(self):
        for n in [1, 2, 5]:
            field = tiling_field(PI_3, n)
            assert len(jump_curves(field)) == 3 * n
            assert len(field.singular_points) == n
        assert jump_curves(tiling_field(PI_3, 2))[3].name == "tile 1: arc C_theta0"

    def test_tiling_repeats_tile(self):
        tile, tiling = tile_field(PI_3), tiling_field(PI_3, 4)
        x = np.array([0.3, 0.04])
        # third column, i = 2
        npt.assert_allclose(eval_field(tiling, ((2.0 + x[0]) / 4.0, x[1] / 4.0)), eval_field(tile, x))

    def test_tiling_needs_positive_n(self):
        with pytest.raises(DomainError):
            tiling_field(PI_3, 0)

    def test_labels_outside_are_negative(self):
        labels = tiling_field(PI_3, 2).region_labels([[0.5, 2.0], [0.75, 0.9]])
        assert labels[0] == -1
        assert labels[1] == 1 * 4 + 2


class TestUnitNorm:
    @pytest.mark.parametrize("field", ALL_FIELDS, ids=lambda field: field.name)
    def test_values_are_unit(self, field):
        _, values = _interior_samples(field, 2000, seed=11)
        assert len(values) > 100
        npt.assert_allclose(np.linalg.norm(values, axis=1), 1.0, atol=1e-14)

    def test_evaluate_masks_outside(self):
        values, excluded = viscosity_field(PI_3).evaluate([[0.2, 0.3], [3.0, 0.0]])
        npt.assert_array_equal(excluded, [False, True])
        assert np.all(np.isnan(values[1]))


class TestJumpCurves:
    @pytest.mark.parametrize("field", ALL_FIELDS, ids=lambda field: field.name)
    def test_normal_components_agree(self, field):
        for curve in jump_curves(field):
            s = curve.parameters(301)
            nu = curve.normal(s)
            npt.assert_allclose(np.linalg.norm(nu, axis=1), 1.0)
            difference = np.einsum("ij,ij->i", curve.trace_plus(s) - curve.trace_minus(s), nu)
            npt.assert_allclose(difference, 0.0, atol=1e-14)

    def test_gamma_jump_size(self):
        gamma = GammaCurve(PI_3)
        s = np.linspace(-PI_3, PI_3, 41)
        npt.assert_allclose(gamma.jump_size(s), np.linalg.norm(gamma.trace_plus(s) - gamma.trace_minus(s), axis=1))
        npt.assert_allclose(gamma.jump_size([0.0, PI_3]), [2.0 * math.cos(PI_3 / 2), 2.0])

    def test_gamma_distance_vanishes_on_curve(self):
        gamma = GammaCurve(0.8)
        points = gamma.point(np.linspace(-0.79, 0.79, 25))
        npt.assert_allclose(gamma.distance(points), 0.0, atol=1e-14)
        assert gamma.distance(np.array([[0.2, 0.0]]))[0] > 0.5

    def test_arc_data(self):
        arc = ArcCurve(0.5)
        assert arc.length == pytest.approx(1.0)
        npt.assert_allclose(arc.distance(np.array([[1.2, 0.0], [0.0, 1.0]])), [0.2, math.hypot(math.cos(0.5), 1 - math.sin(0.5))])

    def test_segment_data(self):
        segment = SegmentCurve("s", (0.0, 0.0), (2.0, 0.0), (0.0, 1.0), (0.0, 1.0), (1.0, 0.0))
        assert segment.constant_jump == pytest.approx(math.sqrt(2.0))
        npt.assert_allclose(segment.point([0.5]), [[1.0, 0.0]])

    def test_transformed_curve(self):
        base = ArcCurve(0.5)
        moved = TransformedCurve(base, scale=0.5, offset=(1.0, 0.0), negate=True, name="moved")
        assert moved.length == pytest.approx(0.5 * base.length)
        npt.assert_allclose(moved.point([0.0]), [[1.5, 0.0]])
        npt.assert_allclose(moved.trace_plus([0.1]), -base.trace_plus([0.1]))
        assert moved.distance(np.array([[1.6, 0.0]]))[0] == pytest.approx(0.1)
        with pytest.raises(DomainError):
            TransformedCurve(base, scale=0.0)


class TestFieldDescriptor:
    def test_text_form(self):
        descriptor = FieldDescriptor(FieldKind.TILING, 0.05, 4)
        assert descriptor.dumps() == "kind = tiling\ntheta0 = 0.05\nn = 4\n"
        assert FieldDescriptor.loads(descriptor.dumps()) == descriptor

    def test_field_round_trip(self):
        field = tiling_field(0.3, 3)
        rebuilt = FieldDescriptor.loads(field.descriptor().dumps()).build()
        assert rebuilt.kind is FieldKind.TILING
        assert rebuilt.tiles == 3
        assert rebuilt.theta0 == 0.3

    @pytest.mark.parametrize(
        "text",
        [
            "kind = tiling\ntheta0 = 0.3\n",
            "kind = spiral\ntheta0 = 0.3\n",
            "theta0 = 0.3\n",
            "kind = viscosity\ntheta0 = 2.0\n",
            "kind = viscosity\ntheta0 = 0.3\ncolor = red\n",
            "kind = tiling\ntheta0 = 0.3\nn = four\n",
        ],
    )
    def test_rejects(self, text):
        with pytest.raises(DomainError):
            FieldDescriptor.loads(text)
