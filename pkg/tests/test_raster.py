"""
Tests for raster.py. The oracles only evaluate fields and parametrize curves,
so they are checked here against closed forms from energy.py and against
fields that are deliberately not divergence-free.
"""

import math

import numpy as np
import numpy.testing as npt
import pytest

from constants import CertificateStatus, FieldKind
from costfn import JumpCost
from energy import energy_competitor_closed, energy_viscosity_closed, line_energy
from errors import DomainError, RepositionError
from fields import (
    UNIT_STRIP,
    PiecewiseField,
    Region,
    competitor_field,
    one_d_transition,
    tile_field,
    tiling_field,
    viscosity_field,
)
from raster import (
    Certificate,
    boundary_tangency,
    certify_field,
    flux_check,
    l1_distance,
    numeric_line_energy,
    random_rectangles,
    rectangle_fluxes,
    sample_field,
    trace_compatibility,
    trace_mismatch,
)

PI_3 = math.pi / 3


def _bent_field() -> PiecewiseField:
    """(1, x1) / |(1, x1)|: unit but with divergence -x1 / (1 + x1^2)^(3/2)."""

    def value(points):
        raw = np.column_stack([np.ones(len(points)), points[:, 0]])
        return raw / np.linalg.norm(raw, axis=1)[:, None]

    region = Region("bent", lambda points: np.ones(len(points), dtype=bool), value)
    return PiecewiseField(FieldKind.ONE_D, 0.5, UNIT_STRIP, [region], [])


CERTIFIED_FIELDS = [
    viscosity_field(PI_3),
    competitor_field(PI_3),
    one_d_transition(PI_3),
    tiling_field(PI_3, 2),
    competitor_field(0.3),
]


class TestSampling:
    def test_one_d_has_no_masked_cells(self):
        raster = sample_field(one_d_transition(PI_3), nx=8, ny=8)
        assert raster.samples.shape == (8, 8, 2)
        assert raster.mask_fraction == 0.0
        assert raster.unit_norm_deviation() <= 1e-15

    def test_cells_outside_domain_are_masked(self):
        raster = sample_field(viscosity_field(PI_3), nx=64, ny=64)
        assert 0.0 < raster.mask_fraction < 0.5
        assert np.all(np.isnan(raster.samples[raster.mask]))
        assert raster.unit_norm_deviation() <= 1e-12

    def test_cell_area(self):
        raster = sample_field(one_d_transition(0.4), nx=4, ny=8)
        assert raster.cell_area == pytest.approx(2.0 / 32)

    def test_to_csv(self, tmp_path):
        out = tmp_path / "raster.csv"
        sample_field(competitor_field(PI_3), nx=6, ny=5).to_csv(out)
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "x,y,mx,my,mask"
        assert len(lines) == 1 + 30
        assert lines[1].endswith(",1")  # (-0.75, -0.8) lies outside the domain

    def test_resolution(self):
        with pytest.raises(DomainError):
            sample_field(one_d_transition(0.4), nx=1, ny=8)


class TestL1Distance:
    def test_same_field(self):
        value, error = l1_distance(one_d_transition(0.4), one_d_transition(0.4), nx=16, ny=16)
        assert value == 0.0
        assert error == 0.0

    def test_tile_is_one_d_above_the_kite(self):
        value, _ = l1_distance(one_d_transition(0.4), tile_field(0.4), bounds=(0.0, 1.0, 0.5, 1.0), nx=8, ny=8)
        assert value == pytest.approx(0.0, abs=1e-15)

    def test_tiling_shrinks(self):
        reference = one_d_transition(PI_3)
        d2, _ = l1_distance(tiling_field(PI_3, 2), reference, bounds=(0.0, 1.0, -0.25, 0.25), nx=64, ny=32)
        d4, _ = l1_distance(tiling_field(PI_3, 4), reference, bounds=(0.0, 1.0, -0.125, 0.125), nx=128, ny=32)
        assert d2 / d4 == pytest.approx(2.0, rel=0.05)

    def test_exclusion_band_is_reported(self):
        value, error = l1_distance(
            tiling_field(PI_3, 2), one_d_transition(PI_3), bounds=(0.0, 1.0, -0.25, 0.25), nx=64, ny=32, exclusion_band=0.01
        )
        assert error > 0
        assert value >= 0


class TestFlux:
    def test_vortex_rectangle(self):
        flux = rectangle_fluxes(competitor_field(PI_3), [(-0.2, -0.2, 0.2, 0.2)])
        assert abs(flux[0]) < 1e-8

    def test_wall_crossing(self):
        assert flux_check(one_d_transition(PI_3), [(0.2, -0.3, 0.7, 0.4)]) < 1e-12

    def test_detects_divergence(self):
        flux = rectangle_fluxes(_bent_field(), [(0.2, 0.0, 0.7, 0.5)])
        # divergence theorem: integral of -x/(1+x^2)^1.5 over the rectangle
        exact = 0.5 * (1.0 / math.sqrt(1.0 + 0.7**2) - 1.0 / math.sqrt(1.0 + 0.2**2))
        assert flux[0] == pytest.approx(exact, rel=1e-10)
        assert flux_check(_bent_field(), [(0.2, 0.0, 0.7, 0.5)]) > 1e-2

    @pytest.mark.parametrize("field", CERTIFIED_FIELDS, ids=lambda field: field.name)
    def test_random_rectangles(self, field):
        rectangles = random_rectangles(field, 60, seed=7)
        assert flux_check(field, rectangles) < 1e-7

    def test_edge_along_curve(self):
        with pytest.raises(RepositionError) as info:
            flux_check(one_d_transition(PI_3), [(0.2, 0.0, 0.6, 0.3)])
        assert info.value.curve_name == "{x2=0}"

    def test_rectangle_outside(self):
        with pytest.raises(DomainError):
            flux_check(one_d_transition(PI_3), [(0.5, 0.5, 1.5, 0.9)])

    def test_no_rectangles(self):
        assert flux_check(one_d_transition(PI_3), []) == 0.0


class TestRandomRectangles:
    def test_seeded(self):
        field = competitor_field(PI_3)
        npt.assert_array_equal(random_rectangles(field, 20, seed=3), random_rectangles(field, 20, seed=3))
        assert not np.array_equal(random_rectangles(field, 20, seed=3), random_rectangles(field, 20, seed=4))

    def test_inside_and_clear_of_vortex(self):
        field = viscosity_field(PI_3)
        rectangles = random_rectangles(field, 200, seed=1)
        assert rectangles.shape == (200, 4)
        x0, y0, x1, y1 = rectangles.T
        assert np.all(x1 - x0 >= 0.02)
        assert np.all(y1 - y0 >= 0.02)
        for corner in [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]:
            assert np.all(field.domain.contains_many(np.column_stack(corner), tol=0.0))
        # distance from O to the rectangle outline
        zeros = np.zeros_like(x0)
        inside = (x0 < 0) & (x1 > 0) & (y0 < 0) & (y1 > 0)
        inner_gap = np.minimum.reduce([-x0, x1, -y0, y1])
        outer_gap = np.hypot(np.maximum.reduce([x0, -x1, zeros]), np.maximum.reduce([y0, -y1, zeros]))
        assert np.all(np.where(inside, inner_gap, outer_gap) >= 0.05)


class TestTraces:
    @pytest.mark.parametrize("field", CERTIFIED_FIELDS, ids=lambda field: field.name)
    def test_compatibility(self, field):
        assert trace_compatibility(field, samples=400) <= 1e-12

    @pytest.mark.parametrize("field", CERTIFIED_FIELDS, ids=lambda field: field.name)
    def test_declared_traces_match_neighbours(self, field):
        assert trace_mismatch(field, samples=300) <= 1e-5

    @pytest.mark.parametrize("field", [viscosity_field(PI_3), competitor_field(PI_3), competitor_field(1.4)], ids=lambda field: field.name)
    def test_boundary_tangency(self, field):
        assert boundary_tangency(field, samples=600) <= 1e-12

    def test_tangency_needs_omega(self):
        with pytest.raises(DomainError):
            boundary_tangency(one_d_transition(PI_3))


class TestNumericLineEnergy:
    @pytest.mark.parametrize("p", [1.0, 3.0])
    def test_viscosity(self, p):
        f = JumpCost.power(p)
        estimate = numeric_line_energy(viscosity_field(PI_3), f, n_segments=2000)
        assert estimate.total == pytest.approx(energy_viscosity_closed(f, PI_3), rel=1e-3)

    @pytest.mark.parametrize("p", [1.0, 3.0])
    def test_competitor(self, p):
        f = JumpCost.power(p)
        estimate = numeric_line_energy(competitor_field(PI_3), f, n_segments=2000)
        assert estimate.total == pytest.approx(energy_competitor_closed(f, PI_3).total, rel=1e-3)
        assert estimate.unreliable_segments <= 0.01 * 3 * 2000

    def test_converges_at_least_linearly(self):
        f = JumpCost.power(1.0)
        field = competitor_field(PI_3)
        exact = energy_competitor_closed(f, PI_3).total
        errors = [abs(numeric_line_energy(field, f, n_segments=n).total - exact) for n in (40, 80, 160)]
        assert errors[0] > errors[1] > errors[2]
        assert errors[0] / errors[2] >= 4.0

    def test_tiling(self):
        f = JumpCost.power(0.5)
        field = tiling_field(0.4, 2)
        estimate = numeric_line_energy(field, f, n_segments=1000)
        assert estimate.total == pytest.approx(line_energy(field, f).total, rel=1e-3)
        assert [name for name, _ in estimate.per_curve] == [curve.name for curve in field.jump_curves]

    def test_bad_arguments(self):
        with pytest.raises(DomainError):
            numeric_line_energy(viscosity_field(PI_3), JumpCost.power(1.0), n_segments=4)
        with pytest.raises(DomainError):
            numeric_line_energy(viscosity_field(PI_3), JumpCost.power(1.0), side_offset=0.0)


class TestCertificates:
    def test_certificate_row(self):
        passed = Certificate("f", "flux", 1e-9, 1e-7)
        failed = Certificate("f", "flux", 1e-3, 1e-7)
        assert passed.status is CertificateStatus.PASSED
        assert failed.status is CertificateStatus.FAILED
        assert passed.csv_row() == ["f", "flux", 1e-9, 1e-7, "true"]
        assert failed.csv_row()[-1] == "false"

    def test_competitor_passes(self):
        certificates, raster = certify_field(competitor_field(PI_3), grid=32, rectangle_count=100, seed=0)
        assert [c.certificate for c in certificates] == [
            "unit_norm",
            "flux",
            "trace_compatibility",
            "trace_mismatch",
            "boundary_tangency",
        ]
        assert all(c.passed for c in certificates), [c for c in certificates if not c.passed]
        assert raster.nx == raster.ny == 32

    def test_one_d_has_no_tangency_certificate(self):
        certificates, _ = certify_field(one_d_transition(PI_3), grid=16, rectangle_count=20)
        assert len(certificates) == 4
        assert all(c.passed for c in certificates)

    def test_bent_field_fails_flux(self):
        certificates, _ = certify_field(_bent_field(), grid=16, rectangle_count=20)
        by_name = {c.certificate: c for c in certificates}
        assert by_name["unit_norm"].passed
        assert not by_name["flux"].passed
