"""Tests for energy.py: quadrature, closed forms, and the gap."""

import math

import numpy as np
import pytest

from constants import ENERGY_CSV_HEADER, Verdict
from costfn import JumpCost
from energy import (
    curve_energy,
    energy_competitor_closed,
    energy_gap,
    energy_viscosity_closed,
    integrate,
    line_energy,
    summarize_gap,
    sup_bound_chain,
)
from errors import (
    DomainError,
    IndeterminateGapError,
    QuadratureAccuracyError,
    QuadratureEvaluationError,
)
from fields import GammaCurve, competitor_field, one_d_transition, tile_field, tiling_field, viscosity_field

PI_3 = math.pi / 3
CUBE = JumpCost.power(3.0)
ROOT = JumpCost.power(0.5)


class TestIntegrate:
    def test_cosine(self):
        value, error = integrate(np.cos, 0.0, math.pi / 2)
        assert value == pytest.approx(1.0, abs=1e-12)
        assert error < 1e-10

    def test_secant_squared(self):
        value, _ = integrate(lambda a: 2.0 / np.cos(a / 2.0) ** 2, 0.0, 1.0)
        assert value == pytest.approx(4.0 * math.tan(0.5), abs=1e-12)
        assert value == pytest.approx(2.18504, abs=1e-5)

    def test_scalar_only_integrand(self):
        value, _ = integrate(math.exp, 0.0, 1.0)
        assert value == pytest.approx(math.e - 1.0, abs=1e-12)

    def test_integrable_endpoint_singularity(self):
        value, _ = integrate(np.sqrt, 0.0, 1.0, tol=1e-10)
        assert value == pytest.approx(2.0 / 3.0, abs=1e-9)

    def test_empty_interval(self):
        assert integrate(np.cos, 0.3, 0.3) == (0.0, 0.0)

    def test_bad_arguments(self):
        with pytest.raises(DomainError):
            integrate(np.cos, 0.0, 1.0, tol=0.0)
        with pytest.raises(DomainError):
            integrate(np.cos, 1.0, 0.0)

    def test_non_finite_sample(self):
        with pytest.raises(QuadratureEvaluationError) as info:
            integrate(lambda x: np.where(x > 0.5, np.inf, 1.0), 0.0, 1.0)
        assert info.value.abscissa > 0.5
        assert math.isinf(info.value.value)

    def test_depth_exhausted(self):
        with pytest.raises(QuadratureAccuracyError) as info:
            integrate(lambda x: np.sign(x - 0.3), 0.0, 1.0, tol=1e-14, max_depth=3)
        assert info.value.tol == 1e-14


class TestClosedForms:
    def test_viscosity_cube(self):
        assert energy_viscosity_closed(CUBE, PI_3) == pytest.approx(6.0 * math.sqrt(3.0), rel=1e-13)

    def test_competitor_cube_components(self):
        breakdown = energy_competitor_closed(CUBE, PI_3)
        assert breakdown.components["I1"] == pytest.approx(16.0 * math.pi / 3.0, rel=1e-12)
        assert breakdown.components["I2"] == pytest.approx(16.0 * math.pi / 3.0, rel=1e-12)
        assert breakdown.components["I3"] == pytest.approx(2.0 * math.sqrt(3.0), rel=1e-12)
        assert breakdown.total == pytest.approx(36.9744, abs=1e-4)
        assert breakdown.energy_of("gamma") == breakdown.components["I1"]

    def test_components_are_non_negative(self):
        for theta0 in [0.01, 0.4, 1.2]:
            breakdown = energy_competitor_closed(ROOT, theta0)
            assert all(value >= 0 for value in breakdown.components.values())

    def test_gap_cube(self):
        expected = 32.0 * PI_3 - 8.0 * math.sin(PI_3) ** 3 / math.cos(PI_3 / 2) ** 2
        assert energy_gap(CUBE, PI_3) == pytest.approx(expected, rel=1e-12)
        assert energy_gap(CUBE, PI_3) == pytest.approx(26.582, abs=1e-3)

    def test_gap_is_difference_of_energies(self):
        for theta0 in [0.05, 0.5, 1.4]:
            difference = energy_competitor_closed(ROOT, theta0).total - energy_viscosity_closed(ROOT, theta0)
            assert energy_gap(ROOT, theta0) == pytest.approx(difference, rel=1e-9, abs=1e-12)

    def test_gap_sign_square_root(self):
        assert energy_gap(ROOT, 0.01) < 0
        assert energy_gap(ROOT, 0.01) == pytest.approx(5.657 * 0.01 - math.sqrt(0.02), abs=5e-3)
        assert energy_gap(ROOT, 1.0) > 0

    def test_zero_cost(self):
        summary = summarize_gap(JumpCost.zero(), 0.7)
        assert summary.gap == 0.0
        assert summary.E_competitor == 0.0
        assert summary.verdict is Verdict.VISCOSITY_WINS

    def test_infinite_cost_at_two(self):
        f = JumpCost.table([(0.0, 0.0), (1.0, 0.0), (2.0, math.inf)])
        assert math.isinf(energy_competitor_closed(f, 0.2).total)
        assert math.isinf(energy_gap(f, 0.2))

    def test_indeterminate_gap(self):
        f = JumpCost.table([(0.0, 0.0), (1.0, math.inf), (2.0, math.inf)])
        with pytest.raises(IndeterminateGapError):
            energy_gap(f, PI_3)

    def test_bad_angle(self):
        with pytest.raises(DomainError):
            energy_gap(CUBE, 0.0)


class TestLineEnergy:
    @pytest.mark.parametrize("f", [CUBE, ROOT, JumpCost.power(1.0)], ids=lambda f: f.label)
    def test_competitor_matches_closed_form(self, f):
        breakdown = line_energy(competitor_field(PI_3), f)
        closed = energy_competitor_closed(f, PI_3)
        assert breakdown.total == pytest.approx(closed.total, rel=1e-9)
        assert breakdown.energy_of("gamma") == pytest.approx(closed.components["I1"], rel=1e-9)
        assert breakdown.energy_of("arc C_theta0") == pytest.approx(closed.components["I2"], rel=1e-12)
        assert breakdown.energy_of("[I,B]") == pytest.approx(closed.components["I3"], rel=1e-12)

    def test_viscosity_matches_closed_form(self):
        assert line_energy(viscosity_field(PI_3), CUBE).total == pytest.approx(6.0 * math.sqrt(3.0), rel=1e-13)

    def test_one_d(self):
        assert line_energy(one_d_transition(0.4), ROOT).total == pytest.approx(math.sqrt(2.0 * math.sin(0.4)))

    def test_tile_is_rescaled_competitor(self):
        for theta0 in [0.05, PI_3]:
            tile = line_energy(tile_field(theta0), ROOT).total
            assert tile == pytest.approx(math.cos(theta0) * energy_competitor_closed(ROOT, theta0).total, rel=1e-9)

    def test_tiling_energy_is_constant(self):
        tile = line_energy(tile_field(0.3), ROOT).total
        for n in [1, 2, 8]:
            assert line_energy(tiling_field(0.3, n), ROOT).total == pytest.approx(tile, rel=1e-9)

    def test_infinite_cost_on_gamma(self):
        f = JumpCost.table([(0.0, 0.0), (1.0, 0.0), (2.0, math.inf)])
        value, _ = curve_energy(GammaCurve(0.5), f)
        assert math.isinf(value)

    def test_unknown_curve_name(self):
        with pytest.raises(KeyError):
            line_energy(viscosity_field(PI_3), CUBE).energy_of("gamma")


class TestSupBoundChain:
    @pytest.mark.parametrize("theta0", [0.01, 0.2, 1.0])
    def test_chain_orders_and_matches_gap(self, theta0):
        chain = sup_bound_chain(ROOT, theta0)
        assert chain.middle <= chain.rhs * (1 + 1e-12)
        assert chain.viscosity_wins == (energy_gap(ROOT, theta0) >= 0)

    def test_small_angle_competitor_wins(self):
        assert not sup_bound_chain(ROOT, 0.01).viscosity_wins


class TestGapSummary:
    def test_row_layout(self):
        summary = summarize_gap(CUBE, PI_3)
        row = summary.csv_row()
        assert len(row) == len(ENERGY_CSV_HEADER)
        assert row[1] == "power:3"
        assert summary.E_competitor - summary.E_viscosity == pytest.approx(summary.gap, rel=1e-10)
        assert summary.verdict is Verdict.VISCOSITY_WINS

    def test_competitor_wins(self):
        assert summarize_gap(ROOT, 0.01).verdict is Verdict.COMPETITOR_WINS


class TestMonotoneInCost:
    # chord interpolants lie above convex costs and below concave ones; t/2 lies below t
    PAIRS = [
        (JumpCost.power(2.0), JumpCost.sampled(JumpCost.power(2.0), 9)),
        (JumpCost.table([(0.0, 0.0), (2.0, 1.0)]), JumpCost.power(1.0)),
        (JumpCost.sampled(ROOT, 9), ROOT),
    ]

    @pytest.mark.parametrize("pair", PAIRS, ids=["square", "linear", "root"])
    def test_pointwise_order(self, pair):
        f, g = pair
        t = np.linspace(0.0, 2.0, 401)
        assert np.all(f.evaluate(t) <= g.evaluate(t) + 1e-15)

    @pytest.mark.parametrize("pair", PAIRS, ids=["square", "linear", "root"])
    @pytest.mark.parametrize("theta0", [0.05, 0.6, 1.3])
    def test_components_are_ordered(self, pair, theta0):
        f, g = pair
        lower = energy_competitor_closed(f, theta0).components
        upper = energy_competitor_closed(g, theta0).components
        for name in ["I1", "I2", "I3"]:
            assert lower[name] <= upper[name] * (1 + 1e-9) + 1e-15
        assert energy_viscosity_closed(f, theta0) <= energy_viscosity_closed(g, theta0) * (1 + 1e-12)
