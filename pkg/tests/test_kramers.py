import math

import numpy as np
import pytest

from wellexit import kramers


@pytest.fixture(scope="module")
def ctx(quad_inventory):
    return kramers.TheoryContext(quad_inventory, 0.5)


class TestRate:
    def test_value_at_half(self, ctx):
        # plug the analytic inventory into the stated formula
        ref = ((math.pi * 0.5) ** -0.5 * 1.9 * (2.0 / math.sqrt(2.0))
               * math.exp(-2.0 * 0.9025 / 0.5))
        np.testing.assert_allclose(kramers.rate(ctx, 1), ref, rtol=1e-12)

    def test_ratio_hessians_cancel(self, quad_inventory):
        for h in (0.3, 0.5, 1.0):
            c = kramers.TheoryContext(quad_inventory, h)
            ratio = kramers.rate(c, 2) / kramers.rate(c, 1)
            np.testing.assert_allclose(ratio, (2.1 / 1.9) * math.exp(-0.4 / h),
                                       rtol=1e-12)

    def test_high_temperature_barrier_factor(self, quad_inventory):
        c = kramers.TheoryContext(quad_inventory, 1e9)
        barrier_factor = (kramers.rate(c, 1)
                          / (1.9 / math.sqrt(math.pi * c.h) * 2 / math.sqrt(2)))
        np.testing.assert_allclose(barrier_factor, 1.0, rtol=1e-8)

    def test_invalid_temperature(self, quad_inventory):
        with pytest.raises(kramers.InvalidTemperature):
            kramers.TheoryContext(quad_inventory, -0.5)

    def test_rates_decrease_with_barrier(self, quad_inventory):
        c = kramers.TheoryContext(quad_inventory, 0.5)
        ks = [kramers.rate(c, i) for i in (1, 2)]
        assert all(k > 0 for k in ks)
        assert ks[1] < ks[0]  # z2 has the higher barrier


class TestEigenvalue:
    def test_single_global_minimum_equals_rate(self, ctx):
        np.testing.assert_allclose(kramers.principal_eigenvalue(ctx),
                                   kramers.rate(ctx, 1), rtol=1e-14)

    def test_mean_exit_time_prediction(self, ctx):
        np.testing.assert_allclose(1.0 / kramers.principal_eigenvalue(ctx),
                                   17.242, rtol=1e-3)

    def test_tied_minima_double(self, quad_inventory):
        import dataclasses
        m1 = quad_inventory.boundary_minima[0]
        twin = dataclasses.replace(m1, basin_id=1)
        inv2 = dataclasses.replace(quad_inventory,
                                   boundary_minima=(m1, twin), n0=2)
        c1 = kramers.TheoryContext(quad_inventory, 0.5)
        c2 = kramers.TheoryContext(inv2, 0.5)
        single = (kramers.principal_eigenvalue(c1)
                  if quad_inventory.n0 == 1 else None)
        np.testing.assert_allclose(kramers.principal_eigenvalue(c2),
                                   2.0 * single, rtol=1e-14)


class TestExitProbability:
    def test_global_minimum_leading_order_one(self, ctx):
        np.testing.assert_allclose(kramers.exit_probability(ctx, 1), 1.0,
                                   rtol=1e-14)

    def test_second_minimum(self, ctx):
        np.testing.assert_allclose(kramers.exit_probability(ctx, 2),
                                   (2.1 / 1.9) * math.exp(-0.4 / 0.5),
                                   rtol=1e-12)

    def test_identity_with_rate(self, quad_inventory):
        # exit_probability * lambda == rate, exact at formula level
        for h in (0.25, 0.5, 0.77, 1.3):
            c = kramers.TheoryContext(quad_inventory, h)
            lam = kramers.principal_eigenvalue(c)
            for i in range(1, quad_inventory.n0 + 1):
                np.testing.assert_allclose(
                    kramers.exit_probability(c, i) * lam, kramers.rate(c, i),
                    rtol=1e-12)

    def test_global_set_sums_to_one(self, quad_inventory):
        c = kramers.TheoryContext(quad_inventory, 0.5)
        total = sum(kramers.exit_probability(c, i)
                    for i in range(1, quad_inventory.n0 + 1))
        np.testing.assert_allclose(total, 1.0, rtol=1e-14)


class TestTheoryLine:
    def test_intercept_and_slope(self, quad_inventory):
        line = kramers.exit_log_probability_line(quad_inventory, 2)
        np.testing.assert_allclose(line.intercept, math.log(2.1 / 1.9),
                                   rtol=1e-12)
        np.testing.assert_allclose(line.slope, -0.2, atol=1e-12)

    def test_small_a_slope(self):
        from wellexit import landscape as ls
        lan = ls.make_builtin_landscape("quadratic-disc-caps", {"a": 0.05})
        inv = ls.build_inventory(lan)
        line = kramers.exit_log_probability_line(inv, 2)
        np.testing.assert_allclose(line.slope, -0.1, atol=1e-9)

    def test_target_one_is_flat_zero(self, quad_inventory):
        line = kramers.exit_log_probability_line(quad_inventory, 1)
        np.testing.assert_allclose([line.intercept, line.slope], [0.0, 0.0],
                                   atol=1e-14)


def make_window(quad_landscape, quad_inventory, f_star=None):
    # window on the right segment whose lowest point sits at the z2 energy
    y_star = math.sqrt(0.2)
    z_star = np.array([1.0, y_star])
    return kramers.WindowSpec(
        label="window", kind="generic",
        f_star=f_star if f_star is not None else float(quad_landscape.f(z_star)),
        z_star=z_star, dn_f_zstar=1.9, dn_window_f=-2.0 * y_star,
        det_hess_window=1.0)


class TestGenericWindow:
    def test_sqrt_h_scaling(self, quad_landscape, quad_inventory):
        w = make_window(quad_landscape, quad_inventory)
        ratios = []
        for h in (0.25, 0.4, 0.5, 0.8, 1.0):
            c = kramers.TheoryContext(quad_inventory, h)
            r = (kramers.exit_probability_window(c, w)
                 / kramers.exit_probability(c, 2))
            ratios.append(r / math.sqrt(h))
        np.testing.assert_allclose(ratios, ratios[0], rtol=1e-12)

    def test_quarter_to_unit_h(self, quad_landscape, quad_inventory):
        w = make_window(quad_landscape, quad_inventory)
        r_quarter = (kramers.exit_probability_window(
            kramers.TheoryContext(quad_inventory, 0.25), w)
            / kramers.exit_probability(kramers.TheoryContext(quad_inventory, 0.25), 2))
        r_unit = (kramers.exit_probability_window(
            kramers.TheoryContext(quad_inventory, 1.0), w)
            / kramers.exit_probability(kramers.TheoryContext(quad_inventory, 1.0), 2))
        np.testing.assert_allclose(r_quarter / r_unit, 0.5, rtol=1e-12)

    def test_numeric_value(self, quad_landscape, quad_inventory):
        # hand evaluation of the constant in front of sqrt(h) e^{-0.4/h}
        w = make_window(quad_landscape, quad_inventory)
        h = 0.5
        c = kramers.TheoryContext(quad_inventory, h)
        val = kramers.exit_probability_window(c, w)
        y_star = math.sqrt(0.2)
        expect = (math.sqrt(h) / (2 * math.sqrt(math.pi))
                  * (1.9 / (2 * y_star))
                  * (math.sqrt(2.0) / 1.9)
                  * math.exp(-2.0 * 0.2 / h))
        np.testing.assert_allclose(val, expect, rtol=1e-12)
        assert val > 0

    def test_invalid_window(self, quad_landscape, quad_inventory):
        with pytest.raises(kramers.InvalidWindow):
            kramers.WindowSpec(label="bad", kind="generic", f_star=1.0,
                               dn_f_zstar=1.9, dn_window_f=+0.5)


class TestExitDensity:
    def test_normalization(self, quad_landscape, quad_inventory):
        ctx = kramers.TheoryContext(quad_inventory, 0.5)
        dom = quad_landscape.domain
        # independent check: integrate the returned density with a finer,
        # differently-panelled trapezoid rule
        norm1 = kramers.boundary_density_normalizer(ctx, quad_landscape,
                                                    panels=10_000)
        norm2 = kramers.boundary_density_normalizer(ctx, quad_landscape,
                                                    panels=40_000)
        np.testing.assert_allclose(norm1, norm2, rtol=1e-6)
        s = np.linspace(0.0, dom.boundary_length, 20001)
        dens = kramers.approx_exit_density(ctx, quad_landscape, s=s)
        total = np.trapezoid(dens, s)
        np.testing.assert_allclose(total, 1.0, rtol=1e-6)

    def test_symmetric_landscape(self):
        from wellexit import landscape as ls
        pot = ls.CallablePotential(
            lambda x: x[..., 0] ** 2 + x[..., 1] ** 2, dimension=2,
            grad=lambda x: 2.0 * x,
            hess=lambda x: np.broadcast_to(2 * np.eye(2), x.shape + (2,)).copy(),
            name="sym")
        lan = ls.make_landscape(pot, ls.SquareWithCapsDomain(), name="sym")
        inv = ls.build_inventory(lan)
        assert inv.n0 == 2  # tied boundary minima at (+-1, 0)
        ctx = kramers.TheoryContext(inv, 0.5)
        d1 = kramers.approx_exit_density(ctx, lan, z=np.array([1.0, 0.0]))
        d2 = kramers.approx_exit_density(ctx, lan, z=np.array([-1.0, 0.0]))
        np.testing.assert_allclose(d1, d2, rtol=1e-12)

    def test_ratio_between_minima(self, quad_landscape, quad_inventory):
        for h in (0.4, 0.5, 0.8):
            ctx = kramers.TheoryContext(quad_inventory, h)
            z1 = quad_inventory.boundary_minima[0].z
            z2 = quad_inventory.boundary_minima[1].z
            ratio = (kramers.approx_exit_density(ctx, quad_landscape, z=z2)
                     / kramers.approx_exit_density(ctx, quad_landscape, z=z1))
            np.testing.assert_allclose(ratio, (2.1 / 1.9) * math.exp(-0.4 / h),
                                       rtol=1e-10)


class TestEigenfunctionMass:
    def test_2d_value(self, quad_inventory):
        ctx = kramers.TheoryContext(quad_inventory, 0.5)
        expect = (math.pi ** 0.5 * 4.0 ** -0.25 * 0.5 ** 0.5
                  * math.exp(0.0025 / 0.5))
        np.testing.assert_allclose(kramers.qsd_normalizing_mass(ctx), expect,
                                   rtol=1e-12)

    def test_1d_value(self, interval_inventory):
        ctx = kramers.TheoryContext(interval_inventory, 0.3)
        expect = math.pi ** 0.25 * 2.0 ** -0.25 * 0.3 ** 0.25
        np.testing.assert_allclose(kramers.qsd_normalizing_mass(ctx), expect,
                                   rtol=1e-12)

    def test_temperature_scaling(self, quad_inventory):
        h = 0.8
        c1 = kramers.TheoryContext(quad_inventory, h)
        c2 = kramers.TheoryContext(quad_inventory, h / 4.0)
        ratio = (kramers.qsd_normalizing_mass(c1)
                 / kramers.qsd_normalizing_mass(c2))
        d = quad_inventory.dimension
        expect = 4.0 ** (d / 4.0) * math.exp(
            -quad_inventory.f_x0 * (1.0 / h - 4.0 / h))
        np.testing.assert_allclose(ratio, expect, rtol=1e-12)
