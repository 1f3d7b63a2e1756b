import math

import numpy as np
import pytest

from wellexit import oracle1d as oc


@pytest.fixture(scope="module")
def quad_interval():
    return oc.from_poly((0.0, 0.0, 1.0), -1.0, 2.0)


class TestConstruction:
    def test_sign_conditions_enforced(self):
        with pytest.raises(oc.InvalidInterval):
            oc.from_poly((0.0, 0.0, 1.0), 0.5, 2.0)     # f'(z1) > 0
        with pytest.raises(oc.InvalidInterval):
            oc.from_poly((0.0, 0.0, -1.0), -1.0, 1.0)   # maximum inside
        with pytest.raises(oc.InvalidInterval):
            oc.from_poly((0.0, 0.0, 1.0), -2.0, 1.0)    # f(z1) > f(z2)

    def test_critical_point_located(self, quad_interval):
        assert abs(quad_interval.x0) < 1e-10

    def test_double_well_rejected(self):
        # two interior critical points
        with pytest.raises(oc.InvalidInterval):
            oc.from_poly((0.0, 0.0, -1.0, 0.0, 0.25), -1.9, 2.1)


class TestExactProbability:
    def test_boundary_values(self, quad_interval):
        assert oc.exact_exit_prob(quad_interval, -1.0, 0.4) == 0.0
        assert oc.exact_exit_prob(quad_interval, 2.0, 0.4) == 1.0

    def test_symmetric_midpoint(self):
        iv = oc.from_poly((0.0, 0.0, 1.0), -1.0, 1.0 + 1e-9)
        np.testing.assert_allclose(oc.exact_exit_prob(iv, 0.0, 0.5), 0.5,
                                   atol=1e-6)

    def test_self_convergence(self, quad_interval):
        # independent high-order (Gauss-Legendre) quadrature oracle
        from numpy.polynomial.legendre import leggauss
        h = 0.4
        val = oc.exact_exit_prob(quad_interval, 0.0, h)

        def piece(a, b, n=2000):
            t, wts = leggauss(n)
            x = 0.5 * (b - a) * t + 0.5 * (b + a)
            return 0.5 * (b - a) * np.sum(wts * np.exp(2 * (x ** 2 - 4.0) / h))

        num = piece(-1.0, 0.0)
        den = num + piece(0.0, 2.0)
        np.testing.assert_allclose(val, num / den, rtol=1e-8)

    def test_monotone_in_x(self, quad_interval):
        xs = np.linspace(-1.0, 2.0, 41)
        vals = [oc.exact_exit_prob(quad_interval, x, 0.5) for x in xs]
        assert np.all(np.diff(vals) >= -1e-15)

    def test_invalid_inputs(self, quad_interval):
        with pytest.raises(ValueError):
            oc.exact_exit_prob(quad_interval, 5.0, 0.4)
        with pytest.raises(ValueError):
            oc.exact_exit_prob(quad_interval, 0.0, -0.1)


class TestLaplace:
    def test_below_regime_formula(self, quad_interval):
        # f'(-1) = -2, f'(2) = 4, barrier f(z2) - f(z1) = 3
        la = oc.laplace_asymptotic(quad_interval, 0.0, 0.5)
        assert la.regime == "below"
        np.testing.assert_allclose(la.value, 2.0 * math.exp(-6.0 / 0.5),
                                   rtol=1e-12)

    def test_equal_regime_dispatch(self):
        # symmetric-height point x with f(x) = f(z1) on the right slope
        iv = oc.from_poly((0.0, 0.0, 1.0), -1.0, 2.0)
        la = oc.laplace_asymptotic(iv, 1.0, 0.5)
        assert la.regime == "equal"
        expect = 4.0 * (1.0 / 2.0 - 1.0 / -2.0) * math.exp(-6.0 / 0.5)
        np.testing.assert_allclose(la.value, expect, rtol=1e-12)

    def test_above_regime(self, quad_interval):
        la = oc.laplace_asymptotic(quad_interval, 1.5, 0.5)
        assert la.regime == "above"
        np.testing.assert_allclose(
            la.value, (4.0 / 3.0) * math.exp(-2.0 * (4.0 - 2.25) / 0.5),
            rtol=1e-12)

    def test_at_z1_rejected(self, quad_interval):
        with pytest.raises(ValueError):
            oc.laplace_asymptotic(quad_interval, -1.0, 0.5)

    def test_ratio_approaches_one(self, quad_interval):
        errs = []
        for h in (0.5, 0.25, 0.125):
            exact = oc.exact_exit_prob(quad_interval, 0.0, h)
            asym = oc.laplace_asymptotic(quad_interval, 0.0, h).value
            errs.append(abs(exact / asym - 1.0))
        assert errs[0] > errs[1] > errs[2]
