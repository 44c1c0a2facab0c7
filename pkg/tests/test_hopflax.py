import os
import tempfile
import unittest

import numpy as np

from core.cell import constant_potential, cosine_potential, zero_potential
from core.errors import ConfigError, InvariantViolation, NoQuadraticGrowth
from core.hopflax import (CATALOG_VERSION, LipschitzData, load_data, minimizer_consistency, quad_growth_diag,
                          search_radius, small_time_check, solve, twice_differentiability_probe)
from core.legendre import HamiltonianModel

N = 64


class TestDataCatalog(unittest.TestCase):
    def test_builtins(self):
        g = load_data('capped-norm')
        np.testing.assert_allclose(g([[-3.0], [0.5], [12.0]]), [3.0, 0.5, 10.0])
        self.assertEqual(load_data('constant:2').at([[5.0]]), 2.0)
        self.assertAlmostEqual(load_data('affine:0.5').at([[2.0]]), 1.0)
        self.assertAlmostEqual(load_data('huber:1').at([[3.0]]), 2.5)
        self.assertAlmostEqual(load_data('smooth').at([[0.0]]), 0.0)
        self.assertTrue(load_data('smooth').semiconcave)
        self.assertEqual(CATALOG_VERSION, "1")

    def test_lipschitz_bounds_hold(self):
        for spec in ('capped-norm', 'smooth', 'huber:2', 'affine:0.5'):
            g = load_data(spec)
            self.assertLessEqual(g.check_lipschitz(), g.lipschitz_bound * 1.01)

    def test_2d_data(self):
        g = load_data('capped-norm', 2)
        self.assertAlmostEqual(g.at([[3.0, 4.0]]), 5.0)
        with self.assertRaises(ConfigError):
            load_data('affine:1', 2)

    def test_tabulated(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'g.csv')
            with open(path, 'w') as f:
                f.write("-1,1\n0,0\n1,2\n")
            g = load_data(path)
        self.assertAlmostEqual(g.at([[0.5]]), 1.0)
        self.assertEqual(g.lipschitz_bound, 2.0)


class TestHopfLaxZeroPotential(unittest.TestCase):
    def setUp(self):
        self.model = HamiltonianModel(zero_potential(1, N), N)

    def test_capped_norm(self):
        g = load_data('capped-norm')
        self.assertAlmostEqual(solve(g, self.model, [0.0], 1.0).value, 0.0, delta=1e-10)
        self.assertAlmostEqual(solve(g, self.model, [0.5], 1.0).value, 0.125, delta=1e-9)
        sol = solve(g, self.model, [2.0], 1.0)
        self.assertAlmostEqual(sol.value, 1.5, delta=1e-9)
        self.assertAlmostEqual(sol.minimizer[0], 1.0, delta=1e-6)

    def test_affine_tilt(self):
        g = load_data('affine:0.5')
        self.assertAlmostEqual(solve(g, self.model, [1.0], 1.0).value, 0.375, delta=1e-9)

    def test_constant_potential_shift(self):
        model = HamiltonianModel(constant_potential(0.25, 1, N), N)
        self.assertAlmostEqual(solve(load_data('constant:1'), model, [0.3], 2.0).value, 0.5, delta=1e-10)

    def test_search_radius(self):
        self.assertAlmostEqual(search_radius(load_data('capped-norm'), self.model, 2.0), 5.0)

    def test_rejects_nonpositive_time(self):
        with self.assertRaises(InvariantViolation):
            solve(load_data('smooth'), self.model, [0.0], 0.0)

    def test_quadratic_growth_for_smooth_data(self):
        growth = quad_growth_diag(load_data('smooth'), self.model, [0.0], 1.0)
        self.assertGreater(growth.delta, 0.4)
        self.assertTrue(all(d > 0 for _, d in growth.series))

    def test_growth_of_the_capped_norm_is_linear(self):
        # h(y) - h(0) = |y| + y^2 / 2, so delta(r) = 1 / r + 1 / 2
        growth = quad_growth_diag(load_data('capped-norm'), self.model, [0.0], 1.0)
        np.testing.assert_array_equal(growth.minimizer, [0.0])
        self.assertAlmostEqual(growth.delta, 1.0 / growth.r + 0.5, delta=1e-9)
        for r, d in growth.series:
            self.assertAlmostEqual(d, 1.0 / r + 0.5, delta=1e-6 / r)

    def test_flat_minimum_has_no_quadratic_growth(self):
        # h vanishes on [-2, 2] at x = 0, t = 1
        bowl = LipschitzData(lambda y: -0.5 * np.minimum(np.sum(y ** 2, axis=1), 4.0), 2.0, 1, name="flat")
        with self.assertRaises(NoQuadraticGrowth):
            quad_growth_diag(bowl, self.model, [0.0], 1.0)

    def test_twice_differentiability(self):
        self.assertTrue(twice_differentiability_probe(load_data('smooth'), self.model, [0.0], 1.0).twice_differentiable)
        # u = x^2/2 inside |x| <= t and |x| - t/2 outside: second derivative jumps at x = t
        check = twice_differentiability_probe(load_data('capped-norm'), self.model, [1.0], 1.0)
        self.assertFalse(check.twice_differentiable)

    def test_minimizer_consistency(self):
        self.assertLess(minimizer_consistency(load_data('smooth'), self.model, [0.5], 1.0), 1e-4)


class TestHopfLaxCosine(unittest.TestCase):
    def setUp(self):
        self.model = HamiltonianModel(cosine_potential(1, N), N)

    def test_even_data_at_origin(self):
        # g >= 0 = g(0) and Lbar >= Lbar(0) = -Hbar(0), both attained at y = 0
        sol = solve(load_data('smooth'), self.model, [0.0], 1.0)
        self.assertAlmostEqual(sol.value, -self.model.hbar([0.0]), delta=1e-9)

    def test_small_time(self):
        g = load_data('capped-norm')
        for t in (0.5, 0.1, 0.02):
            self.assertLess(small_time_check(g, self.model, [0.3], t), 2.0)

    def test_parabolic_scaling(self):
        g = load_data('smooth')
        x0, t0, x, t = 0.3, 0.5, 0.2, 1.0
        scaled = solve(g, self.model, [x0 + x * t0], t * t0).value
        unit = solve(g.rescaled([x0], t0), self.model, [x], t).value
        self.assertAlmostEqual(scaled, t0 * unit, delta=1e-5)


if __name__ == '__main__':
    unittest.main()
