import unittest

import numpy as np

from core.cell import constant_potential, cosine_potential, zero_potential
from core.errors import OperatingRangeError
from core.legendre import HamiltonianModel, LagrangianTable, d2L, dL, legendre

N = 64


class TestHamiltonianModel(unittest.TestCase):
    def setUp(self):
        self.model = HamiltonianModel(cosine_potential(1, N), N)

    def test_constant_model_is_closed_form(self):
        model = HamiltonianModel(constant_potential(-0.5, 1, N), N)
        self.assertAlmostEqual(model.hbar([2.0]), 1.5, places=14)
        np.testing.assert_array_equal(model.grad([2.0]), [2.0])
        np.testing.assert_array_equal(model.hessian([2.0]), [[1.0]])

    def test_cache_mirrors_by_evenness(self):
        h = self.model.hbar([0.75])
        size = self.model.cache_size()
        self.assertEqual(self.model.hbar([-0.75]), h)
        self.assertEqual(self.model.cache_size(), size)

    def test_gradient_is_odd(self):
        np.testing.assert_allclose(self.model.grad([0.6]), -self.model.grad([-0.6]), atol=1e-12)

    def test_grad_bound_on_boundary(self):
        self.assertAlmostEqual(self.model.grad_bound(1.0), abs(self.model.grad([1.0])[0]), places=14)
        self.assertEqual(self.model.grad_bound(0.0), 0.0)


class TestLegendre(unittest.TestCase):
    def setUp(self):
        self.model = HamiltonianModel(cosine_potential(1, N), N)

    def test_zero_potential(self):
        value = legendre(HamiltonianModel(zero_potential(1, N), N), [0.8])
        self.assertAlmostEqual(value.lbar, 0.32, places=14)
        np.testing.assert_allclose(dL(value), [0.8])

    def test_fenchel_duality(self):
        for q in (0.0, 0.3, 1.2):
            value = legendre(self.model, [q])
            self.assertLess(value.dual_gap, 1e-9)
            np.testing.assert_allclose(self.model.grad(value.p_of_q), [q], atol=1e-9)
            # Lbar(q) >= q.p - Hbar(p) for any p
            for p in (-1.0, 0.0, 0.5, 2.0):
                self.assertGreaterEqual(value.lbar, q * p - self.model.hbar([p]) - 1e-10)

    def test_second_derivatives_are_inverse(self):
        for q in (0.0, 0.5, 1.0):
            value = legendre(self.model, [q])
            product = d2L(self.model, [q]) @ self.model.hessian(value.p_of_q)
            np.testing.assert_allclose(product, np.eye(1), atol=1e-3)

    def test_bounds_and_convexity_on_grid(self):
        V = self.model.potential
        qs = np.linspace(-5.0, 5.0, 11)
        values = [legendre(self.model, [q]).lbar for q in qs]
        for q, L in zip(qs, values):
            self.assertGreaterEqual(L, 0.5 * q * q - V.vmax - 1e-8)
            self.assertLessEqual(L, 0.5 * q * q - V.vmin + 1e-8)
        for a, mid, b in zip(values[:-2], values[1:-1], values[2:]):
            self.assertLessEqual(mid, 0.5 * (a + b) + 1e-8)

    def test_round_trip_through_the_gradient(self):
        for p in (-1.5, -0.4, 0.0, 0.7, 2.0):
            q = self.model.grad([p])
            np.testing.assert_allclose(legendre(self.model, q).p_of_q, [p], atol=1e-6)

    def test_lbar_is_even(self):
        self.assertAlmostEqual(legendre(self.model, [0.7]).lbar, legendre(self.model, [-0.7]).lbar, delta=1e-10)

    def test_operating_range(self):
        with self.assertRaises(OperatingRangeError):
            legendre(self.model, [30.0])


class TestLagrangianTable(unittest.TestCase):
    def setUp(self):
        self.model = HamiltonianModel(cosine_potential(1, N), N)

    def test_constant_closed_form(self):
        table = LagrangianTable.build(HamiltonianModel(constant_potential(1.0, 1, N), N), 3.0)
        np.testing.assert_allclose(table.value([1.0, -2.0]), [-0.5, 1.0])
        np.testing.assert_allclose(table.slope([1.0, -2.0]), [1.0, -2.0])

    def test_matches_pointwise_legendre(self):
        table = self.model.lagrangian_table(1.5)
        for q in (0.0, 0.45, -1.1):
            value = legendre(self.model, [q])
            self.assertAlmostEqual(float(table.value([q])[0]), value.lbar, delta=1e-5)
            self.assertAlmostEqual(float(table.slope([q])[0]), value.p_of_q[0], delta=1e-3)

    def test_shared_per_bound(self):
        self.assertIs(self.model.lagrangian_table(1.0), self.model.lagrangian_table(1.0))

    def test_range_is_enforced(self):
        table = self.model.lagrangian_table(1.0)
        with self.assertRaises(OperatingRangeError):
            table.value([1.5])


if __name__ == '__main__':
    unittest.main()
