import dataclasses
import unittest
from unittest import mock

import numpy as np
import scipy.linalg

from core.cell import (constant_potential, cosine_potential, grad_hbar, hess_hbar, load_potential,
                       principal_pair, random_trig_potential, residuals, solve_cell, zero_potential)
from core.cell.operators import generator_matrix
from core.errors import InvariantViolation, MismatchedSolutions, NoPositiveEigenvector, OperatingRangeError

N = 64


class TestPotentials(unittest.TestCase):
    def test_builtin_catalog(self):
        self.assertEqual(load_potential('zero').vmax, 0.0)
        self.assertAlmostEqual(load_potential('constant:1.5').vmax, 1.5)
        V = load_potential('cosine', 1, 64)
        self.assertAlmostEqual(V.vmax, 1.0)
        self.assertAlmostEqual(V.vmin, -1.0)
        self.assertEqual(load_potential('random-trig:3').name, 'random-trig:3')

    def test_random_trig_is_reproducible(self):
        a = random_trig_potential(7, 1, 64)
        b = random_trig_potential(7, 1, 64)
        np.testing.assert_array_equal(a.field.values, b.field.values)

    def test_resampling_keeps_interpolant(self):
        V = cosine_potential(1, 32)
        fine = V.resampled(128)
        np.testing.assert_allclose(fine.field.values[::4], V.field.values, atol=1e-12)


class TestCellProblem(unittest.TestCase):
    def setUp(self):
        self.V = cosine_potential(1, N)

    def test_constant_potential_is_exact(self):
        sol = solve_cell(constant_potential(0.7, 1, N), [1.3], N)
        self.assertAlmostEqual(sol.hbar, 0.5 * 1.3 ** 2 + 0.7, places=14)
        np.testing.assert_allclose(sol.pi.values, 1.0)

    def test_zero_potential_gradient(self):
        sol = solve_cell(zero_potential(1, N), [0.4], N)
        np.testing.assert_allclose(grad_hbar(sol), [0.4], atol=1e-12)

    def test_bounds_evenness_convexity(self):
        ps = np.linspace(-3.0, 3.0, 13)
        values = {float(p): solve_cell(self.V, [p], N).hbar for p in ps}
        for p, h in values.items():
            self.assertGreaterEqual(h, 0.5 * p * p + self.V.vmin - 1e-8)
            self.assertLessEqual(h, 0.5 * p * p + self.V.vmax + 1e-8)
            self.assertAlmostEqual(h, values[-p + 0.0], delta=1e-8)
        for a, b in zip(ps[:-2], ps[2:]):
            mid = values[float(0.5 * (a + b))]
            self.assertLessEqual(mid, 0.5 * (values[float(a)] + values[float(b)]) + 1e-8)

    def test_ground_state_above_mean_potential(self):
        # the Rayleigh quotient at phi = 1 is mean(V) = 0
        self.assertGreater(solve_cell(self.V, [0.0], N).hbar, 0.0)

    def test_residuals_and_density(self):
        sol = solve_cell(self.V, [0.5], N)
        res = residuals(sol)
        self.assertLess(res['cell_residual'], 1e-8)
        self.assertLess(res['stationarity_residual'], 1e-8)
        self.assertGreater(sol.pi.min(), 0.0)
        self.assertAlmostEqual(float(sol.pi.values.mean()), 1.0, places=12)
        self.assertAlmostEqual(sol.e_p, 0.125 - sol.hbar, places=14)

    def test_corrupted_corrector_is_detected(self):
        sol = solve_cell(self.V, [0.5], N)
        x = sol.v.grid.axis()
        bad = dataclasses.replace(sol, v=sol.v.with_values(sol.v.values + 1e-3 * np.sin(2 * np.pi * x)))
        self.assertGreater(residuals(bad)['cell_residual'], 1e-4)

    def test_gradient_matches_differences(self):
        h = 1e-4
        for p in (0.0, 0.5, 1.0):
            central = (solve_cell(self.V, [p + h], N).hbar - solve_cell(self.V, [p - h], N).hbar) / (2 * h)
            self.assertAlmostEqual(grad_hbar(solve_cell(self.V, [p], N))[0], central, delta=1e-5)

    def test_gradient_from_paired_solutions(self):
        sol = solve_cell(self.V, [0.5], N)
        sol_minus = solve_cell(self.V, [-0.5], N)
        np.testing.assert_allclose(grad_hbar(sol, sol_minus), grad_hbar(sol), atol=1e-10)
        with self.assertRaises(MismatchedSolutions):
            grad_hbar(sol, solve_cell(self.V, [0.25], N))

    def test_hessian_positive(self):
        H = hess_hbar(self.V, [0.5], N=N)
        self.assertGreater(H[0, 0], 0.0)
        h = 1e-2
        second = (solve_cell(self.V, [0.5 + h], N).hbar - 2 * solve_cell(self.V, [0.5], N).hbar
                  + solve_cell(self.V, [0.5 - h], N).hbar) / h ** 2
        self.assertAlmostEqual(H[0, 0], second, delta=1e-3 * second)

    def test_matches_dense_symmetric_eigensolve(self):
        fine = cosine_potential(1, 512)
        A = generator_matrix(1, 512, drift=[0.0], potential=fine.field.flat())
        top = scipy.linalg.eigvalsh(0.5 * (A + A.T))[-1]
        self.assertAlmostEqual(solve_cell(self.V, [0.0], N).hbar, top, delta=1e-9)

    def test_spectral_convergence_in_resolution(self):
        hbars = [solve_cell(self.V, [0.5], n).hbar for n in (64, 128, 256)]
        coarse, fine = abs(hbars[0] - hbars[1]), abs(hbars[1] - hbars[2])
        # at these sizes both differences can already sit at the eigensolver's round-off floor
        self.assertTrue(coarse > 10 * fine or coarse < 1e-9)

    def test_separable_2d(self):
        V2 = cosine_potential(2, 32)
        V1 = cosine_potential(1, 32)
        h2 = solve_cell(V2, [0.3, 0.0], 32).hbar
        h1 = solve_cell(V1, [0.3], 32).hbar + solve_cell(V1, [0.0], 32).hbar
        self.assertAlmostEqual(h2, h1, delta=1e-8)

    def test_preconditions(self):
        with self.assertRaises(OperatingRangeError):
            solve_cell(self.V, [25.0], N)
        with self.assertRaises(InvariantViolation):
            solve_cell(self.V, [0.5], 16)
        with self.assertRaises(InvariantViolation):
            solve_cell(self.V, [0.5, 0.5], N)
        with self.assertRaises(InvariantViolation):
            hess_hbar(self.V, [0.5], h=0.5)


class TestEigenvectorSign(unittest.TestCase):
    def setUp(self):
        self.V = cosine_potential(1, N)
        self.x = np.linspace(1.0, 2.0, N)

    def test_round_off_negatives_are_lifted(self):
        self.x[5] = -1e-12
        with mock.patch('core.cell.solver._shift_invert', return_value=(0.3, self.x)):
            pair = principal_pair(self.V, [0.0], N)
        self.assertGreater(pair.r.min(), 0.0)
        self.assertEqual(pair.hbar, 0.3)

    def test_sign_change_is_rejected(self):
        self.x[5] = -0.1
        with mock.patch('core.cell.solver._shift_invert', return_value=(0.3, self.x)):
            with self.assertRaises(NoPositiveEigenvector):
                principal_pair(self.V, [0.0], N)


if __name__ == '__main__':
    unittest.main()
