import csv
import io
import json
import math
import os
import tempfile
import unittest
from unittest import mock

import numpy as np

from core.config import OUTPUT_ENV
from core.errors import ConfigError, IoFailure, NoQuadraticGrowth, SolveFailure
from core.hopflax import load_data
from harness.cli import main
from harness.config import ExperimentConfig, dyadic, from_dict, load_config, parse_grid
from harness.oracle import semianalytic_oracle_v0
from harness.report import CSV_COLUMNS, RateReport, emit_report, load_report
from harness.scheduler import Scheduler
from harness.sweep import envelope_bound, envelope_check, fit_rate, rate_sweep


def quadrature_config(**overrides) -> ExperimentConfig:
    raw = dict(name='capped-kink', potential='zero', data='capped-norm', dim=1, epsilons=dyadic(4, 8),
               points=[[0.0]], times=[1.0], reference='quadrature', workers=1)
    raw.update(overrides)
    return from_dict(raw)


class TestRateFit(unittest.TestCase):
    def test_recovers_exact_model(self):
        eps = dyadic(3, 9)
        errors = [e * (2.0 + 0.5 * math.log(1.0 / e)) for e in eps]
        fit = fit_rate(eps, errors)
        self.assertAlmostEqual(fit.a, 2.0, delta=1e-9)
        self.assertAlmostEqual(fit.b, 0.5, delta=1e-9)
        self.assertLess(fit.residual, 1e-12)

    def test_needs_two_distinct_eps(self):
        self.assertIsNone(fit_rate([0.1], [0.01]))
        self.assertIsNone(fit_rate([0.1, 0.1], [0.01, 0.02]))

    def test_envelope_bound(self):
        self.assertAlmostEqual(envelope_bound(1.0, 0.25, 1.0, 2), 0.25 * (1.0 + math.log(4.0)))
        # for t <= eps the log term vanishes
        self.assertAlmostEqual(envelope_bound(1.0, 0.25, 0.1, 1), 0.25)


class TestOracle(unittest.TestCase):
    def test_zero_data(self):
        self.assertAlmostEqual(semianalytic_oracle_v0(load_data('constant:0'), 0.01, 0.3, 1.0), 0.0, delta=1e-10)

    def test_affine_data_is_exact(self):
        # linear data solve the viscous and inviscid equations alike
        g = load_data('affine:0.5')
        for eps in (0.1, 0.001):
            self.assertAlmostEqual(semianalytic_oracle_v0(g, eps, 1.0, 2.0), 0.5 - 2.0 * 0.125, delta=1e-9)

    def test_capped_norm_at_the_kink(self):
        # u^eps(0, 1) = eps (log(1/eps) + log(pi/2)) / 2 + O(eps^2)
        eps = 2.0 ** -10
        expected = 0.5 * eps * (math.log(1.0 / eps) + math.log(math.pi / 2))
        u = semianalytic_oracle_v0(load_data('capped-norm'), eps, 0.0, 1.0)
        self.assertAlmostEqual(u, expected, delta=4 * eps ** 2)


class TestGridSpec(unittest.TestCase):
    def test_range_axis(self):
        self.assertEqual(parse_grid('0:2:3', 1), [(0.0,), (1.0,), (2.0,)])

    def test_listed_axes_form_a_tensor_grid(self):
        self.assertEqual(parse_grid('0,0.5;1', 2), [(0.0, 1.0), (0.5, 1.0)])

    def test_malformed(self):
        for spec, dim in (('0:1', 1), ('a,b', 1), ('0:1:2', 2), ('0:1:0', 1)):
            with self.assertRaises(ConfigError):
                parse_grid(spec, dim)


class TestExperimentConfig(unittest.TestCase):
    def test_builtins_load(self):
        config = load_config('builtin:lower-bound')
        self.assertEqual(config.reference, 'quadrature')
        self.assertEqual(config.epsilons[0], 2.0 ** -4)
        with self.assertRaises(ConfigError):
            load_config('builtin:missing')

    def test_validation(self):
        with self.assertRaises(ConfigError):
            from_dict({'name': 'x', 'epsilons': [0.1, 0.2]})
        with self.assertRaises(ConfigError):
            from_dict({'name': 'x', 'epsilons': [0.1], 'reference': 'quadrature', 'potential': 'cosine'})
        with self.assertRaises(ConfigError):
            from_dict({'name': 'x', 'epsilons': [0.1], 'stride': 2})
        with self.assertRaises(ConfigError):
            from_dict({'epsilons': [0.1]})
        with self.assertRaises(ConfigError):
            from_dict({'name': 'x', 'epsilons': [0.1], 'points': [[0.0, 1.0]]})
        with self.assertRaises(ConfigError):
            from_dict({'name': 'x', 'epsilons': [0.1], 'cell_points': 100})

    def test_hash_ignores_where_results_go(self):
        a = quadrature_config()
        b = quadrature_config(workers=3, output_dir='/tmp/elsewhere')
        self.assertEqual(a.config_hash(), b.config_hash())
        self.assertNotEqual(a.config_hash(), quadrature_config(seed=5).config_hash())

    def test_yaml_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'sweep.yaml')
            with open(path, 'w') as f:
                f.write("name: from-file\nepsilons: [0.5, 0.25]\npoints: [0.0, 0.5]\ntimes: [1, 2]\n")
            config = load_config(path)
            self.assertEqual(config.points, ((0.0,), (0.5,)))
            self.assertEqual(config.times, (1.0, 2.0))
            with open(path, 'w') as f:
                f.write("name: [unclosed\n")
            with self.assertRaises(ConfigError):
                load_config(path)
        with self.assertRaises(ConfigError):
            load_config(os.path.join(tmp, 'gone.yaml'))

    def test_output_dir_resolution(self):
        config = quadrature_config(output_dir='here')
        with mock.patch.dict(os.environ, {OUTPUT_ENV: 'there'}):
            self.assertEqual(config.resolved_output_dir(), 'there')
        with mock.patch.dict(os.environ, {}, clear=True):
            self.assertEqual(config.resolved_output_dir(), 'here')


class TestScheduler(unittest.TestCase):
    def test_results_in_key_order(self):
        for workers in (1, 3):
            scheduler = Scheduler(workers)
            for k in (3, 1, 2):
                scheduler.schedule(k, lambda k=k: k * k)
            results, failures = scheduler.run()
            self.assertEqual(list(results.items()), [(1, 1), (2, 4), (3, 9)])
            self.assertEqual(failures, {})

    def test_failures_are_kept_apart(self):
        def fragile(k):
            if k == 2:
                raise SolveFailure("singular")
            return k

        scheduler = Scheduler(2)
        for k in range(4):
            scheduler.schedule(k, fragile, k)
        results, failures = scheduler.run()
        self.assertEqual(sorted(results), [0, 1, 3])
        self.assertIsInstance(failures[2], SolveFailure)

    def test_duplicate_keys(self):
        scheduler = Scheduler(1)
        scheduler.schedule('a', int)
        with self.assertRaises(ValueError):
            scheduler.schedule('a', int)


class TestReport(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.report = RateReport(name='demo', epsilons=[0.5, 0.25], errors=[0.4, 0.3], a=0.5, b=0.25,
                                 residual=0.01, manifest={'seed': 0})

    def tearDown(self):
        self.tmp.cleanup()

    def test_empty_report_is_a_header(self):
        paths = emit_report(RateReport(name='empty', epsilons=[], errors=[]), self.tmp.name, formats=('csv',))
        with open(paths[0]) as f:
            self.assertEqual(f.read(), ','.join(CSV_COLUMNS) + '\n')

    def test_model_values(self):
        self.assertAlmostEqual(self.report.model_values()[0], 0.5 * (0.5 + 0.25 * math.log(2.0)))
        self.assertEqual(self.report.scaled_errors(), [0.8, 1.2])
        self.assertTrue(math.isnan(RateReport(name='x', epsilons=[0.5], errors=[0.1]).model_values()[0]))

    def test_emit_and_load(self):
        paths = emit_report(self.report, self.tmp.name)
        self.assertEqual([os.path.basename(p) for p in paths], ['demo.csv', 'demo.json'])
        loaded = load_report(paths[1])
        self.assertEqual(loaded.to_dict(), self.report.to_dict())
        with open(paths[0]) as f:
            lines = f.read().splitlines()
        self.assertEqual(len(lines), 3)
        self.assertEqual(lines[1].split(',')[:2], ['0.5', '0.40000000000000002'])

    def test_identical_inputs_give_identical_bytes(self):
        first = emit_report(self.report, self.tmp.name)
        contents = [open(p, 'rb').read() for p in first]
        second = emit_report(self.report, self.tmp.name)
        self.assertEqual([open(p, 'rb').read() for p in second], contents)

    def test_rejects_bad_reports(self):
        with self.assertRaises(ValueError):
            RateReport(name='x', epsilons=[0.5], errors=[])
        with self.assertRaises(ValueError):
            RateReport(name='x', epsilons=[0.5], errors=[-1.0])
        with self.assertRaises(ValueError):
            emit_report(self.report, self.tmp.name, formats=('xml',))

    def test_io_failures(self):
        blocker = os.path.join(self.tmp.name, 'file')
        with open(blocker, 'w') as f:
            f.write('x')
        with self.assertRaises(IoFailure):
            emit_report(self.report, os.path.join(blocker, 'sub'))
        with self.assertRaises(IoFailure):
            load_report(blocker)
        with self.assertRaises(IoFailure):
            load_report(os.path.join(self.tmp.name, 'missing.json'))


class TestSweeps(unittest.TestCase):
    def test_trivial_pde_sweep(self):
        config = from_dict(dict(name='flat', potential='zero', data='constant:0', epsilons=[0.25, 0.125],
                                times=[0.5], cell_points=32, workers=1))
        report = rate_sweep(config, write=False)
        self.assertEqual(report.epsilons, [0.25, 0.125])
        self.assertTrue(all(e < 1e-8 for e in report.errors))
        self.assertFalse(report.partial)
        self.assertEqual(report.manifest['config_hash'], config.config_hash())

    def test_quadrature_sweep_finds_the_half_log(self):
        with tempfile.TemporaryDirectory() as tmp:
            with mock.patch.dict(os.environ, {OUTPUT_ENV: tmp}):
                report = rate_sweep(quadrature_config(mode='pointwise'))
            self.assertTrue(os.path.exists(os.path.join(tmp, 'capped-kink.csv')))
            self.assertEqual(load_report(os.path.join(tmp, 'capped-kink.json')).errors, report.errors)
        self.assertTrue(report.fitted)
        self.assertAlmostEqual(report.b, 0.5, delta=0.05)
        self.assertEqual(len(report.pointwise), 1)
        self.assertEqual(report.pointwise[0]['errors'], report.errors)

    def test_partial_report_on_failure(self):
        config = quadrature_config()
        last = config.epsilons[-1]

        def viscous(config, potential, data, epsilon, t, points):
            if epsilon == last:
                raise SolveFailure("factorization broke down")
            return np.array([semianalytic_oracle_v0(data, epsilon, x[0], t) for x in points])

        with tempfile.TemporaryDirectory() as tmp:
            with mock.patch.dict(os.environ, {OUTPUT_ENV: tmp}), \
                    mock.patch('harness.sweep._viscous', side_effect=viscous):
                with self.assertRaises(SolveFailure):
                    rate_sweep(config)
            report = load_report(os.path.join(tmp, 'capped-kink.json'))
        self.assertTrue(report.partial)
        self.assertEqual(report.epsilons, list(config.epsilons[:-1]))
        self.assertIn('SolveFailure', report.failure)

    def test_envelope_holds_at_the_kink(self):
        result = envelope_check(quadrature_config())
        self.assertTrue(result.passed)
        self.assertGreater(result.c_hat, 0.0)
        self.assertEqual([r['role'] for r in result.rows], ['fit', 'fit', 'test', 'test', 'test'])
        with self.assertRaises(ConfigError):
            envelope_check(quadrature_config(epsilons=[0.5]))


class TestCommandLine(unittest.TestCase):
    def run_cli(self, *argv):
        with mock.patch('sys.stdout', new_callable=io.StringIO) as out:
            code = main(list(argv))
        return code, out.getvalue()

    def test_cell(self):
        code, out = self.run_cli('cell', '--potential', 'constant:0.5', '--n', '32', '--p', '1')
        self.assertEqual(code, 0)
        self.assertAlmostEqual(json.loads(out)['hbar'], 1.0, places=12)

    def test_invariant_violations_exit_3(self):
        code, _ = self.run_cli('cell', '--n', '32', '--p', '30')
        self.assertEqual(code, 3)
        code, _ = self.run_cli('rate', '--config', 'builtin:missing')
        self.assertEqual(code, 3)

    def test_solver_failures_exit_2(self):
        with mock.patch('harness.cli.solve_cell', side_effect=SolveFailure("broke")):
            code, _ = self.run_cli('cell', '--n', '32', '--p', '0')
        self.assertEqual(code, 2)

    def test_bloch(self):
        code, out = self.run_cli('bloch', '--drift', 'constant:0.25', '--n', '32')
        self.assertEqual(code, 0)
        summary = json.loads(out)
        self.assertAlmostEqual(summary['b_bar'][0], 0.25, delta=1e-10)
        self.assertAlmostEqual(summary['Q'][0][0], 1.0, delta=1e-10)

    def test_lagrangian_table(self):
        code, out = self.run_cli('lagrangian', '--potential', 'zero', '--n', '32', '--q-grid', '0:2:3')
        self.assertEqual(code, 0)
        reader = csv.DictReader(io.StringIO(out))
        self.assertEqual(reader.fieldnames, ['q', 'lbar', 'p_of_q', 'dual_gap'])
        rows = list(reader)
        self.assertEqual([float(r['q']) for r in rows], [0.0, 1.0, 2.0])
        for r in rows:
            q = float(r['q'])
            self.assertAlmostEqual(float(r['lbar']), 0.5 * q * q, delta=1e-10)
            self.assertAlmostEqual(float(r['p_of_q']), q, delta=1e-10)

    def test_lagrangian_table_to_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'lbar.csv')
            code, out = self.run_cli('lagrangian', '--potential', 'zero', '--dim', '2', '--n', '16',
                                     '--q-grid', '0,0.5;1', '--out', path)
            with open(path) as f:
                rows = list(csv.reader(f))
        self.assertEqual(code, 0)
        self.assertEqual(out, '')
        self.assertEqual(rows[0], ['q_0', 'q_1', 'lbar', 'p_of_q_0', 'p_of_q_1', 'dual_gap'])
        self.assertEqual(len(rows), 3)
        self.assertAlmostEqual(float(rows[2][2]), 0.625, delta=1e-10)

    def test_hopflax_reports_growth(self):
        code, out = self.run_cli('hopflax', '--potential', 'zero', '--n', '32', '--g', 'capped-norm',
                                 '--x', '2', '--t', '1')
        self.assertEqual(code, 0)
        result = json.loads(out)
        self.assertEqual(set(result), {'value', 'minimizer', 'delta', 'r'})
        self.assertAlmostEqual(result['value'], 1.5, delta=1e-9)
        self.assertAlmostEqual(result['minimizer'][0], 1.0, delta=1e-6)
        self.assertGreater(result['delta'], 0.0)

    def test_missing_quadratic_growth_exits_3(self):
        with mock.patch('harness.cli.quad_growth_diag', side_effect=NoQuadraticGrowth("flat")):
            code, _ = self.run_cli('hopflax', '--potential', 'zero', '--n', '32', '--x', '0', '--t', '1')
        self.assertEqual(code, 3)


if __name__ == '__main__':
    unittest.main()
