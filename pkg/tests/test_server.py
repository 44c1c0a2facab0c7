import os
import unittest
from unittest import mock

from core.config import SERVER_DATA_DIR, SERVER_MAX_POINTS_2D
from core.errors import NonConvergence, NoQuadraticGrowth
from server.app import create_app
from server.models import CellRequest, HopfLaxRequest
from server.validation import RequestError


class TestRequestModels(unittest.TestCase):
    def test_defaults(self):
        req = CellRequest.from_json({'p': 0.5})
        self.assertEqual((req.potential, req.dim, req.p), ('cosine', 1, [0.5]))
        self.assertEqual(CellRequest.from_json({'p': [0.0, 0.0], 'dim': 2}).n, SERVER_MAX_POINTS_2D)

    def test_rejects_malformed_bodies(self):
        with self.assertRaises(RequestError):
            CellRequest.from_json(None)
        with self.assertRaises(RequestError):
            CellRequest.from_json({'p': [0.5], 'dim': 2})
        with self.assertRaises(RequestError):
            CellRequest.from_json({'p': [True]})
        with self.assertRaises(RequestError):
            HopfLaxRequest.from_json({'x': 0.0, 't': -1})

    def test_catalog_names_and_data_files(self):
        self.assertEqual(CellRequest.from_json({'p': 0.0, 'potential': 'random-trig:3'}).potential, 'random-trig:3')
        req = CellRequest.from_json({'p': 0.0, 'potential': 'bumps'})
        self.assertEqual(req.potential, os.path.join(SERVER_DATA_DIR, 'bumps'))
        with self.assertRaises(RequestError):
            CellRequest.from_json({'p': 0.0, 'potential': '.hidden'})


class TestLabRoutes(unittest.TestCase):
    def setUp(self):
        self.client = create_app().test_client()

    def test_health(self):
        resp = self.client.get('/api/health')
        self.assertEqual(resp.status_code, 200)
        self.assertEqual(resp.get_json(), {'status': 'ok'})

    def test_cell(self):
        resp = self.client.post('/api/cell', json={'p': [1.0], 'potential': 'constant:0.5', 'n': 32})
        self.assertEqual(resp.status_code, 200)
        self.assertAlmostEqual(resp.get_json()['hbar'], 1.0, places=12)

    def test_missing_field(self):
        resp = self.client.post('/api/cell', json={'potential': 'cosine'})
        self.assertEqual(resp.status_code, 400)
        self.assertIn('p', resp.get_json()['error'])

    def test_out_of_range_is_bad_input(self):
        resp = self.client.post('/api/lagrangian', json={'q': [30.0], 'n': 32})
        self.assertEqual(resp.status_code, 400)
        self.assertEqual(resp.get_json()['kind'], 'OperatingRangeError')

    def test_hopflax(self):
        resp = self.client.post('/api/hopflax', json={'x': 2.0, 't': 1.0, 'potential': 'zero', 'n': 32})
        self.assertEqual(resp.status_code, 200)
        self.assertAlmostEqual(resp.get_json()['value'], 1.5, delta=1e-9)
        self.assertEqual(set(resp.get_json()), {'value', 'minimizer', 'delta', 'r'})
        self.assertGreater(resp.get_json()['delta'], 0.0)

    def test_missing_quadratic_growth_is_bad_input(self):
        with mock.patch('server.routes.lab.quad_growth_diag', side_effect=NoQuadraticGrowth("flat")):
            resp = self.client.post('/api/hopflax', json={'x': 0.0, 't': 1.0, 'potential': 'zero', 'n': 32})
        self.assertEqual(resp.status_code, 400)
        self.assertEqual(resp.get_json()['kind'], 'NoQuadraticGrowth')

    def test_resolution_limits(self):
        for body in ({'p': 0.0, 'n': 48}, {'p': 0.0, 'n': 4096}, {'p': [0.0, 0.0], 'dim': 2, 'n': 128}):
            resp = self.client.post('/api/cell', json=body)
            self.assertEqual(resp.status_code, 400, body)
            self.assertEqual(resp.get_json()['kind'], 'RequestError')

    def test_paths_outside_the_data_directory(self):
        resp = self.client.post('/api/cell', json={'p': 0.0, 'n': 32, 'potential': '../etc/passwd'})
        self.assertEqual(resp.status_code, 400)
        resp = self.client.post('/api/hopflax', json={'x': 0.0, 't': 1.0, 'n': 32, 'data': '/etc/passwd'})
        self.assertEqual(resp.status_code, 400)

    def test_bloch(self):
        resp = self.client.post('/api/bloch', json={'drift': 'constant:0.5', 'n': 32})
        self.assertEqual(resp.status_code, 200)
        body = resp.get_json()
        self.assertAlmostEqual(body['b_bar'][0], 0.5, delta=1e-10)
        self.assertAlmostEqual(body['Q'][0][0], 1.0, delta=1e-10)

    def test_solver_failure(self):
        with mock.patch('server.routes.lab.solve_cell', side_effect=NonConvergence("no luck")):
            resp = self.client.post('/api/cell', json={'p': 0.0, 'n': 32})
        self.assertEqual(resp.status_code, 422)
        self.assertEqual(resp.get_json()['kind'], 'NonConvergence')


if __name__ == '__main__':
    unittest.main()
