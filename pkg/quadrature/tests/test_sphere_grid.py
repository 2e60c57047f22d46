"""
Unit tests for quadrature.sphere_grid and quadrature.cache_utils

Weight sums, monomial exactness and the grid cache.
"""

import itertools
import math

import numpy as np
from django.core.cache import cache
from django.test import SimpleTestCase
from scipy.special import gamma

from core.exceptions import DomainError
from quadrature.cache_utils import _generate_cache_key, cached
from quadrature.sphere_grid import build_grid, default_degree, sphere_volume


def monomial_integral(alpha):
    """Closed form of the sphere integral of x^alpha over S^{n-1}."""
    if any(a % 2 for a in alpha):
        return 0.0
    betas = [(a + 1) / 2.0 for a in alpha]
    return 2.0 * math.prod(gamma(b) for b in betas) / gamma(sum(betas))


class SphereVolumeTestCase(SimpleTestCase):
    """Tests for sphere_volume and default_degree"""

    def test_known_values(self):
        """omega_3 = 2 pi^2, omega_4 = 8 pi^2 / 3, omega_5 = pi^3"""
        self.assertAlmostEqual(sphere_volume(4), 2 * math.pi ** 2, places=12)
        self.assertAlmostEqual(sphere_volume(5), 8 * math.pi ** 2 / 3, places=12)
        self.assertAlmostEqual(sphere_volume(6), math.pi ** 3, places=12)

    def test_default_degree(self):
        self.assertEqual(default_degree(5), 15)
        self.assertEqual(default_degree(6), 15)
        self.assertEqual(default_degree(7), 11)
        self.assertEqual(default_degree(8), 11)


class BuildGridTestCase(SimpleTestCase):
    """Tests for build_grid"""

    def test_weights_sum_to_sphere_volume(self):
        """Sum of weights is omega_{n-1} to 1e-12 relative for every n"""
        for n in range(4, 9):
            grid = build_grid(n, 5)
            omega = sphere_volume(n)
            self.assertLess(abs(grid.weights.sum() - omega) / omega, 1e-12, msg=f"n={n}")

    def test_n5_weight_sum(self):
        """n=5: weights sum to 8 pi^2 / 3 ~ 26.3189"""
        self.assertAlmostEqual(build_grid(5, 9).weights.sum(), 26.3189, places=4)

    def test_weights_positive_and_nodes_unit(self):
        grid = build_grid(6, 7)
        self.assertTrue(np.all(grid.weights > 0))
        np.testing.assert_allclose(np.linalg.norm(grid.nodes, axis=1), 1.0, atol=1e-14)
        self.assertEqual(grid.nodes.shape, (grid.size, 6))

    def test_odd_moment_vanishes(self):
        """Integral of x_1 is zero"""
        grid = build_grid(5, 7)
        self.assertAlmostEqual(float(grid.weights @ grid.nodes[:, 0]), 0.0, places=13)

    def test_second_moment(self):
        """n=6: integral of x_1^2 is omega_5 / 6 = pi^3 / 6"""
        grid = build_grid(6, 7)
        self.assertAlmostEqual(float(grid.weights @ grid.nodes[:, 0] ** 2), math.pi ** 3 / 6, places=12)

    def test_fourth_moment(self):
        """Integral of x_1^4 is 3 omega / (n (n + 2))"""
        for n in (4, 7):
            grid = build_grid(n, 7)
            expected = 3 * sphere_volume(n) / (n * (n + 2))
            self.assertAlmostEqual(float(grid.weights @ grid.nodes[:, 0] ** 4), expected, places=11)

    def test_all_monomials_up_to_degree(self):
        """Every monomial of total degree <= D is integrated exactly"""
        for n, degree in ((4, 6), (5, 5)):
            grid = build_grid(n, degree)
            omega = sphere_volume(n)
            for total in range(degree + 1):
                for combo in itertools.combinations_with_replacement(range(n), total):
                    alpha = [combo.count(i) for i in range(n)]
                    values = np.prod(grid.nodes ** np.array(alpha), axis=1)
                    got = float(grid.weights @ values)
                    self.assertLess(
                        abs(got - monomial_integral(alpha)), 1e-11 * omega,
                        msg=f"n={n} alpha={alpha}",
                    )

    def test_scaled_nodes(self):
        grid = build_grid(4, 3)
        points = grid.scaled(2.0, center=[1.0, 0.0, 0.0, 0.0])
        np.testing.assert_allclose(np.linalg.norm(points - [1.0, 0.0, 0.0, 0.0], axis=1), 2.0)

    def test_unsupported_dimension(self):
        """n outside 4..8 raises DomainError"""
        with self.assertRaises(DomainError):
            build_grid(3, 5)
        with self.assertRaises(DomainError):
            build_grid(9, 5)

    def test_unsupported_degree(self):
        with self.assertRaises(DomainError):
            build_grid(5, 0)
        with self.assertRaises(DomainError):
            build_grid(5, 31)

    def test_describe(self):
        grid = build_grid(4, 3)
        self.assertEqual(grid.describe(), {'n': 4, 'degree': 3, 'nodes': 4 * 2 * 2})


class GridCacheTestCase(SimpleTestCase):
    """Tests for the cached decorator as used by build_grid"""

    def setUp(self):
        cache.clear()
        self.call_count = 0

    def test_grid_reused_from_cache(self):
        """A second build returns the cached grid"""
        first = build_grid(5, 4)
        key = _generate_cache_key(build_grid.__wrapped__, (5, 4), {}, 'sphere_grid')
        self.assertIsNotNone(cache.get(key))
        second = build_grid(5, 4)
        np.testing.assert_array_equal(first.nodes, second.nodes)
        np.testing.assert_array_equal(first.weights, second.weights)

    def test_cache_info(self):
        self.assertEqual(build_grid.cache_info()['prefix'], 'sphere_grid')
        self.assertEqual(build_grid.cache_info()['function'], 'build_grid')

    def test_cache_hit_on_second_call(self):
        """Second call with the same args does not execute the function"""

        @cached(ttl_seconds=60, key_prefix='test')
        def expensive(x, y):
            self.call_count += 1
            return x + y

        self.assertEqual(expensive(2, 3), 5)
        self.assertEqual(expensive(2, 3), 5)
        self.assertEqual(self.call_count, 1)
        self.assertEqual(expensive(3, 3), 6)
        self.assertEqual(self.call_count, 2)

    def test_dict_ordering_independence(self):
        """Dict key order does not change the cache key"""
        a = _generate_cache_key(build_grid, ({'b': 2, 'a': 1},), {}, 'p')
        b = _generate_cache_key(build_grid, ({'a': 1, 'b': 2},), {}, 'p')
        self.assertEqual(a, b)
        self.assertEqual(len(a), 32)

    def test_numpy_scalars_share_keys(self):
        """build_grid(np.int64(5), 4) hits the entry of build_grid(5, 4)"""
        a = _generate_cache_key(build_grid, (5, 4), {}, 'sphere_grid')
        b = _generate_cache_key(build_grid, (np.int64(5), np.int32(4)), {}, 'sphere_grid')
        self.assertEqual(a, b)

    def test_unhashable_argument_bypasses_cache(self):
        """Arguments without a stable key run uncached with a warning"""

        @cached(ttl_seconds=60, key_prefix='test')
        def total(values):
            self.call_count += 1
            return float(np.sum(values))

        with self.assertLogs('quadrature.cache_utils', level='WARNING'):
            total(np.ones(3))
        total(np.ones(3))
        self.assertEqual(self.call_count, 2)
