"""
Unit tests for quadrature.integrals and quadrature.schedule
"""

import math

import numpy as np
from django.test import SimpleTestCase, override_settings

from core.exceptions import DomainError, ExprDomainError, SurfaceError
from quadrature.integrals import ball_integral, radial_rule, surface_integral, volume_integral
from quadrature.schedule import (
    RadiusSchedule,
    default_schedule,
    geometric,
    log_slope,
    parse_schedule,
)
from quadrature.sphere_grid import build_grid, sphere_volume


class SurfaceIntegralTestCase(SimpleTestCase):
    """Tests for surface_integral"""

    def setUp(self):
        self.grid = build_grid(5, 7)
        self.omega = sphere_volume(5)

    def test_constant(self):
        """f = 1 gives omega r^{n-1}"""
        value = surface_integral(lambda x: np.ones(len(x)), self.grid, 3.0)
        self.assertAlmostEqual(value / (self.omega * 3.0 ** 4), 1.0, places=12)

    def test_odd_function(self):
        """f = x_1 / r integrates to zero"""
        value = surface_integral(lambda x: x[:, 0] / 2.0, self.grid, 2.0)
        self.assertLess(abs(value), 1e-12)

    def test_radial_function(self):
        """A radial g(r) collapses to omega r^{n-1} g(r)"""
        g = lambda x: np.exp(-np.linalg.norm(x, axis=1))
        value = surface_integral(g, self.grid, 1.5)
        self.assertAlmostEqual(value, self.omega * 1.5 ** 4 * math.exp(-1.5), places=11)

    def test_scalar_return_broadcasts(self):
        value = surface_integral(lambda x: 2.0, self.grid, 1.0)
        self.assertAlmostEqual(value, 2.0 * self.omega, places=12)

    def test_linearity(self):
        f = lambda x: x[:, 0] ** 2
        h = lambda x: x[:, 1] * x[:, 2] + 1.0
        combined = surface_integral(lambda x: 2.0 * f(x) - 3.0 * h(x), self.grid, 1.7)
        separate = 2.0 * surface_integral(f, self.grid, 1.7) - 3.0 * surface_integral(h, self.grid, 1.7)
        self.assertAlmostEqual(combined, separate, places=10)

    def test_scaling_for_r_independent_function(self):
        """Node functions of theta only scale as r^{n-1}"""
        f = lambda x: (x[:, 0] / np.linalg.norm(x, axis=1)) ** 2
        ratio = surface_integral(f, self.grid, 4.0) / surface_integral(f, self.grid, 1.0)
        self.assertAlmostEqual(ratio, 4.0 ** 4, places=9)

    def test_chunking_does_not_change_result(self):
        f = lambda x: x[:, 0] ** 2 + x[:, 1]
        self.assertEqual(
            surface_integral(f, self.grid, 1.3, chunk=7),
            surface_integral(f, self.grid, 1.3),
        )

    def test_centered_sphere(self):
        center = [1.0, 2.0, 0.0, 0.0, 0.0]
        f = lambda x: x[:, 1]
        self.assertAlmostEqual(surface_integral(f, self.grid, 0.5, center=center), 2.0 * self.omega * 0.5 ** 4, places=11)

    def test_non_finite_value_names_node(self):
        """A non-finite value raises DomainError with the node location"""
        f = lambda x: np.where(x[:, 0] > 0.0, np.inf, 1.0)
        with self.assertRaisesRegex(DomainError, 'node'):
            surface_integral(f, self.grid, 1.0)

    def test_evaluation_error_gets_node_range(self):
        def f(x):
            raise ExprDomainError('ln of non-positive value', 'ln(r - 2)')

        with self.assertRaisesRegex(DomainError, r'nodes 0\.\.'):
            surface_integral(f, self.grid, 1.0)

    def test_surface_error_passes_through(self):
        def f(x):
            raise SurfaceError('inside excised region', point=x[0])

        with self.assertRaises(SurfaceError):
            surface_integral(f, self.grid, 1.0)


class VolumeIntegralTestCase(SimpleTestCase):
    """Tests for volume_integral and radial_rule"""

    def test_annulus_volume(self):
        """Volume of 1 < |x| < 2 in R^4 is omega (2^4 - 1) / 4"""
        grid = build_grid(4, 3)
        value = volume_integral(lambda x: np.ones(len(x)), grid, 1.0, 2.0, shells=4, order=4)
        self.assertAlmostEqual(value, sphere_volume(4) * 15.0 / 4.0, places=10)

    def test_radial_power(self):
        """|x|^2 over 1 < |x| < 3 in R^5"""
        grid = build_grid(5, 3)
        f = lambda x: np.sum(x ** 2, axis=1)
        expected = sphere_volume(5) * (3.0 ** 7 - 1.0) / 7.0
        self.assertAlmostEqual(volume_integral(f, grid, 1.0, 3.0) / expected, 1.0, places=10)

    def test_radial_rule_covers_interval(self):
        radii, weights = radial_rule(0.5, 8.0, 5, 3)
        self.assertEqual(len(radii), 15)
        self.assertAlmostEqual(weights.sum(), 7.5, places=12)
        self.assertTrue(np.all((radii > 0.5) & (radii < 8.0)))

    def test_bad_interval(self):
        with self.assertRaises(DomainError):
            radial_rule(2.0, 1.0, 4, 4)


class ScheduleTestCase(SimpleTestCase):
    """Tests for RadiusSchedule and parse_schedule"""

    def test_default_geometric(self):
        """geometric:10,160,5 is 10 20 40 80 160"""
        schedule = parse_schedule('geometric:10,160,5')
        np.testing.assert_allclose(schedule.radii, [10, 20, 40, 80, 160], rtol=1e-14)
        self.assertEqual(schedule.r_max, 160.0)
        self.assertEqual(schedule.text, 'geometric:10,160,5')

    def test_list_schedule(self):
        schedule = parse_schedule('list:1,2.5,7')
        self.assertEqual(schedule.radii, (1.0, 2.5, 7.0))

    def test_rejections(self):
        """Malformed or invalid schedules raise DomainError"""
        for text in ('geometric:10,160', 'geometric:10,160,2', 'geometric:160,10,5',
                     'geometric:10,160,4.5', 'list:1,2', 'list:3,2,1', 'list:-1,2,3',
                     'spiral:1,2,3', 'geometric:a,b,c'):
            with self.assertRaises(DomainError, msg=text):
                parse_schedule(text)

    def test_with_exponent(self):
        schedule = geometric(1.0, 4.0, 3).with_exponent(2.0)
        self.assertEqual(schedule.exponent, 2.0)
        self.assertEqual(schedule.radii, (1.0, 2.0, 4.0))

    @override_settings(GBC_DEFAULT_RADII='geometric:5,40,4')
    def test_default_from_settings(self):
        np.testing.assert_allclose(default_schedule().radii, [5, 10, 20, 40])

    def test_direct_construction_validates(self):
        with self.assertRaises(DomainError):
            RadiusSchedule((1.0, 1.0, 2.0))

    def test_log_slope(self):
        radii = [10.0, 20.0, 40.0, 80.0]
        self.assertAlmostEqual(log_slope(radii, [r ** -2.0 for r in radii]), -2.0, places=10)


class BallIntegralTestCase(SimpleTestCase):
    """Tests for ball_integral"""

    def test_ball_volume(self):
        """Volume of the unit ball in R^6 is pi^3 / 6"""
        grid = build_grid(6, 3)
        value = ball_integral(lambda x: np.ones(len(x)), grid, 1.0, order=4)
        self.assertAlmostEqual(value, math.pi ** 3 / 6, places=12)

    def test_rejects_zero_radius(self):
        with self.assertRaises(DomainError):
            ball_integral(lambda x: 1.0, build_grid(4, 3), 0.0)
