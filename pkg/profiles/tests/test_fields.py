"""
Unit tests for profiles.fields, profiles.metric_spec and profiles.catalog
"""

import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import DomainError, SurfaceError
from profiles.catalog import (
    ACCEPTANCE_SET,
    catalog_entries,
    catalog_entry,
    flat_spec,
    schwarzschild_horizon,
    schwarzschild_profile,
)
from profiles.fields import (
    BumpField,
    EllipsoidalField,
    MultiSchwarzschildField,
    QuadraticField,
    RadialExprField,
    SineProductField,
    build_builtin,
)
from profiles.metric_spec import ExcisedComponent, MetricSpec, jet_at


def _fd_check(testcase, field, x, h=1e-5):
    """Gradient and Hessian of a field against central differences of the field itself."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    jet = field.jet(x)
    shifts = h * np.eye(n)
    plus = field.jet(x + shifts)
    minus = field.jet(x - shifts)
    grad_fd = (plus.value - minus.value) / (2 * h)
    hess_fd = (plus.gradient - minus.gradient) / (2 * h)
    scale = 1.0 + np.max(np.abs(jet.hessian))
    np.testing.assert_allclose(jet.gradient, grad_fd, atol=1e-6 * scale)
    np.testing.assert_allclose(jet.hessian, hess_fd, atol=1e-6 * scale)
    np.testing.assert_allclose(jet.hessian, jet.hessian.T, atol=1e-14 * scale)


class FieldTestCase(SimpleTestCase):
    """Tests for the compiled conformal factors"""

    def test_radial_hessian_on_axis(self):
        """On the e_1 axis the Hessian is diag(u'', u'/r, ..., u'/r)"""
        field = RadialExprField(5, "exp(-r^2) + 1/r")
        r = 1.7
        u, du, d2u = field.radial_derivatives(r, order=2)
        x = np.zeros(5)
        x[0] = r
        jet = field.jet(x)
        expected = np.diag([d2u] + [du / r] * 4)
        np.testing.assert_allclose(jet.hessian, expected, atol=1e-14)
        self.assertAlmostEqual(float(jet.value), u, places=14)

    def test_radial_matches_finite_differences(self):
        """Radial chain rule agrees with differences off-axis"""
        field = RadialExprField(6, "-c*ln(1 + m/(2*r^p))", params={'c': 2.0, 'm': 1.0, 'p': 1.0})
        rng = np.random.default_rng(3)
        for _ in range(10):
            _fd_check(self, field, rng.uniform(0.6, 2.0, size=6))

    def test_builtin_fields_match_finite_differences(self):
        """Every compiled field has a consistent 2-jet"""
        rng = np.random.default_rng(11)
        fields = [
            QuadraticField(5, rng.normal(size=(5, 5)), rng.normal(size=5), 0.3),
            SineProductField(5, amplitude=0.7),
            BumpField(5, epsilon=0.2, axes=[1.5, 1.0, 1.0, 0.8, 1.2]),
            EllipsoidalField(6, beta=0.4, axes=[2.0, 1.0, 1.0, 1.0, 1.0, 1.5]),
            MultiSchwarzschildField(6, 2, [0.5, 0.3], [[2.0] + [0.0] * 5, [-2.0] + [0.0] * 5]),
        ]
        for field in fields:
            for _ in range(5):
                x = rng.uniform(-0.7, 0.7, size=field.n) + 0.05
                if isinstance(field, (EllipsoidalField, MultiSchwarzschildField)):
                    x = x + 3.0
                _fd_check(self, field, x)

    def test_batched_jets_match_pointwise(self):
        """A batch of points gives the same jets as single points"""
        field = SineProductField(5)
        points = np.random.default_rng(5).normal(size=(4, 5))
        batch = field.jet(points)
        for i, x in enumerate(points):
            single = field.jet(x)
            np.testing.assert_allclose(batch.at(i).hessian, single.hessian)
            np.testing.assert_allclose(batch.at(i).gradient, single.gradient)

    def test_bump_vanishes_outside_support(self):
        """u and its derivatives are zero for q >= 1"""
        field = BumpField(5, epsilon=0.1, axes=[1.0, 2.0, 1.0, 1.0, 1.0])
        jet = field.jet(np.array([0.0, 2.5, 0.0, 0.0, 0.0]))
        self.assertEqual(float(jet.value), 0.0)
        self.assertFalse(np.any(jet.hessian))
        self.assertEqual(field.support_radius, 2.0)

    def test_multi_schwarzschild_total_mass(self):
        """Masses add"""
        field = build_builtin('multi_schwarzschild', 6, 2, {'masses': [0.5, 0.25], 'centers': [[3, 0, 0, 0, 0, 0], [-3, 0, 0, 0, 0, 0]]})
        self.assertEqual(field.total_mass, 0.75)
        self.assertFalse(field.is_radial)

    def test_unknown_builtin(self):
        """Unknown names raise DomainError"""
        with self.assertRaises(DomainError):
            build_builtin('wormhole', 5, 1, {})

    def test_missing_parameter(self):
        """shifted_schwarzschild needs a mass"""
        with self.assertRaises(DomainError):
            build_builtin('shifted_schwarzschild', 5, 1, {'center': [0, 0, 0, 0, 1]})


class CatalogTestCase(SimpleTestCase):
    """Tests for the Schwarzschild catalog"""

    def test_horizon_five_one_two(self):
        """(5,1,2) -> r0 = 1"""
        spec = schwarzschild_profile(5, 1, 2.0)
        self.assertAlmostEqual(spec.horizon_radius, 1.0, places=14)
        self.assertEqual(spec.expected_mass, 2.0)

    def test_horizon_six_two_one(self):
        """(6,2,1) -> r0 = 1/2"""
        spec = schwarzschild_profile(6, 2, 1.0)
        self.assertAlmostEqual(spec.horizon_radius, 0.5, places=14)
        self.assertEqual(spec.tau, 1.0)
        self.assertEqual(spec.expected_mass, 1.0)

    def test_derivative_at_ten(self):
        """(5,1,2): u'(10) = m r^-4 / (1 + m/(2 r^3))"""
        spec = schwarzschild_profile(5, 1, 2.0)
        _, du = spec.field.radial_derivatives(10.0, order=1)
        self.assertAlmostEqual(du, 2e-4 / (1 + 1e-3), places=16)
        self.assertAlmostEqual(du, 1.998e-4, delta=1e-7)

    def test_small_mass_is_nearly_flat(self):
        """m -> 0 makes u -> 0"""
        spec = schwarzschild_profile(5, 1, 1e-12)
        u, _ = spec.field.radial_derivatives(2.0, order=1)
        self.assertLess(abs(u), 1e-12)

    def test_decay_condition(self):
        """r^(tau+j) |d^j u| stays bounded for j = 0, 1, 2"""
        for n, k, m in ACCEPTANCE_SET:
            spec = schwarzschild_profile(n, k, m)
            tau = spec.tau
            scaled = []
            for r in (10.0, 100.0, 1000.0):
                derivs = spec.field.radial_derivatives(r, order=2)
                scaled.append([r ** (tau + j) * abs(derivs[j]) for j in range(3)])
            scaled = np.array(scaled)
            self.assertTrue(np.all(scaled[1:] <= 1.5 * scaled[0] + 1e-12), (n, k, m))

    def test_rejects_bad_parameters(self):
        """2k >= n and m <= 0 are domain errors"""
        with self.assertRaises(DomainError):
            schwarzschild_profile(4, 2, 1.0)
        with self.assertRaises(DomainError):
            schwarzschild_profile(5, 1, 0.0)

    def test_catalog_lookup(self):
        """Entries are addressable by label"""
        self.assertEqual(len(catalog_entries()), 6)
        spec = catalog_entry('schwarzschild-n7-k3-m1')
        self.assertEqual((spec.n, spec.k), (7, 3))
        with self.assertRaises(DomainError):
            catalog_entry('nothing')

    def test_horizon_formula(self):
        """(m/2)^(k/(n-2k))"""
        self.assertAlmostEqual(schwarzschild_horizon(7, 2, 4.0), 2.0 ** (2.0 / 3.0), places=14)


class MetricSpecTestCase(SimpleTestCase):
    """Tests for MetricSpec and jet_at"""

    def test_flat_zero_jet(self):
        """flat spec gives a zero jet"""
        jet = jet_at(flat_spec(5, 1), np.array([1.0, 2.0, 3.0, 4.0, 5.0]))
        self.assertEqual(float(jet.value), 0.0)
        self.assertFalse(np.any(jet.gradient))
        self.assertFalse(np.any(jet.hessian))

    def test_point_inside_excision(self):
        """Points inside the horizon are refused with their location"""
        spec = schwarzschild_profile(5, 1, 2.0)
        with self.assertRaises(SurfaceError) as ctx:
            jet_at(spec, np.array([0.5, 0.0, 0.0, 0.0, 0.0]))
        self.assertEqual(ctx.exception.point, [0.5, 0.0, 0.0, 0.0, 0.0])

    def test_point_on_horizon_allowed(self):
        """The boundary itself is admissible"""
        spec = schwarzschild_profile(5, 1, 2.0)
        jet = jet_at(spec, np.array([0.0, 1.0, 0.0, 0.0, 0.0]))
        self.assertTrue(math.isfinite(float(jet.value)))

    def test_singular_center(self):
        """The origin of an unexcised radial profile is singular"""
        spec = schwarzschild_profile(5, 1, 2.0, excise=False)
        with self.assertRaises(SurfaceError):
            jet_at(spec, np.zeros(5))

    def test_decay_threshold(self):
        """tau must exceed (n-2k)/(k+1)"""
        spec = schwarzschild_profile(6, 2, 1.0)
        self.assertAlmostEqual(spec.decay_threshold, 2.0 / 3.0)
        self.assertTrue(spec.is_well_defined)
        slow = MetricSpec(n=6, k=2, field=spec.field, tau=0.5)
        self.assertFalse(slow.is_well_defined)
        self.assertEqual(spec.convergence_exponent, 1.0)

    def test_validation(self):
        """Dimension, order and field dimension are checked"""
        field = RadialExprField(5, "1/r")
        with self.assertRaises(DomainError):
            MetricSpec(n=5, k=3, field=field, tau=1.0)
        with self.assertRaises(DomainError):
            MetricSpec(n=6, k=1, field=field, tau=1.0)
        with self.assertRaises(DomainError):
            MetricSpec(n=9, k=1, field=RadialExprField(9, "1/r"), tau=1.0)

    def test_inner_radius(self):
        """Smallest origin ball containing every component"""
        components = (
            ExcisedComponent('sphere', (3.0, 0.0, 0.0, 0.0, 0.0), radius=0.5),
            ExcisedComponent('ellipsoid', (0.0,) * 5, axes=(1.0, 2.0, 1.0, 1.0, 1.0)),
        )
        spec = MetricSpec(n=5, k=1, field=RadialExprField(5, "1/r"), tau=3.0, excised=components)
        self.assertAlmostEqual(spec.inner_radius, 3.5)

    def test_with_k_drops_expected_mass(self):
        """Changing k forgets the catalog oracle"""
        spec = schwarzschild_profile(7, 2, 1.0).with_k(1)
        self.assertEqual(spec.k, 1)
        self.assertIsNone(spec.expected_mass)
