"""
Tests for RunConfig resolution and the exit-code mapping
"""

from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from core.exceptions import DomainError, PreconditionError, SpecError, WellDefinednessError
from core.run_config import EXIT_ERROR, EXIT_REFUSED, exit_codes, resolve_run_config


class ResolveRunConfigTestCase(SimpleTestCase):
    """Tests for resolve_run_config"""

    @override_settings(GBC_THREADS=3, GBC_SEED=11)
    def test_settings_fill_missing_flags(self):
        config = resolve_run_config('mass', {'metric': 'spec.json', 'threads': None, 'seed': None})
        self.assertEqual(config.threads, 3)
        self.assertEqual(config.seed, 11)

    @override_settings(GBC_THREADS=3)
    def test_flag_beats_setting(self):
        """An explicit --threads wins over GBC_THREADS"""
        config = resolve_run_config('mass', {'metric': 'spec.json', 'threads': 2})
        self.assertEqual(config.threads, 2)

    def test_bad_degree(self):
        with self.assertRaises(PreconditionError):
            resolve_run_config('mass', {'degree': 0})
        with self.assertRaises(PreconditionError):
            resolve_run_config('mass', {'degree': 99})

    def test_bad_threads_and_k(self):
        with self.assertRaises(PreconditionError):
            resolve_run_config('mass', {'threads': 0})
        with self.assertRaises(PreconditionError):
            resolve_run_config('mass', {'k': 0})

    @override_settings(GBC_DEFAULT_RADII='geometric:10,80,4')
    def test_default_radii(self):
        """An empty --radii falls back to GBC_DEFAULT_RADII"""
        config = resolve_run_config('mass', {'radii': None})
        self.assertEqual(len(config.radii.radii), 4)
        self.assertAlmostEqual(config.radii.radii[-1], 80.0)

    def test_list_radii(self):
        config = resolve_run_config('mass', {'radii': 'list:10,20,40,80'})
        self.assertEqual(config.radii.to_dict()['radii'], [10.0, 20.0, 40.0, 80.0])

    def test_malformed_radii(self):
        with self.assertRaises(DomainError):
            resolve_run_config('mass', {'radii': 'list:10,5,40'})

    def test_no_radii_for_verify(self):
        """Commands without --radii carry no schedule"""
        config = resolve_run_config('verify', {'seed': 3})
        self.assertIsNone(config.radii)
        self.assertIsNone(config.to_dict()['radii'])


class ExitCodesTestCase(SimpleTestCase):
    """Tests for the exit_codes context manager"""

    def test_refusal(self):
        with self.assertRaises(CommandError) as ctx:
            with exit_codes():
                raise WellDefinednessError('tau too small', tau=0.5, threshold=1.5)
        self.assertEqual(ctx.exception.returncode, EXIT_REFUSED)

    def test_spec_and_io_errors(self):
        for exc in (SpecError('bad document'), FileNotFoundError('missing.json')):
            with self.subTest(exc=type(exc).__name__):
                with self.assertRaises(CommandError) as ctx:
                    with exit_codes():
                        raise exc
                self.assertEqual(ctx.exception.returncode, EXIT_ERROR)

    def test_other_errors_propagate(self):
        with self.assertRaises(ZeroDivisionError):
            with exit_codes():
                raise ZeroDivisionError
