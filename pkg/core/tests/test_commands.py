"""
Tests for the mass, verify and penrose management commands
"""

import csv
import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase


class CommandTestCase(SimpleTestCase):
    """Temporary directory with helpers for spec documents and reports"""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def write_spec(self, payload, name='spec.json'):
        path = self.tmp / name
        path.write_text(json.dumps(payload), encoding='utf-8')
        return str(path)

    def run_command(self, *args):
        out = StringIO()
        call_command(*args, stdout=out)
        return out.getvalue()

    def read_report(self, name='report.json'):
        return json.loads((self.tmp / name).read_text(encoding='utf-8'))


class MassCommandTestCase(CommandTestCase):
    """Tests for `manage.py mass`"""

    def test_flat(self):
        """Flat spec: mass 0, exit 0"""
        spec = self.write_spec({'dimension': 5, 'k': 1, 'type': 'flat'})
        self.run_command('mass', '--metric', spec, '--out', str(self.tmp / 'report.json'))
        report = self.read_report()
        self.assertAlmostEqual(report['mass'], 0.0, places=10)
        self.assertEqual(report['evaluator'], 'spherical')

    def test_schwarzschild(self):
        """(6,2,1): m_2 ~ 1, report embeds version and config"""
        spec = self.write_spec({'dimension': 6, 'k': 2, 'type': 'schwarzschild', 'mass_param': 1.0})
        output = self.run_command(
            'mass', '--metric', spec, '--out', str(self.tmp / 'report.json'), '--csv', str(self.tmp / 'flux.csv')
        )
        report = self.read_report()
        self.assertLess(abs(report['mass'] - 1.0), 0.01)
        self.assertTrue(report['within_oracle'])
        self.assertIn('version', report)
        self.assertEqual(report['config']['command'], 'mass')
        self.assertEqual(report['config']['radii']['radii'][0], 10.0)
        self.assertIn('m_2 =', output)
        with open(self.tmp / 'flux.csv', newline='') as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(rows[0], ['evaluator', 'radius', 'flux'])
        self.assertEqual(len(rows), 6)

    def test_sorted_keys_on_stdout(self):
        spec = self.write_spec({'dimension': 5, 'k': 1, 'type': 'schwarzschild', 'mass_param': 2.0})
        report = json.loads(self.run_command('mass', '--metric', spec))
        self.assertEqual(list(report), sorted(report))

    def test_all_evaluators(self):
        """Definition, both equivalent variants and spherical agree"""
        spec = self.write_spec({'dimension': 5, 'k': 1, 'type': 'schwarzschild', 'mass_param': 2.0})
        self.run_command('mass', '--metric', spec, '--evaluator', 'all', '--degree', '1',
                         '--out', str(self.tmp / 'report.json'))
        report = self.read_report()
        evaluators = [e['evaluator'] for e in report['evaluations']]
        self.assertEqual(evaluators, ['definition', 'equivalent', 'equivalent_hessian', 'spherical'])
        self.assertTrue(report['agreement']['within_errors'])

    def test_lower_bound_and_audit(self):
        spec = self.write_spec({'dimension': 5, 'k': 1, 'type': 'schwarzschild', 'mass_param': 2.0})
        self.run_command('mass', '--metric', spec, '--lower-bound', '--audit', '--out', str(self.tmp / 'report.json'))
        report = self.read_report()
        self.assertTrue({'lk_term', 'grad_term', 'r_max'} <= set(report['lower_bound']))
        self.assertIn('verdict', report['hypotheses']['positivity'])

    def test_refusal_exit_code(self):
        """tau below (n-2k)/(k+1) exits with 2"""
        spec = self.write_spec({
            'dimension': 5, 'k': 1, 'type': 'radial_expr', 'expr': '1/(1+r^2)^0.25', 'tau': 0.5,
        })
        with self.assertRaises(CommandError) as ctx:
            self.run_command('mass', '--metric', spec)
        self.assertEqual(ctx.exception.returncode, 2)

    def test_missing_file(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_command('mass', '--metric', str(self.tmp / 'missing.json'))
        self.assertEqual(ctx.exception.returncode, 1)

    def test_unknown_field(self):
        spec = self.write_spec({'dimension': 5, 'k': 1, 'type': 'flat', 'colour': 'blue'})
        with self.assertRaises(CommandError) as ctx:
            self.run_command('mass', '--metric', spec)
        self.assertEqual(ctx.exception.returncode, 1)

    def test_bad_degree(self):
        """Numeric options are validated before any computation"""
        spec = self.write_spec({'dimension': 5, 'k': 1, 'type': 'flat'})
        with self.assertRaises(CommandError) as ctx:
            self.run_command('mass', '--metric', spec, '--degree', '99')
        self.assertEqual(ctx.exception.returncode, 1)

    def test_spherical_on_anisotropic_spec(self):
        spec = self.write_spec({'dimension': 5, 'k': 2, 'type': 'builtin:bump'})
        with self.assertRaises(CommandError) as ctx:
            self.run_command('mass', '--metric', spec, '--evaluator', 'spherical')
        self.assertEqual(ctx.exception.returncode, 1)


class VerifyCommandTestCase(CommandTestCase):
    """Tests for `manage.py verify`"""

    def test_single_suite(self):
        """--suite quadrature runs only that suite"""
        self.run_command('verify', '--suite', 'quadrature', '--out', str(self.tmp / 'report.json'))
        report = self.read_report()
        self.assertTrue(report['passed'])
        self.assertEqual(report['suites'], ['quadrature'])
        self.assertEqual(report['seed'], 42)

    def test_injected_failure(self):
        """An injected perturbation exits with 3 and names the seed"""
        with self.assertRaises(CommandError) as ctx:
            self.run_command('verify', '--suite', 'quadrature', '--seed', '5', '--inject', '0.1',
                             '--out', str(self.tmp / 'report.json'))
        self.assertEqual(ctx.exception.returncode, 3)
        self.assertIn('seed 5', str(ctx.exception))
        report = self.read_report()
        self.assertFalse(report['passed'])
        self.assertIn('inputs', report['checks'][0]['failing_case'])


class PenroseCommandTestCase(CommandTestCase):
    """Tests for `manage.py penrose`"""

    def test_schwarzschild(self):
        """(6,2,1): both verdicts pass, ratio 4"""
        spec = self.write_spec({'dimension': 6, 'k': 2, 'type': 'schwarzschild', 'mass_param': 1.0})
        self.run_command('penrose', '--metric', spec, '--degree', '3', '--no-volume',
                         '--out', str(self.tmp / 'report.json'))
        report = self.read_report()
        self.assertEqual(report['verdicts'], {'area': 'pass', 'scalar': 'pass'})
        self.assertLess(abs(report['ratio'] - 4.0), 0.04)

    def test_not_a_horizon(self):
        """Excising the sphere of radius 2 r0 withholds the verdicts but still exits 0"""
        spec = self.write_spec({
            'dimension': 6, 'k': 2, 'type': 'schwarzschild', 'mass_param': 1.0, 'excised_radius': 1.0,
        })
        self.run_command('penrose', '--metric', spec, '--degree', '3', '--no-volume',
                         '--out', str(self.tmp / 'report.json'))
        report = self.read_report()
        self.assertEqual(report['verdicts']['area'], 'withheld')
        self.assertFalse(report['hypothesis_certificates'][0]['horizon']['is_horizon'])

    def test_missing_boundary(self):
        spec = self.write_spec({'dimension': 5, 'k': 1, 'type': 'flat'})
        with self.assertRaises(CommandError) as ctx:
            self.run_command('penrose', '--metric', spec, '--no-volume')
        self.assertEqual(ctx.exception.returncode, 1)
