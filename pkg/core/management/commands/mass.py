"""
Django Management Command: mass

Evaluates the Gauss-Bonnet-Chern mass m_k of the metric described by a
metric-spec document and writes a JSON report (plus an optional CSV of the
per-radius flux values).

Usage:
    python manage.py mass --metric specs/schwarzschild_6_2.json
    python manage.py mass --metric spec.json --evaluator all --degree 5
    python manage.py mass --metric spec.json --radii geometric:10,320,6 --out report.json --csv flux.csv
    python manage.py mass --metric spec.json --lower-bound --audit

Exit codes: 0 success, 1 I/O or spec error, 2 mass not well defined.
"""

import logging

from django.core.management.base import BaseCommand

from core.exceptions import DomainError
from core.reporting import envelope, write_csv, write_json
from core.run_config import EVALUATOR_CHOICES, add_common_arguments, exit_codes, resolve_run_config
from mass.audit import positivity_audit
from mass.evaluators import EVALUATORS, evaluate
from mass.lower_bound import mass_lower_bound
from mass.reports import CSV_HEADER, MassReport
from profiles.documents import load_metric_spec
from quadrature.sphere_grid import build_grid

logger = logging.getLogger(__name__)


def select_evaluators(spec, choice):
    """
    Evaluator names for a --evaluator choice.

    No choice means 'spherical' for radial specs and 'equivalent' otherwise;
    'all' skips the spherical evaluator on non-radial specs.
    """
    if choice is None:
        return ['spherical' if spec.is_radial else 'equivalent']
    if choice == 'all':
        names = list(EVALUATORS)
        if not spec.is_radial:
            logger.info(f"'{spec.label}' is not radial; skipping the spherical evaluator")
            names.remove('spherical')
        return names
    return [choice]


def combined_report(spec, reports):
    """Several evaluators for one spec, with their largest disagreement."""
    limits = [r.estimate.limit for r in reports]
    errors = [r.estimate.error for r in reports]
    gap = max(limits) - min(limits)
    return {
        'label': spec.label,
        'n': spec.n,
        'k': spec.k,
        'evaluations': [r.to_dict() for r in reports],
        'agreement': {
            'max_gap': gap,
            'within_errors': gap <= max(2 * max(errors), 1e-3 * max(1.0, max(abs(v) for v in limits))),
        },
    }


class Command(BaseCommand):
    help = 'Evaluate the Gauss-Bonnet-Chern mass of a metric-spec document'

    def add_arguments(self, parser):
        add_common_arguments(parser)
        parser.add_argument(
            '--evaluator',
            choices=EVALUATOR_CHOICES,
            default=None,
            help='Mass evaluator (default: spherical for radial specs, equivalent otherwise)'
        )
        parser.add_argument(
            '--csv',
            default=None,
            help='Write the per-radius (evaluator, radius, flux) series to this CSV file'
        )
        parser.add_argument(
            '--lower-bound',
            action='store_true',
            help='Also evaluate the truncated positive-mass lower bound'
        )
        parser.add_argument(
            '--audit',
            action='store_true',
            help='Also run the positivity audit (radial specs only)'
        )

    def handle(self, *args, **options):
        with exit_codes():
            config = resolve_run_config('mass', options)
            spec = load_metric_spec(config.metric).with_k(config.k)
            if options['audit'] and not spec.is_radial:
                raise DomainError(f"--audit needs a radial spec, '{spec.label}' is not")
            grid = build_grid(spec.n, config.degree) if config.degree else None

            estimates = []
            for name in select_evaluators(spec, config.evaluator):
                estimates.extend(
                    evaluate(spec, name, grid=grid, schedule=config.radii, threads=config.threads)
                )

            lower_bound = mass_lower_bound(spec, r_max=config.radii.r_max) if options['lower_bound'] else None
            audit = positivity_audit(spec, schedule=config.radii) if options['audit'] else None
            reports = [MassReport(spec, estimate, lower_bound, audit) for estimate in estimates]

            body = reports[0].to_dict() if len(reports) == 1 else combined_report(spec, reports)
            write_json(envelope(config, body), config.out, self.stdout)
            if config.csv:
                write_csv([row for report in reports for row in report.csv_rows()], config.csv, CSV_HEADER)

        if config.out:
            self.stdout.write(self.style.SUCCESS(f'\n{spec.label} (n={spec.n}, k={spec.k})'))
            for estimate in estimates:
                line = f'  {estimate.evaluator:<20} m_{spec.k} = {estimate.limit:.10g} ± {estimate.error:.2g}'
                if estimate.low_confidence:
                    self.stdout.write(self.style.WARNING(line + '  (low confidence)'))
                else:
                    self.stdout.write(line)
            self.stdout.write(f'Report: {config.out}')
