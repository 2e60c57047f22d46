"""
Django Management Command: penrose

Checks the Penrose-type inequalities for the excised boundary of a
metric-spec document. Verdicts that cannot be certified are reported as
'withheld'; that is data, not an error.

Usage:
    python manage.py penrose --metric specs/schwarzschild_6_2.json
    python manage.py penrose --metric two_centres.json --degree 5 --no-volume --out penrose.json

Exit codes: 0 report written (whatever the verdicts), 1 I/O, spec or
missing-boundary error, 2 mass not well defined.
"""

import logging

from django.core.management.base import BaseCommand

from core.reporting import envelope, write_json
from core.run_config import add_common_arguments, exit_codes, resolve_run_config
from horizon.penrose import penrose_check
from profiles.documents import load_metric_spec
from quadrature.sphere_grid import build_grid

logger = logging.getLogger(__name__)

VERDICT_STYLES = {'pass': 'SUCCESS', 'fail': 'ERROR', 'withheld': 'WARNING'}


class Command(BaseCommand):
    help = 'Check the Penrose-type inequalities for the boundary of an excised domain'

    def add_arguments(self, parser):
        add_common_arguments(parser)
        parser.add_argument(
            '--no-volume',
            action='store_true',
            help='Skip the L_k and gradient volume integrals of the middle chain'
        )

    def handle(self, *args, **options):
        with exit_codes():
            config = resolve_run_config('penrose', options)
            spec = load_metric_spec(config.metric).with_k(config.k)
            grid = build_grid(spec.n, config.degree) if config.degree else None
            report = penrose_check(
                spec,
                grid=grid,
                schedule=config.radii,
                mass_grid=grid,
                include_volume=not options['no_volume'],
                threads=config.threads,
            )
            write_json(envelope(config, report.to_dict()), config.out, self.stdout)

        if config.out:
            self.stdout.write(self.style.SUCCESS(f'\n{spec.label}: m_{spec.k} = {report.mass:.10g}'))
            self.stdout.write(f'  RHS (area):   {report.total_rhs_area:.10g}')
            if report.total_rhs_scalar is not None:
                self.stdout.write(f'  RHS (scalar): {report.total_rhs_scalar:.10g}')
            for name, verdict in report.verdicts.items():
                style = getattr(self.style, VERDICT_STYLES[verdict])
                self.stdout.write(style(f'  {name}: {verdict}'))
            self.stdout.write(f'Report: {config.out}')
