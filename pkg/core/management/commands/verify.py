"""
Django Management Command: verify

Runs the seeded property suites and writes a report listing every identity
with the largest violation observed.

Usage:
    python manage.py verify
    python manage.py verify --suite symfun --seed 7
    python manage.py verify --out verify.json
    python manage.py verify --suite horizon --inject 1e-3

Exit codes: 0 all suites pass, 1 I/O error, 3 a suite failed (the message
carries the seed and the failing inputs).
"""

import logging

from django.core.management.base import BaseCommand, CommandError

from core.reporting import envelope, write_json
from core.run_config import EXIT_VERIFY_FAILED, add_common_arguments, exit_codes, resolve_run_config
from core.verification import SUITES, run_verification

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Run the seeded identity suites'

    def add_arguments(self, parser):
        add_common_arguments(parser, metric=False)
        parser.add_argument(
            '--suite',
            action='append',
            choices=list(SUITES),
            default=None,
            help='Suite to run (repeatable; default: all)'
        )
        parser.add_argument(
            '--inject',
            type=float,
            default=0.0,
            help='Shift one side of every identity by this amount (exercises the failure path)'
        )

    def handle(self, *args, **options):
        suites = options['suite']
        with exit_codes():
            config = resolve_run_config('verify', {**options, 'suite': ','.join(suites) if suites else None})
            report = run_verification(suites, seed=config.seed, perturbation=options['inject'])
            write_json(envelope(config, report.to_dict()), config.out, self.stdout)

        if config.out:
            for check in report.checks:
                line = f'  [{check.suite}] {check.identity}: max violation {check.max_violation:.2e}'
                self.stdout.write(self.style.SUCCESS(line) if check.passed else self.style.ERROR(line))

        if not report.passed:
            first = report.failures[0]
            raise CommandError(
                f"{len(report.failures)} identity check(s) failed; first: [{first.suite}] {first.identity} "
                f"(seed {config.seed}, case {first.failing_case['case']}, inputs {first.failing_case['inputs']})",
                returncode=EXIT_VERIFY_FAILED,
            )
        if config.out:
            self.stdout.write(self.style.SUCCESS(f'All {len(report.checks)} checks passed (seed {config.seed})'))
