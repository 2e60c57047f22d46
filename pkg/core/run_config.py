"""
RunConfig: the fully resolved parameters of one command invocation.

Every numeric option is validated here, before any computation starts.
Command-line flags win over the GBC_* settings (and so over the
environment variables decouple reads them from).
"""

import logging
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Optional

from django.conf import settings
from django.core.management.base import CommandError

from core.exceptions import GBCError, PreconditionError, WellDefinednessError
from quadrature.schedule import default_schedule, parse_schedule
from quadrature.sphere_grid import MAX_DEGREE

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REFUSED = 2
EXIT_VERIFY_FAILED = 3

EVALUATOR_CHOICES = ('definition', 'equivalent', 'spherical', 'all')


@dataclass(frozen=True)
class RunConfig:
    command: str
    metric: Optional[str] = None
    k: Optional[int] = None
    degree: Optional[int] = None
    radii: object = None
    out: Optional[str] = None
    csv: Optional[str] = None
    seed: int = 42
    threads: int = 1
    suite: Optional[str] = None
    evaluator: Optional[str] = None

    def to_dict(self):
        return {
            'command': self.command,
            'metric': self.metric,
            'k': self.k,
            'degree': self.degree,
            'radii': None if self.radii is None else self.radii.to_dict(),
            'out': self.out,
            'csv': self.csv,
            'seed': self.seed,
            'threads': self.threads,
            'suite': self.suite,
            'evaluator': self.evaluator,
        }


def add_common_arguments(parser, metric=True):
    """Flags shared by the mass and penrose commands."""
    if metric:
        parser.add_argument('--metric', required=True, help='Path to a metric-spec JSON document')
        parser.add_argument('--k', type=int, default=None, help='Override the curvature order of the spec')
        parser.add_argument('--degree', type=int, default=None, help=f'Sphere grid degree (1..{MAX_DEGREE})')
        parser.add_argument(
            '--radii',
            default=None,
            help="Radius schedule, 'geometric:<r0>,<rmax>,<count>' or 'list:<r1>,<r2>,...'",
        )
    parser.add_argument('--out', default=None, help='Write the JSON report here (default: stdout)')
    parser.add_argument('--seed', type=int, default=None, help='Random seed (default: GBC_SEED)')
    parser.add_argument('--threads', type=int, default=None, help='Worker threads (default: GBC_THREADS)')


def resolve_run_config(command, options):
    """
    Merge command-line options with settings and validate them.

    Raises:
        PreconditionError: An option is outside its valid range
        DomainError: The radius schedule is malformed
    """
    k = options.get('k')
    if k is not None and k < 1:
        raise PreconditionError(f"--k must be positive, got {k}")
    degree = options.get('degree')
    if degree is not None and not 1 <= degree <= MAX_DEGREE:
        raise PreconditionError(f"--degree must be in 1..{MAX_DEGREE}, got {degree}")

    threads = options.get('threads')
    if threads is None:
        threads = getattr(settings, 'GBC_THREADS', 1)
    if threads < 1:
        raise PreconditionError(f"--threads must be at least 1, got {threads}")

    seed = options.get('seed')
    if seed is None:
        seed = getattr(settings, 'GBC_SEED', 42)

    evaluator = options.get('evaluator')
    if evaluator is not None and evaluator not in EVALUATOR_CHOICES:
        raise PreconditionError(f"--evaluator must be one of {', '.join(EVALUATOR_CHOICES)}")

    radii = None
    if 'radii' in options:
        radii = parse_schedule(options['radii']) if options['radii'] else default_schedule()

    config = RunConfig(
        command=command,
        metric=options.get('metric'),
        k=k,
        degree=degree,
        radii=radii,
        out=options.get('out'),
        csv=options.get('csv'),
        seed=int(seed),
        threads=int(threads),
        suite=options.get('suite'),
        evaluator=evaluator,
    )
    logger.debug(f"Resolved run config: {config.to_dict()}")
    return config


@contextmanager
def exit_codes():
    """
    Map library errors onto command exit codes.

    WellDefinednessError -> 2; any other GBCError or an I/O failure -> 1.
    """
    try:
        yield
    except WellDefinednessError as exc:
        logger.error(str(exc))
        raise CommandError(str(exc), returncode=EXIT_REFUSED) from exc
    except (GBCError, OSError) as exc:
        logger.error(str(exc))
        raise CommandError(str(exc), returncode=EXIT_ERROR) from exc
