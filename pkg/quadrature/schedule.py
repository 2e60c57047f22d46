"""
Radius schedules for the r -> infinity limit.

The text form used by the CLI and settings is

    geometric:<r0>,<rmax>,<count>     e.g. geometric:10,160,5 -> 10 20 40 80 160
    list:<r1>,<r2>,...                explicit radii
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from django.conf import settings

from core.exceptions import DomainError

logger = logging.getLogger(__name__)

MIN_RADII = 3


@dataclass(frozen=True)
class RadiusSchedule:
    radii: tuple
    exponent: Optional[float] = None
    text: str = ''

    def __post_init__(self):
        if len(self.radii) < MIN_RADII:
            raise DomainError(f"a schedule needs at least {MIN_RADII} radii, got {len(self.radii)}")
        if self.radii[0] <= 0:
            raise DomainError("radii must be positive")
        if any(b <= a for a, b in zip(self.radii, self.radii[1:])):
            raise DomainError("radii must be strictly increasing")

    @property
    def r_max(self):
        return self.radii[-1]

    def with_exponent(self, exponent):
        return RadiusSchedule(self.radii, exponent, self.text)

    def to_dict(self):
        return {'radii': list(self.radii), 'text': self.text}


def geometric(r0, r_max, count):
    """count radii from r0 to r_max with a constant ratio."""
    if count < MIN_RADII:
        raise DomainError(f"a schedule needs at least {MIN_RADII} radii, got {count}")
    if not 0 < r0 < r_max:
        raise DomainError(f"need 0 < r0 < rmax, got {r0}, {r_max}")
    ratio = (r_max / r0) ** (1.0 / (count - 1))
    radii = [float(r0 * ratio ** i) for i in range(count - 1)] + [float(r_max)]
    return RadiusSchedule(tuple(radii), text=f"geometric:{r0:g},{r_max:g},{count}")


def parse_schedule(text):
    """
    Parse 'geometric:r0,rmax,count' or 'list:r1,r2,...'.

    Raises:
        DomainError: Malformed text or invalid radii
    """
    kind, _, body = text.partition(':')
    try:
        values = [float(v) for v in body.split(',') if v.strip()]
    except ValueError as exc:
        raise DomainError(f"invalid radius schedule '{text}': {exc}") from exc
    if kind == 'geometric':
        if len(values) != 3 or not float(values[2]).is_integer():
            raise DomainError(f"expected geometric:<r0>,<rmax>,<count>, got '{text}'")
        return geometric(values[0], values[1], int(values[2]))
    if kind == 'list':
        return RadiusSchedule(tuple(values), text=text)
    raise DomainError(f"unknown schedule kind '{kind}' (expected geometric or list)")


def default_schedule():
    return parse_schedule(getattr(settings, 'GBC_DEFAULT_RADII', 'geometric:10,160,5'))


def lower_bound_shells(r_inner, r_max):
    """Inner edge of the lower-bound integrals: max(1.01 r_inner, 0.5)."""
    return max(1.01 * r_inner, 0.5), float(r_max)


def log_slope(radii, values):
    """Least-squares slope of log|v| against log r (convergence-order checks)."""
    radii = np.asarray(radii, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    slope, _ = np.polyfit(np.log(radii), np.log(values), 1)
    return float(slope)
