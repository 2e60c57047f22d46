"""
Catalog of closed-form metrics.

The generalized Schwarzschild metrics

    g = (1 + m / (2 r^p))^(4k/(n-2k)) delta,   p = (n-2k)/k,

have conformal factor u = -(2k/(n-2k)) ln(1 + m/(2 r^p)), decay order
tau = p, horizon at r0 = (m/2)^(1/p) and mass m_k = m^k. The expected mass
is carried on the MetricSpec (expected_mass) so tests compare against it.
"""

import logging

from core.exceptions import DomainError
from profiles.fields import FlatField, RadialExprField
from profiles.metric_spec import ExcisedComponent, MetricSpec

logger = logging.getLogger(__name__)

SCHWARZSCHILD_EXPR = "-c*ln(1 + m/(2*r^p))"

ACCEPTANCE_SET = (
    (5, 1, 1.0),
    (5, 1, 2.0),
    (5, 2, 1.0),
    (6, 2, 1.0),
    (7, 2, 1.0),
    (7, 3, 1.0),
)


def schwarzschild_exponent(n, k):
    return (n - 2 * k) / k


def schwarzschild_horizon(n, k, m):
    """r0 = (m/2)^(k/(n-2k))."""
    return (m / 2.0) ** (k / (n - 2 * k))


def schwarzschild_profile(n, k, m, excise=True, label=None):
    """
    Generalized Schwarzschild metric of order k in R^n.

    Args:
        n: Dimension
        k: Curvature order, 2k < n
        m: Mass parameter, m > 0
        excise: Remove the ball inside the horizon
        label: Report label (defaults to schwarzschild-n{n}-k{k}-m{m})

    Raises:
        DomainError: If 2k >= n or m <= 0
    """
    if not 2 * k < n or k < 1:
        raise DomainError(f"need 1 <= k < n/2, got n={n}, k={k}")
    if not m > 0:
        raise DomainError(f"mass parameter must be positive, got m={m}")
    p = schwarzschild_exponent(n, k)
    r0 = schwarzschild_horizon(n, k, m)
    field = RadialExprField(
        n, SCHWARZSCHILD_EXPR, params={'c': 2.0 * k / (n - 2 * k), 'm': float(m), 'p': p}
    )
    excised = (ExcisedComponent('sphere', (0.0,) * n, radius=r0),) if excise else ()
    return MetricSpec(
        n=n,
        k=k,
        field=field,
        tau=p,
        label=label or f"schwarzschild-n{n}-k{k}-m{m:g}",
        kind='schwarzschild',
        excised=excised,
        mass_param=float(m),
        horizon_radius=r0,
        expected_mass=float(m) ** k,
    )


def flat_spec(n, k, label=None):
    """Euclidean space; every curvature and the mass vanish."""
    return MetricSpec(
        n=n,
        k=k,
        field=FlatField(n),
        tau=float('inf'),
        label=label or f"flat-n{n}-k{k}",
        kind='flat',
        expected_mass=0.0,
    )


def catalog_entries():
    """The Schwarzschild acceptance set, in a fixed order."""
    return [schwarzschild_profile(n, k, m) for n, k, m in ACCEPTANCE_SET]


def catalog_entry(name):
    for spec in catalog_entries():
        if spec.label == name:
            return spec
    raise DomainError(f"no catalog metric named '{name}'")
