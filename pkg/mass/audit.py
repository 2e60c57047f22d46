"""
Positivity audit of a radial metric.

Two hypothesis families give m_k >= 0:
    'nonnegative'   sigma_j(g^{-1}A_g) >= 0 for 1 <= j <= k
    'alternating'   k even and (-1)^j sigma_j(g^{-1}A_g) >= 0 for 1 <= j <= k
Both are checked pointwise on a radial line; if neither holds the verdict is
'not applicable' and no positivity claim is made.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from confgeom.curvature import schouten, to_metric_frame
from core.exceptions import DomainError
from mass.evaluators import mass_spherical
from mass.lower_bound import hypothesis_tol
from profiles.metric_spec import jet_at
from quadrature.schedule import default_schedule, lower_bound_shells
from symfun.symmetric import sigma_all

logger = logging.getLogger(__name__)

AUDIT_POINTS = 200
RIGIDITY_TOL = 1e-12


@dataclass
class AuditVerdict:
    applicable: bool
    regime: Optional[str]
    mass: float
    mass_error: float
    positive: Optional[bool]
    rigidity: Optional[str]
    radii: list = field(default_factory=list)
    failures: dict = field(default_factory=dict)

    @property
    def verdict(self):
        if not self.applicable:
            return 'not applicable'
        return 'positive' if self.positive else 'violated'

    def to_dict(self):
        data = asdict(self)
        data['verdict'] = self.verdict
        return data


def audit_radii(spec, r_max, count=AUDIT_POINTS):
    """Geometric 1-D grid of radii on which the cone hypotheses are checked."""
    r_inner, r_outer = lower_bound_shells(spec.horizon_radius or spec.inner_radius, r_max)
    return r_inner * (r_outer / r_inner) ** (np.arange(count) / (count - 1))


def _first_failure(radii, ok):
    if ok.all():
        return None
    return float(radii[int(np.argmin(ok))])


def positivity_audit(spec, k=None, schedule=None, count=AUDIT_POINTS):
    """
    Certify a positivity regime along a ray and check the mass against it.

    Args:
        spec: Radial MetricSpec
        k: Curvature order (defaults to spec.k)
        schedule: RadiusSchedule for the mass and the outer radius of the ray
        count: Number of radii sampled

    Returns:
        AuditVerdict

    Raises:
        DomainError: The spec is not radial
    """
    spec = spec.with_k(k)
    k = spec.k
    if not spec.is_radial:
        raise DomainError(f"positivity audit needs a radial spec, '{spec.label}' is not")
    schedule = schedule or default_schedule()
    tol = hypothesis_tol()

    radii = audit_radii(spec, schedule.r_max, count)
    points = np.zeros((count, spec.n))
    points[:, 0] = radii
    jets = jet_at(spec, points)
    sigmas = sigma_all(np.linalg.eigvalsh(to_metric_frame(schouten(jets), jets.value)))[:, 1:k + 1]
    signs = (-1.0) ** np.arange(1, k + 1)

    nonnegative = np.all(sigmas >= -tol, axis=1)
    alternating = np.all(signs * sigmas >= -tol, axis=1)
    failures = {'nonnegative': _first_failure(radii, nonnegative)}
    if k % 2 == 0:
        failures['alternating'] = _first_failure(radii, alternating)

    regime = None
    if nonnegative.all():
        regime = 'nonnegative'
    elif k % 2 == 0 and alternating.all():
        regime = 'alternating'

    estimate = mass_spherical(spec, k, schedule)
    slack = max(tol, estimate.error)
    flat = float(np.max(np.abs(jets.gradient))) <= RIGIDITY_TOL

    rigidity = None
    if flat:
        rigidity = 'consistent' if abs(estimate.limit) <= slack else 'violated'

    if regime is None:
        logger.info(f"positivity audit of {spec.label}: no hypothesis family holds, not applicable")
        return AuditVerdict(
            applicable=False, regime=None, mass=estimate.limit, mass_error=estimate.error,
            positive=None, rigidity=rigidity, radii=[float(radii[0]), float(radii[-1])],
            failures=failures,
        )

    positive = estimate.limit >= -slack
    if not positive:
        logger.warning(f"m_{k} = {estimate.limit:.6g} < 0 under the {regime} regime for {spec.label}")
    return AuditVerdict(
        applicable=True, regime=regime, mass=estimate.limit, mass_error=estimate.error,
        positive=positive, rigidity=rigidity, radii=[float(radii[0]), float(radii[-1])],
        failures=failures,
    )
