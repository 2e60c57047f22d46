"""
Penrose-type inequalities for horizons in conformally flat manifolds.

For an excised domain whose components Sigma_i are horizons with u constant
on each, L in Gamma_{k-1}^+ and star-shaped:

    m_k >= sum_i (|Sigma_i| / omega)^{(n-2k)/(n-1)}                       (area)

and, when additionally L in Gamma_{2k-1},

    m_k >= sum_i (int_{Sigma_i} R / ((n-1)(n-2) omega))^{(n-2k)/(n-3)}     (scalar)

with R = 2 sigma_2(L). Both chains pass through the boundary Green term
c_B int T_{k-1}(D^2u)^{ij} u_j nu_i dA, which on a horizon equals
c_B int (H/(n-1))^k sigma_{k-1}(L) dA.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from core.exceptions import DomainError
from horizon.frames import (
    boundary_frames,
    default_surface_degree,
    flux_integrands,
    horizon_tol,
    level_set_variation,
)
from horizon.surfaces import separation_report, surfaces_from_spec
from mass.constants import equivalent_constant
from mass.evaluators import mass_equivalent_form, mass_spherical
from mass.lower_bound import green_boundary_term, hypothesis_tol, mass_lower_bound
from quadrature.schedule import default_schedule
from quadrature.sphere_grid import build_grid, sphere_volume
from symfun.cones import ConeLabel, default_cone_tol

logger = logging.getLogger(__name__)

AREA = 'area'
SCALAR = 'scalar'


def area_exponent(n, k):
    return (n - 2 * k) / (n - 1)


def scalar_exponent(n, k):
    return (n - 2 * k) / (n - 3)


def area_rhs(n, k, area):
    """(|Sigma| / omega)^{(n-2k)/(n-1)}."""
    return (area / sphere_volume(n)) ** area_exponent(n, k)


def scalar_rhs(n, k, scalar_integral):
    """(int R / ((n-1)(n-2) omega))^{(n-2k)/(n-3)}; None when int R <= 0."""
    base = scalar_integral / ((n - 1) * (n - 2) * sphere_volume(n))
    if base <= 0.0:
        return None
    return base ** scalar_exponent(n, k)


def fenchel_constant(n, k):
    """C(n-1, k-1), the isoperimetric constant of int sigma_{k-1}(L)."""
    return math.comb(n - 1, k - 1)


def maclaurin_constant(n, k):
    """(2k-1)!(n-2k)! / ((k-1)!(n-k)!)."""
    return (
        math.factorial(2 * k - 1) * math.factorial(n - 2 * k)
        / (math.factorial(k - 1) * math.factorial(n - k))
    )


def in_cone(sigmas, order, strict, tol):
    """Every node has sigma_1..sigma_order above -tol (or above tol when strict)."""
    if order < 1:
        return True
    values = sigmas[:, 1:order + 1]
    if strict:
        return bool(np.all(values > tol))
    return bool(np.all(values >= -tol))


@dataclass
class SurfaceTerms:
    """Per-component quantities of both Penrose chains."""

    surface: dict
    area: float
    area_g: float
    scalar_integral: float
    rhs_area: float
    rhs_scalar: Optional[float]
    boundary_term: float
    boundary_term_curvature: Optional[float]
    fenchel_lhs: float
    fenchel_rhs: float
    maclaurin_min_gap: float
    maclaurin_term: float
    certificates: dict = field(default_factory=dict)

    def certified(self, inequality):
        c = self.certificates
        ok = c['horizon']['is_horizon'] and c['u_constant']['ok'] and c['gamma_k_minus_1_plus']
        if inequality == SCALAR:
            ok = ok and c['gamma_2k_minus_1']
        return bool(ok)


def surface_terms(spec, surface, k, grid):
    """Evaluate every boundary quantity of one component."""
    n = spec.n
    frame = boundary_frames(spec, surface, grid)
    H = frame.mean_curvature
    omega = sphere_volume(n)
    c_B = equivalent_constant(n, k)
    tol = default_cone_tol()

    residual = H - (n - 1) * frame.du_nu
    worst = float(np.max(np.abs(residual)))
    bound = horizon_tol() * (1.0 + float(np.max(np.abs(H))))
    variation, index, allowed = level_set_variation(frame)

    curvature_route = None
    if variation <= allowed:
        _, rhs = flux_integrands(frame, k)
        curvature_route = c_B * frame.integrate(rhs)
    else:
        logger.info(
            f"u varies by {variation:.3e} on a {surface.kind} of {spec.label}, "
            f"worst at {frame.points[index].tolist()}"
        )

    area = frame.area
    area_g = frame.integrate(np.exp(-(n - 1) * frame.u))
    scalar_integral = frame.integrate(2.0 * frame.sigma(2))
    sigma_k1 = frame.sigma(k - 1)
    fenchel_lhs = frame.integrate((H / (n - 1)) ** k * sigma_k1)
    fenchel_rhs = fenchel_constant(n, k) * omega ** ((2 * k - 1) / (n - 1)) * area ** area_exponent(n, k)
    maclaurin = maclaurin_constant(n, k)
    gap = (H ** k) * sigma_k1 / (n - 1) ** k - maclaurin * frame.sigma(2 * k - 1)

    certificates = {
        'horizon': {'is_horizon': worst <= bound, 'max_residual': worst, 'tol': bound},
        'u_constant': {'ok': variation <= allowed, 'variation': variation, 'tol': allowed},
        'gamma_k_minus_1_plus': in_cone(frame.sigmas, k - 1, True, tol),
        'gamma_2k_minus_1': in_cone(frame.sigmas, 2 * k - 1, False, tol),
        'cones': [str(ConeLabel(k - 1)) if k > 1 else None, str(ConeLabel(2 * k - 1, strict=False))],
    }
    return SurfaceTerms(
        surface=surface.to_dict(),
        area=area,
        area_g=area_g,
        scalar_integral=scalar_integral,
        rhs_area=area_rhs(n, k, area),
        rhs_scalar=scalar_rhs(n, k, scalar_integral),
        boundary_term=green_boundary_term(spec, k, frame.points, frame.weights, frame.normals),
        boundary_term_curvature=curvature_route,
        fenchel_lhs=fenchel_lhs,
        fenchel_rhs=fenchel_rhs,
        maclaurin_min_gap=float(np.min(gap)),
        maclaurin_term=c_B * maclaurin * frame.integrate(frame.sigma(2 * k - 1)),
        certificates=certificates,
    )


@dataclass
class PenroseReport:
    label: str
    n: int
    k: int
    mass: float
    mass_error: float
    mass_evaluator: str
    terms: list
    middle_terms: dict
    verdicts: dict
    superadditivity: Optional[dict] = None
    separation: list = field(default_factory=list)

    @property
    def rhs_area(self):
        return [t.rhs_area for t in self.terms]

    @property
    def rhs_scalar(self):
        return [t.rhs_scalar for t in self.terms]

    @property
    def total_rhs_area(self):
        return float(sum(self.rhs_area))

    @property
    def total_rhs_scalar(self):
        values = self.rhs_scalar
        if any(v is None for v in values):
            return None
        return float(sum(values))

    @property
    def ratio(self):
        """m_k / RHS_area; 2^k on generalized Schwarzschild horizons."""
        total = self.total_rhs_area
        return self.mass / total if total > 0 else None

    @property
    def ratio_g_area(self):
        """m_k / (2^{-k} sum (|Sigma|_g / omega)^{(n-2k)/(n-1)}); 1 on Schwarzschild horizons."""
        omega = sphere_volume(self.n)
        total = sum((t.area_g / omega) ** area_exponent(self.n, self.k) for t in self.terms)
        return self.mass / (2.0 ** -self.k * total) if total > 0 else None

    @property
    def hypothesis_certificates(self):
        return [{'surface': t.surface, **t.certificates} for t in self.terms]

    def to_dict(self):
        return {
            'label': self.label,
            'n': self.n,
            'k': self.k,
            'mass': self.mass,
            'mass_error': self.mass_error,
            'mass_evaluator': self.mass_evaluator,
            'rhs_area': self.rhs_area,
            'rhs_scalar': self.rhs_scalar,
            'total_rhs_area': self.total_rhs_area,
            'total_rhs_scalar': self.total_rhs_scalar,
            'ratio': self.ratio,
            'ratio_g_area': self.ratio_g_area,
            'middle_terms': self.middle_terms,
            'verdicts': self.verdicts,
            'hypothesis_certificates': self.hypothesis_certificates,
            'superadditivity': self.superadditivity,
            'separation': self.separation,
        }


def _mass(spec, schedule, mass_grid, threads):
    if spec.is_radial:
        return mass_spherical(spec, schedule=schedule, threads=threads)
    return mass_equivalent_form(spec, grid=mass_grid, schedule=schedule, threads=threads)[0]


def _verdict(mass, slack, rhs, certified):
    if not certified or rhs is None:
        return 'withheld'
    return 'pass' if mass >= rhs - slack else 'fail'


def penrose_check(spec, surfaces=None, k=None, grid=None, schedule=None, mass_grid=None,
                  include_volume=True, threads=None):
    """
    Evaluate both Penrose chains for the boundary of an excised domain.

    Args:
        spec: MetricSpec
        surfaces: StarSurfaces bounding Omega (defaults to the spec's excised components)
        k: Curvature order (defaults to spec.k)
        grid: SphereGrid for surface integrals (defaults to GBC_SURFACE_GRID_DEGREE)
        schedule: RadiusSchedule for the mass
        mass_grid: SphereGrid for the equivalent form on non-radial specs
        include_volume: Also evaluate the L_k and gradient volume terms
        threads: Worker threads for the mass evaluation

    Returns:
        PenroseReport; a verdict is 'withheld', never 'fail', while any
        hypothesis of its inequality is uncertified

    Raises:
        DomainError: No boundary surfaces
        SurfaceError: Components overlap or are closer than 10% of their diameters
    """
    spec = spec.with_k(k)
    k = spec.k
    n = spec.n
    surfaces = list(surfaces) if surfaces else surfaces_from_spec(spec)
    if any(s.n != n for s in surfaces):
        raise DomainError(f"every surface must live in R^{n}")
    separation = separation_report(surfaces) if len(surfaces) > 1 else []
    grid = grid or build_grid(n, default_surface_degree())
    schedule = schedule or default_schedule()

    estimate = _mass(spec, schedule, mass_grid, threads)
    terms = [surface_terms(spec, surface, k, grid) for surface in surfaces]

    middle_terms = {
        'boundary_term': float(sum(t.boundary_term for t in terms)),
        'boundary_term_curvature': [t.boundary_term_curvature for t in terms],
        'fenchel_lhs': [t.fenchel_lhs for t in terms],
        'fenchel_rhs': [t.fenchel_rhs for t in terms],
        'maclaurin_min_gap': [t.maclaurin_min_gap for t in terms],
        'maclaurin_term': [t.maclaurin_term for t in terms],
        'area': [t.area for t in terms],
        'area_g': [t.area_g for t in terms],
        'scalar_integral': [t.scalar_integral for t in terms],
    }
    if include_volume:
        bound = mass_lower_bound(spec, k, r_max=schedule.r_max)
        middle_terms.update(
            lk_term=bound.lk_term,
            grad_term=bound.grad_term,
            lj_nonnegative=bound.hypothesis_ok,
        )

    slack = max(estimate.error, hypothesis_tol())
    rhs_area = float(sum(t.rhs_area for t in terms))
    scalars = [t.rhs_scalar for t in terms]
    rhs_scalar = None if any(v is None for v in scalars) else float(sum(scalars))
    verdicts = {
        AREA: _verdict(estimate.limit, slack, rhs_area, all(t.certified(AREA) for t in terms)),
        SCALAR: _verdict(estimate.limit, slack, rhs_scalar, all(t.certified(SCALAR) for t in terms)),
    }

    superadditivity = None
    if len(terms) > 1:
        combined = area_rhs(n, k, sum(t.area for t in terms))
        superadditivity = {
            'sum_of_components': rhs_area,
            'combined': combined,
            'holds': rhs_area >= combined * (1.0 - 1e-12),
        }

    for name, verdict in verdicts.items():
        if verdict == 'fail':
            logger.warning(f"{name} Penrose inequality fails for {spec.label}: m_{k} = {estimate.limit:.6g}")
        elif verdict == 'withheld':
            logger.info(f"{name} Penrose verdict withheld for {spec.label}: hypotheses uncertified")

    return PenroseReport(
        label=spec.label,
        n=n,
        k=k,
        mass=estimate.limit,
        mass_error=estimate.error,
        mass_evaluator=estimate.evaluator,
        terms=terms,
        middle_terms=middle_terms,
        verdicts=verdicts,
        superadditivity=superadditivity,
        separation=separation,
    )
