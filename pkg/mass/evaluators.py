"""
The three evaluators of the Gauss-Bonnet-Chern mass m_k.

    definition   c(n,k) int_{S_r} P_(k)^{ijlm} d_m g_{jl} nu_i dS
    equivalent   ((k-1)!(n-k)!/((n-1)! omega)) int_{S_r} T_{k-1}(A)^{ij} u_j nu_i dS
                 (and the same with T_{k-1}(D^2 u))
    spherical    r^{n-k} u_r(r)^k, radial specs only

Each evaluator produces one value per radius of the schedule and hands the
sequence to quadrature.extrapolation. Radii are independent tasks run on a
thread pool; results are collected in schedule order.
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from django.conf import settings

from confgeom.curvature import schouten, to_metric_frame
from core.exceptions import DomainError, WellDefinednessError
from mass.constants import definition_constant, equivalent_constant
from profiles.metric_spec import jet_at
from quadrature.extrapolation import extrapolate
from quadrature.integrals import surface_integral
from quadrature.schedule import default_schedule
from quadrature.sphere_grid import build_grid, default_degree
from symfun.symmetric import newton_tensor
from tensor.gauss_bonnet import pk_trace_conformal

logger = logging.getLogger(__name__)

EVALUATORS = ('definition', 'equivalent', 'spherical')


def default_threads():
    return max(1, int(getattr(settings, 'GBC_THREADS', 1)))


def require_well_defined(spec):
    """
    Refuse specs whose decay order is at or below (n-2k)/(k+1).

    Raises:
        WellDefinednessError: tau missing or too small
    """
    if not spec.is_well_defined:
        raise WellDefinednessError(
            f"mass m_{spec.k} is not well defined for '{spec.label}': "
            f"need tau > (n-2k)/(k+1) = {spec.decay_threshold:.6g}, got tau = {spec.tau}",
            tau=spec.tau,
            threshold=spec.decay_threshold,
        )


def per_radius(func, radii, threads=None):
    """func(r) for every radius, in schedule order."""
    threads = threads or default_threads()
    if threads == 1:
        return [func(float(r)) for r in radii]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, [float(r) for r in radii]))


def _resolve(spec, k, schedule):
    spec = spec.with_k(k)
    require_well_defined(spec)
    schedule = schedule or default_schedule()
    return spec, schedule


def _grid(spec, grid):
    return grid or build_grid(spec.n, default_degree(spec.n))


def _exponent(spec, schedule):
    if schedule.exponent is not None:
        return schedule.exponent
    return spec.convergence_exponent


def _normals(points):
    return points / np.linalg.norm(points, axis=-1, keepdims=True)


def definition_integrand(spec, k):
    """
    Node function c(n,k) P_(k)^{ijlm} d_m g_{jl} nu_i.

    g = e^{-2u} delta, so d_m g_{jl} = -2 u_m e^{-2u} delta_{jl} and only the
    trace P^{ijjm} = e^{4u} Q^{ij}_{jm} enters; it is taken in closed form
    from the Schouten tensor instead of contracting the full P_(k).
    """
    constant = definition_constant(spec.n, k)

    def integrand(points):
        jets = jet_at(spec, points)
        A = to_metric_frame(schouten(jets), jets.value)
        trace = np.exp(4.0 * jets.value)[..., None, None] * pk_trace_conformal(A, k)
        flux = np.einsum('...im,...m,...i->...', trace, jets.gradient, _normals(points))
        return -2.0 * constant * np.exp(-2.0 * jets.value) * flux

    return integrand


def equivalent_integrand(spec, k, variant='schouten'):
    """Node function of the T_{k-1} flux; variant 'schouten' uses A, 'hessian' uses D^2 u."""
    if variant not in ('schouten', 'hessian'):
        raise DomainError(f"unknown equivalent-form variant '{variant}'")
    constant = equivalent_constant(spec.n, k)

    def integrand(points):
        jets = jet_at(spec, points)
        matrix = schouten(jets) if variant == 'schouten' else jets.hessian
        T = newton_tensor(k - 1, matrix)
        return constant * np.einsum('...ij,...j,...i->...', T, jets.gradient, _normals(points))

    return integrand


def _sphere_values(integrand, grid, radii, threads):
    return per_radius(lambda r: surface_integral(integrand, grid, r), radii, threads)


def mass_definition_form(spec, k=None, grid=None, schedule=None, threads=None):
    """
    m_k from its definition as a flux of P_(k) against dg.

    Args:
        spec: MetricSpec
        k: Curvature order (defaults to spec.k)
        grid: SphereGrid (defaults to build_grid(n, default_degree(n)))
        schedule: RadiusSchedule (defaults to GBC_DEFAULT_RADII)
        threads: Worker threads over radii

    Returns:
        MassEstimate tagged 'definition'

    Raises:
        WellDefinednessError: tau <= (n-2k)/(k+1)
    """
    spec, schedule = _resolve(spec, k, schedule)
    grid = _grid(spec, grid)
    logger.info(f"definition form for {spec.label}: n={spec.n} k={spec.k} grid {grid.describe()}")
    values = _sphere_values(definition_integrand(spec, spec.k), grid, schedule.radii, threads)
    return extrapolate(schedule.radii, values, p=_exponent(spec, schedule), evaluator='definition')


def mass_equivalent_form(spec, k=None, grid=None, schedule=None, threads=None):
    """
    m_k as the T_{k-1} flux, computed with both A and D^2 u.

    Returns:
        (estimate_schouten, estimate_hessian) tagged 'equivalent' and
        'equivalent_hessian'
    """
    spec, schedule = _resolve(spec, k, schedule)
    grid = _grid(spec, grid)
    p = _exponent(spec, schedule)
    estimates = []
    for variant, tag in (('schouten', 'equivalent'), ('hessian', 'equivalent_hessian')):
        values = _sphere_values(equivalent_integrand(spec, spec.k, variant), grid, schedule.radii, threads)
        estimates.append(extrapolate(schedule.radii, values, p=p, evaluator=tag))
    gap = abs(estimates[0].limit - estimates[1].limit)
    if gap > estimates[0].error + estimates[1].error + 1e-10:
        logger.warning(f"equivalent-form variants differ by {gap:.3g} for {spec.label}")
    return tuple(estimates)


def radial_derivative(spec, r):
    """u_r at distance r along the first axis."""
    point = np.zeros(spec.n)
    point[0] = r
    return float(jet_at(spec, point).gradient[0])


def spherical_value(spec, k, r):
    """r^{n-k} u_r(r)^k, the collapsed sphere integral (1/omega) int u_r^k / r^{k-1} dS."""
    return r ** (spec.n - k) * radial_derivative(spec, r) ** k


def mass_spherical(spec, k=None, schedule=None, threads=None):
    """
    m_k of a spherically symmetric metric.

    For even k every per-radius value is nonnegative.

    Raises:
        DomainError: The spec is not radial
    """
    spec, schedule = _resolve(spec, k, schedule)
    if not spec.is_radial:
        raise DomainError(f"spherical evaluator needs a radial spec, '{spec.label}' is not")
    values = per_radius(lambda r: spherical_value(spec, spec.k, r), schedule.radii, threads)
    if spec.k % 2 == 0 and min(values) < 0.0:
        logger.warning(f"negative spherical flux {min(values):.3g} for even k={spec.k}")
    return extrapolate(schedule.radii, values, p=_exponent(spec, schedule), evaluator='spherical')


def evaluate(spec, evaluator, k=None, grid=None, schedule=None, threads=None):
    """
    Run one evaluator by name ('definition', 'equivalent', 'spherical').

    Returns:
        List of MassEstimate (the equivalent form yields both variants)
    """
    if evaluator == 'definition':
        return [mass_definition_form(spec, k, grid, schedule, threads)]
    if evaluator == 'equivalent':
        return list(mass_equivalent_form(spec, k, grid, schedule, threads))
    if evaluator == 'spherical':
        return [mass_spherical(spec, k, schedule, threads)]
    raise DomainError(f"unknown evaluator '{evaluator}' (expected one of {', '.join(EVALUATORS)})")