"""
Positive-mass lower bound.

    m_k >= c_L int e^{(n-2k)u} L_k dvol_g + c_G int e^{(n-2k)u} |du|_g^{2k} dvol_g
           + c_B int_{dOmega} T_{k-1}(D^2 u)^{ij} u_j nu_i dS

with c_L = (n-2k)!/(2^k (n-1)! omega), c_G = (n-2k)/(2^k omega) and
c_B = (k-1)!(n-k)!/((n-1)! omega); nu points out of Omega. The volume
integrals are truncated to max(1.01 r_inner, 0.5) < |x| < R_max, which keeps
a lower bound as long as the integrands are nonnegative.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from django.conf import settings

from confgeom.curvature import lk_conformal, schouten, to_metric_frame
from core.exceptions import DomainError
from mass.constants import equivalent_constant, grad_term_constant, lk_term_constant
from profiles.metric_spec import jet_at
from quadrature.integrals import ball_integral, surface_integral, volume_integral
from quadrature.schedule import default_schedule, lower_bound_shells
from quadrature.sphere_grid import build_grid
from symfun.symmetric import newton_tensor, sigma_all

logger = logging.getLogger(__name__)

MAX_VIOLATIONS = 5


def default_volume_degree():
    return getattr(settings, 'GBC_VOLUME_GRID_DEGREE', 7)


def hypothesis_tol():
    return getattr(settings, 'GBC_HYPOTHESIS_TOL', 1e-9)


@dataclass
class LowerBound:
    lk_term: float
    grad_term: float
    r_inner: float
    r_max: float
    boundary_term: Optional[float] = None
    hypothesis_ok: bool = True
    violations: list = field(default_factory=list)
    grid: dict = field(default_factory=dict)

    @property
    def total(self):
        return self.lk_term + self.grad_term

    def to_dict(self):
        return asdict(self)


def lk_density(spec, k, jets):
    """
    e^{(n-2k)u} L_k dvol_g / dx.

    dvol_g = e^{-nu} dx, so the density is e^{-2ku} L_k.
    """
    n = spec.n
    return np.exp((n - 2 * k) * jets.value) * lk_conformal(jets, n, k) * np.exp(-n * jets.value)


def grad_density(spec, k, jets):
    """
    e^{(n-2k)u} |du|_g^{2k} dvol_g / dx.

    |du|_g^{2k} = e^{2ku} |du|^{2k} and dvol_g = e^{-nu} dx, so every
    exponential cancels and the density is |du|^{2k}.
    """
    n = spec.n
    return (
        np.exp((n - 2 * k) * jets.value)
        * np.exp(2 * k * jets.value) * jets.grad_norm2 ** k
        * np.exp(-n * jets.value)
    )


def check_lj_nonnegative(jets, k, tol):
    """Indices of points where some sigma_j(g^{-1}A_g), j <= k, is below -tol."""
    sigmas = sigma_all(np.linalg.eigvalsh(to_metric_frame(schouten(jets), jets.value)))
    bad = np.any(sigmas[..., 1:k + 1] < -tol, axis=-1)
    return np.flatnonzero(np.atleast_1d(bad))


def green_boundary_term(spec, k, points, weights, normals):
    """
    c_B sum_i w_i T_{k-1}(D^2 u)^{ab} u_b nu_a at boundary nodes.

    Args:
        points: (m, n) nodes on dOmega
        weights: (m,) area weights
        normals: (m, n) unit normals pointing out of Omega
    """
    jets = jet_at(spec, points)
    T = newton_tensor(k - 1, jets.hessian)
    values = np.einsum('...ab,...b,...a->...', T, jets.gradient, normals)
    return equivalent_constant(spec.n, k) * float(np.sum(np.asarray(weights) * values))


def sphere_boundary_term(spec, k, component, grid):
    """Green boundary term on a spherical excised component."""
    r0 = float(component.radius)
    points = grid.scaled(r0, component.center)
    return green_boundary_term(spec, k, points, grid.weights * r0 ** (spec.n - 1), grid.nodes)


def _inner_edge(spec):
    if spec.horizon_radius is not None:
        return spec.horizon_radius
    return spec.inner_radius


def mass_lower_bound(spec, k=None, r_max=None, grid=None, shells=24, order=8):
    """
    Truncated lower-bound integrals of the positive-mass identity.

    Args:
        spec: MetricSpec
        k: Curvature order (defaults to spec.k)
        r_max: Outer truncation radius (defaults to the last default radius)
        grid: SphereGrid for the angular part (defaults to GBC_VOLUME_GRID_DEGREE)
        shells: Geometric radial shells
        order: Gauss-Legendre nodes per shell

    Returns:
        LowerBound; violations of L_j >= 0 are listed with their points and
        logged, the integrals are still returned
    """
    spec = spec.with_k(k)
    k = spec.k
    if r_max is None:
        r_max = default_schedule().r_max
    grid = grid or build_grid(spec.n, default_volume_degree())
    r_inner, r_outer = lower_bound_shells(_inner_edge(spec), r_max)
    if not r_inner < r_outer:
        raise DomainError(f"lower-bound region is empty: {r_inner} >= {r_outer}")
    tol = hypothesis_tol()
    violations = []

    def lk_nodes(points):
        jets = jet_at(spec, points)
        if len(violations) < MAX_VIOLATIONS:
            for index in check_lj_nonnegative(jets, k, tol)[:MAX_VIOLATIONS - len(violations)]:
                violations.append([float(v) for v in points[index]])
        return lk_density(spec, k, jets)

    def grad_nodes(points):
        return grad_density(spec, k, jet_at(spec, points))

    lk_term = lk_term_constant(spec.n, k) * volume_integral(lk_nodes, grid, r_inner, r_outer, shells, order)
    grad_term = grad_term_constant(spec.n, k) * volume_integral(grad_nodes, grid, r_inner, r_outer, shells, order)

    boundary = None
    spheres = [c for c in spec.excised if c.shape == 'sphere']
    if spheres and len(spheres) == len(spec.excised):
        boundary = sum(sphere_boundary_term(spec, k, c, grid) for c in spheres)

    if violations:
        logger.warning(
            f"L_j >= 0 fails at {len(violations)} sampled point(s) of {spec.label}, "
            f"first at {violations[0]}; lower bound not guaranteed"
        )
    return LowerBound(
        lk_term=float(lk_term),
        grad_term=float(grad_term),
        r_inner=float(r_inner),
        r_max=float(r_outer),
        boundary_term=boundary,
        hypothesis_ok=not violations,
        violations=violations,
        grid=grid.describe(),
    )


def green_consistency(spec, k=None, r=1.0, grid=None, order=16):
    """
    Green's formula for T_{k-1}(D^2 u):

        int_{S_r} T_{k-1}(D^2u)^{ij} u_j nu_i dS = k int_{B_r} sigma_k(D^2 u) dx

    for a field smooth on B_r. Returns both sides and their difference.
    """
    spec = spec.with_k(k)
    k = spec.k
    if spec.excised or spec.field.singular_points():
        raise DomainError(f"green consistency needs a field smooth on B_r, '{spec.label}' is not")
    grid = grid or build_grid(spec.n, default_volume_degree())

    def flux_nodes(points):
        jets = jet_at(spec, points)
        T = newton_tensor(k - 1, jets.hessian)
        nu = points / np.linalg.norm(points, axis=-1, keepdims=True)
        return np.einsum('...ij,...j,...i->...', T, jets.gradient, nu)

    def sigma_nodes(points):
        return sigma_all(np.linalg.eigvalsh(jet_at(spec, points).hessian))[..., k]

    flux = surface_integral(flux_nodes, grid, r)
    support = spec.field.support_radius
    inner = r if support is None else min(r, support)
    volume = k * ball_integral(sigma_nodes, grid, inner, order) if inner > 0 else 0.0
    return {'r': r, 'flux': flux, 'volume': volume, 'residual': flux - volume}
