"""
Boundary frames: second fundamental form, horizon residual, flux identity.

The normal nu is the unit gradient of the surface's implicit function and
points away from the excised body, into the manifold. With respect to -nu
the second fundamental form is

    L = E^T Hess(phi) E / |grad phi|

for an orthonormal tangent basis E, so a round sphere of radius r has L = I/r.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from django.conf import settings

from core.exceptions import DomainError, SurfaceError
from profiles.metric_spec import jet_at
from quadrature.sphere_grid import build_grid
from symfun.symmetric import newton_tensor, sigma_all

logger = logging.getLogger(__name__)

FLUX_IDENTITY_TOL = 1e-8
LEVEL_SET_TOL = 1e-8


def horizon_tol():
    return getattr(settings, 'GBC_HORIZON_TOL', 1e-8)


def default_surface_degree():
    return getattr(settings, 'GBC_SURFACE_GRID_DEGREE', 7)


def tangent_basis(normals):
    """
    Orthonormal tangent frames from a Householder reflection.

    The reflection I - 2 v v^T / |v|^2 with v = nu + sign(nu_1) e_1 sends e_1
    to a multiple of nu; its remaining columns span the tangent space.

    Returns:
        (m, n, n-1) array
    """
    normals = np.atleast_2d(normals)
    n = normals.shape[-1]
    sign = np.where(normals[:, 0] >= 0.0, 1.0, -1.0)
    v = normals.copy()
    v[:, 0] += sign
    reflection = np.eye(n) - 2.0 * v[:, :, None] * v[:, None, :] / np.sum(v * v, axis=-1)[:, None, None]
    return reflection[:, :, 1:]


@dataclass
class BoundaryFrame:
    """
    Boundary geometry at a batch of surface nodes.

    The u-dependent fields are filled when a spec is supplied.
    """

    points: np.ndarray
    normals: np.ndarray
    tangents: np.ndarray
    shape_operator: np.ndarray
    curvatures: np.ndarray
    sigmas: np.ndarray
    weights: Optional[np.ndarray] = None
    u: Optional[np.ndarray] = None
    grad_u: Optional[np.ndarray] = None
    du_nu: Optional[np.ndarray] = None
    hessian_u: Optional[np.ndarray] = None
    tangential_hessian: Optional[np.ndarray] = None

    @property
    def size(self):
        return int(self.points.shape[0])

    @property
    def mean_curvature(self):
        return self.sigmas[:, 1]

    @property
    def area(self):
        if self.weights is None:
            raise DomainError("frame was built without area weights")
        return float(np.sum(self.weights))

    def integrate(self, values):
        if self.weights is None:
            raise DomainError("frame was built without area weights")
        return float(np.sum(self.weights * values))

    def sigma(self, j):
        return self.sigmas[:, j]

    def hessian_identity_gap(self):
        """max |D^2u(e_a, e_b) - <grad u, nu> L_ab| over the batch."""
        if self.tangential_hessian is None:
            raise DomainError("frame was built without a metric spec")
        gap = self.tangential_hessian - self.du_nu[:, None, None] * self.shape_operator
        return float(np.max(np.abs(gap)))


def second_fundamental_form(surface, points, spec=None, weights=None):
    """
    BoundaryFrame of a surface at points lying on it.

    Args:
        surface: StarSurface
        points: (n,) or (m, n) points on the surface
        spec: MetricSpec; adds u, grad u, <grad u, nu> and B' = E^T D^2u E
        weights: Optional area weights carried along for integration

    Raises:
        SurfaceError: Vanishing normal
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    grad, hess = surface.implicit(points)
    norm = np.linalg.norm(grad, axis=-1)
    if np.any(norm == 0.0):
        raise SurfaceError("vanishing normal", points[int(np.argmin(norm))])
    normals = grad / norm[:, None]
    E = tangent_basis(normals)
    L = np.einsum('mai,mab,mbj->mij', E, hess, E) / norm[:, None, None]
    L = 0.5 * (L + np.swapaxes(L, -1, -2))
    curvatures = np.linalg.eigvalsh(L)
    frame = BoundaryFrame(
        points=points,
        normals=normals,
        tangents=E,
        shape_operator=L,
        curvatures=curvatures,
        sigmas=sigma_all(curvatures),
        weights=None if weights is None else np.asarray(weights, dtype=float),
    )
    if spec is not None:
        jets = jet_at(spec, points)
        frame.u = np.asarray(jets.value, dtype=float)
        frame.grad_u = jets.gradient
        frame.du_nu = np.sum(jets.gradient * normals, axis=-1)
        frame.hessian_u = jets.hessian
        frame.tangential_hessian = np.einsum('mai,mab,mbj->mij', E, jets.hessian, E)
    return frame


def boundary_frames(spec, surface, grid):
    """Frames at every node of a SphereGrid mapped onto the surface, with area weights."""
    sample = surface.sample(grid)
    return second_fundamental_form(surface, sample.points, spec, weights=sample.weights)


def horizon_residual(spec, surface, grid):
    """H - (n-1) <grad u, nu> at the surface nodes of grid."""
    frame = boundary_frames(spec, surface, grid)
    return frame.mean_curvature - (spec.n - 1) * frame.du_nu


def horizon_certificate(spec, surface, grid, tol=None):
    """The surface is a horizon when max |residual| <= tol (1 + max H)."""
    tol = horizon_tol() if tol is None else tol
    frame = boundary_frames(spec, surface, grid)
    residual = frame.mean_curvature - (spec.n - 1) * frame.du_nu
    worst = float(np.max(np.abs(residual)))
    bound = tol * (1.0 + float(np.max(np.abs(frame.mean_curvature))))
    return {'is_horizon': worst <= bound, 'max_residual': worst, 'tol': bound}


def level_set_variation(frame):
    """(max |u - mean u|, index of the worst node, allowed variation)."""
    deviation = np.abs(frame.u - np.mean(frame.u))
    index = int(np.argmax(deviation))
    allowed = LEVEL_SET_TOL * (1.0 + float(np.max(np.abs(frame.u))))
    return float(deviation[index]), index, allowed


@dataclass
class FluxIdentity:
    """Both routes to int T_{k-1}(D^2u)^{ij} u_j nu_i dA over one surface."""

    hessian_route: float
    curvature_route: float
    max_gap: float
    area: float

    @property
    def value(self):
        return self.hessian_route

    @property
    def agrees(self):
        return self.max_gap <= FLUX_IDENTITY_TOL

    def to_dict(self):
        return {
            'hessian_route': self.hessian_route,
            'curvature_route': self.curvature_route,
            'max_gap': self.max_gap,
            'agrees': self.agrees,
            'area': self.area,
        }


def flux_integrands(frame, k):
    """
    Pointwise T_{k-1}(D^2u)^{ij} u_j nu_i and <grad u, nu>^k sigma_{k-1}(L).

    They coincide wherever u is constant on the surface.
    """
    T = newton_tensor(k - 1, frame.hessian_u)
    lhs = np.einsum('mij,mj,mi->m', T, frame.grad_u, frame.normals)
    rhs = frame.du_nu ** k * frame.sigma(k - 1)
    return lhs, rhs


def boundary_flux(spec, surface, k=None, grid=None):
    """
    Boundary flux of T_{k-1}(D^2u) computed from the Hessian of u and from
    the second fundamental form.

    Returns:
        FluxIdentity; max_gap is relative to the largest pointwise value

    Raises:
        SurfaceError: u is not constant on the surface (names the worst node)
    """
    k = spec.k if k is None else k
    grid = grid or build_grid(spec.n, default_surface_degree())
    frame = boundary_frames(spec, surface, grid)
    variation, index, allowed = level_set_variation(frame)
    if variation > allowed:
        raise SurfaceError(
            f"u is not constant on the surface (variation {variation:.3e} > {allowed:.1e})",
            frame.points[index],
        )
    lhs, rhs = flux_integrands(frame, k)
    scale = max(float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))), np.finfo(float).tiny)
    gap = float(np.max(np.abs(lhs - rhs))) / scale
    result = FluxIdentity(
        hessian_route=frame.integrate(lhs),
        curvature_route=frame.integrate(rhs),
        max_gap=gap,
        area=frame.area,
    )
    if not result.agrees:
        logger.warning(f"flux identity gap {gap:.3e} on {surface.kind} for {spec.label}")
    return result
