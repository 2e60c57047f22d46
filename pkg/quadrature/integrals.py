"""
Surface and volume integrals on coordinate spheres and shells.

Node functions take an (m, n) array of points and return m values. They are
evaluated in chunks of GBC_NODE_CHUNK nodes and summed with math.fsum in
node order, so a result does not depend on chunking or thread count.
"""

import logging
import math

import numpy as np
from django.conf import settings
from scipy.special import roots_legendre

from core.exceptions import DomainError, GBCError, SurfaceError

logger = logging.getLogger(__name__)


def default_chunk():
    return getattr(settings, 'GBC_NODE_CHUNK', 4096)


def evaluate_nodes(f, points, chunk=None):
    """
    f at every point, chunked; non-finite values are reported with their node.

    Raises:
        DomainError: If f is not finite at some point or fails on a chunk
    """
    chunk = chunk or default_chunk()
    count = points.shape[0]
    values = np.empty(count)
    for start in range(0, count, chunk):
        stop = min(count, start + chunk)
        try:
            block = np.broadcast_to(np.asarray(f(points[start:stop]), dtype=float), (stop - start,))
        except SurfaceError:
            raise
        except GBCError as exc:
            raise DomainError(f"{exc} (nodes {start}..{stop - 1}, first at {points[start].tolist()})") from exc
        bad = ~np.isfinite(block)
        if bad.any():
            index = start + int(np.argmax(bad))
            raise DomainError(f"integrand is not finite at node {index}, x = {points[index].tolist()}")
        values[start:stop] = block
    return values


def weighted_sum(weights, values):
    """Compensated sum of w_i f_i in node order."""
    return math.fsum((np.asarray(weights) * np.asarray(values)).tolist())


def surface_integral(f, grid, r, center=None, chunk=None):
    """
    r^{n-1} sum_i w_i f(r theta_i): the integral of f over the sphere of radius r.

    Args:
        f: Node function (m, n) -> (m,)
        grid: SphereGrid
        r: Radius
        center: Optional center of the sphere
    """
    values = evaluate_nodes(f, grid.scaled(r, center), chunk)
    return r ** (grid.n - 1) * weighted_sum(grid.weights, values)


def shell_edges(r_inner, r_outer, shells):
    """Geometric partition of [r_inner, r_outer] into shells."""
    if not 0 < r_inner < r_outer:
        raise DomainError(f"need 0 < r_inner < r_outer, got {r_inner}, {r_outer}")
    return r_inner * (r_outer / r_inner) ** (np.arange(shells + 1) / shells)


def radial_rule(r_inner, r_outer, shells, order):
    """Gauss-Legendre nodes and weights on each geometric shell."""
    t, w = roots_legendre(order)
    edges = shell_edges(r_inner, r_outer, shells)
    lo, hi = edges[:-1, None], edges[1:, None]
    radii = 0.5 * (hi - lo) * t[None, :] + 0.5 * (hi + lo)
    weights = 0.5 * (hi - lo) * w[None, :]
    return radii.reshape(-1), weights.reshape(-1)


def ball_integral(f, grid, r_outer, order=16, chunk=None):
    """Integral of f over the ball |x| < r_outer (one Gauss-Legendre panel in r)."""
    if not r_outer > 0:
        raise DomainError(f"ball radius must be positive, got {r_outer}")
    t, w = roots_legendre(order)
    radii = 0.5 * r_outer * (t + 1.0)
    layers = [surface_integral(f, grid, float(r), chunk=chunk) for r in radii]
    return weighted_sum(0.5 * r_outer * w, layers)


def volume_integral(f, grid, r_inner, r_outer, shells=16, order=8, chunk=None):
    """
    Integral of f over the annulus r_inner < |x| < r_outer.

    Radial Gauss-Legendre per geometric shell times the sphere grid.
    """
    radii, radial_weights = radial_rule(r_inner, r_outer, shells, order)
    layers = [surface_integral(f, grid, float(r), chunk=chunk) for r in radii]
    return weighted_sum(radial_weights, layers)
